#include "netrecon/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "netrecon/adapt.hpp"
#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "recovery";
constexpr double kRoundoff = 1e-9;

struct PairRows {
  int sin_row = -1;
  int cos_row = -1;
};

// Unordered pair (k < m) -> rows holding its sin and cos coefficients.
std::map<std::pair<int, int>, PairRows> pair_rows(const std::vector<ColumnDescriptor>& ds) {
  std::map<std::pair<int, int>, PairRows> out;
  for (int r = 0; r < static_cast<int>(ds.size()); ++r) {
    const auto& d = ds[r];
    if (!d.is_pair()) continue;
    auto& rows = out[{d.first, d.second}];
    (d.trig == Trig::Sin ? rows.sin_row : rows.cos_row) = r;
  }
  return out;
}

double magnitude(const Eigen::MatrixXd& w, int node, const PairRows& rows) {
  const double c = rows.sin_row >= 0 ? w(rows.sin_row, node) : 0.0;
  const double d = rows.cos_row >= 0 ? w(rows.cos_row, node) : 0.0;
  return std::hypot(c, d);
}

}  // namespace

std::string to_string(Method m) { return m == Method::L2 ? "l2" : "lasso"; }

Method parse_method(const std::string& name) {
  if (name == "l2" || name == "L2") return Method::L2;
  if (name == "lasso" || name == "LASSO") return Method::Lasso;
  throw Error("config", "unknown method '" + name + "'");
}

double CoefficientMatrix::pair_magnitude(int node, int a, int b) const {
  const auto rows = pair_rows(descriptors);
  const auto it = rows.find({std::min(a, b), std::max(a, b)});
  return it == rows.end() ? 0.0 : magnitude(values, node, it->second);
}

CoefficientMatrix threshold_coefficients(const CoefficientMatrix& w, double ratio,
                                         ThresholdScope scope) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(kStage, "threshold ratio must lie in (0, 1)");
  CoefficientMatrix out = w;
  const auto rows = pair_rows(w.descriptors);
  // Pairs at roundoff relative to the whole matrix are never couplings, even
  // when nothing larger is in scope (an uncoupled network).
  const double floor = w.values.size() ? kRoundoff * w.values.cwiseAbs().maxCoeff() : 0.0;
  auto largest_in = [&](int node) {
    double largest = 0.0;
    for (const auto& [pair, r] : rows) largest = std::max(largest, magnitude(w.values, node, r));
    return largest;
  };
  double network_largest = 0.0;
  for (int node = 0; node < w.nodes(); ++node)
    network_largest = std::max(network_largest, largest_in(node));
  for (int node = 0; node < w.nodes(); ++node) {
    const double largest = scope == ThresholdScope::Network ? network_largest : largest_in(node);
    for (const auto& [pair, r] : rows) {
      const double mag = magnitude(w.values, node, r);
      if (mag > floor && mag >= ratio * largest) continue;
      if (r.sin_row >= 0) out.values(r.sin_row, node) = 0.0;
      if (r.cos_row >= 0) out.values(r.cos_row, node) = 0.0;
    }
  }
  return out;
}

AssembledNetwork coefficients_to_network(const CoefficientMatrix& w) {
  int n = w.nodes();
  for (const auto& d : w.descriptors)
    if (d.is_pair()) n = std::max(n, d.second + 1);
  AssembledNetwork out{Network(std::max(n, 1)), {}};
  for (const auto& [pair, r] : pair_rows(w.descriptors)) {
    const auto [k, m] = pair;
    for (int node = 0; node < w.nodes(); ++node) {
      if (magnitude(w.values, node, r) == 0.0) continue;
      if (node == k) {
        out.network.set_edge(k, m);
      } else if (node == m) {
        out.network.set_edge(m, k);
      } else {
        out.network.set_edge(m, k);
        out.foreign_claims.push_back({node, k, m});
      }
    }
  }
  return out;
}

CouplingMetrics coupling_metrics(const CoefficientMatrix& w, double alpha) {
  if (!(alpha > 0.0)) throw Error(kStage, "coupling strength must be positive for kappa");
  CouplingMetrics out;
  out.kappa_i = Eigen::VectorXd::Zero(w.nodes());
  for (const auto& [pair, r] : pair_rows(w.descriptors))
    for (int node = 0; node < w.nodes(); ++node) out.kappa_i[node] += magnitude(w.values, node, r);
  const double n = w.nodes();
  out.kappa = out.kappa_i.sum() / alpha;
  out.kappa_s = out.kappa - n;
  out.kappa_s_links = out.kappa - (n - 1.0);
  return out;
}

RecoveryReport recover_from_library(const LibraryMatrix& library, const TargetMatrix& target,
                                    const std::optional<Network>& truth, Method method,
                                    const RecoveryConfig& config) {
  if (target.values.rows() != library.rows())
    throw Error(kStage, "library and target have different row counts");
  const int nodes = static_cast<int>(target.values.cols());
  const LibraryMatrix normalized = column_normalize(library);
  const Eigen::VectorXd& scales = normalized.column_scales;

  RecoveryReport report;
  report.method = method;
  report.config = config;
  report.library_rows = library.rows();
  report.library_columns = library.columns();
  report.sigma_min = min_singular_value(normalized.values);
  report.coherence = coherence(normalized.values);

  CoefficientMatrix raw{Eigen::MatrixXd::Zero(library.columns(), nodes), library.descriptors};
  CrossValidationOptions cv = config.cross_validation;
  cv.column_scales = scales;
  if (!config.penalize_constant) {
    cv.lasso.penalty_weights = Eigen::VectorXd::Ones(library.columns());
    for (int j = 0; j < library.columns(); ++j)
      if (library.descriptors[j].kind == ColumnDescriptor::Kind::Constant)
        cv.lasso.penalty_weights[j] = 0.0;
  }
  for (int node = 0; node < nodes; ++node) {
    const Eigen::VectorXd v = target.values.col(node);
    if (method == Method::L2) {
      raw.values.col(node) = least_squares(normalized.values, v).cwiseQuotient(scales);
    } else {
      const LassoFit fit = cross_validate(normalized.values, v, cv);
      raw.values.col(node) = fit.coefficients;
      report.chosen_lambda.push_back(fit.chosen_lambda);
    }
  }
  report.raw_coefficients = raw;
  report.coefficients = threshold_coefficients(raw, config.threshold_ratio, config.threshold_scope);
  const LibraryMatrix plain = denormalize(library);
  report.residual = (plain.values * report.coefficients.values - target.values).norm();

  AssembledNetwork assembled = coefficients_to_network(report.coefficients);
  if (assembled.network.size() != nodes) {
    Network resized(nodes);
    for (const auto& [t, s] : assembled.network.edges()) resized.set_edge(t, s);
    assembled.network = resized;
  }
  report.recovered = assembled.network;
  report.foreign_claims = std::move(assembled.foreign_claims);
  if (truth) {
    if (truth->size() != nodes) throw Error(kStage, "truth network size differs from the series");
    report.score = compare(*truth, report.recovered);
  }
  if (config.coupling > 0.0) report.metrics = coupling_metrics(report.coefficients, config.coupling);
  return report;
}

RecoveryReport recover(const MultivariateSeries& series, const std::optional<Network>& truth,
                       Method method, const RecoveryConfig& config) {
  series.validate();
  const PhaseData ph = preprocess(series, config.preprocess);
  auto [library, target] = build_library(ph, config.first_harmonics_only);
  for (int node : config.extended_nodes) library = extend_basis(library, ph, node);
  return recover_from_library(library, target, truth, method, config);
}

}  // namespace netrecon
