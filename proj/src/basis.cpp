#include "netrecon/basis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {
constexpr const char* kStage = "basis";
constexpr int kDefaultMaxHarmonic = 10;

const char* trig_name(Trig t) { return t == Trig::Sin ? "sin" : "cos"; }

LibraryMatrix take_columns(const LibraryMatrix& lib, const std::vector<int>& idx) {
  LibraryMatrix out;
  out.values.resize(lib.rows(), static_cast<Eigen::Index>(idx.size()));
  out.column_scales.resize(static_cast<Eigen::Index>(idx.size()));
  out.descriptors.reserve(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = lib.values.col(idx[j]);
    out.column_scales[static_cast<Eigen::Index>(j)] = lib.column_scales[idx[j]];
    out.descriptors.push_back(lib.descriptors[idx[j]]);
  }
  return out;
}
}  // namespace

ColumnDescriptor ColumnDescriptor::constant() { return {}; }

ColumnDescriptor ColumnDescriptor::node_harmonic(int node, int harmonic, Trig trig) {
  if (node < 0 || harmonic < 1) throw Error(kStage, "invalid node harmonic descriptor");
  ColumnDescriptor d;
  d.kind = Kind::NodeHarmonic;
  d.first = node;
  d.harmonic = harmonic;
  d.trig = trig;
  return d;
}

ColumnDescriptor ColumnDescriptor::pair_diff(int k, int m, Trig trig) {
  if (k < 0 || m <= k) throw Error(kStage, "pair descriptor needs 0 <= k < m");
  ColumnDescriptor d;
  d.kind = Kind::PairDiff;
  d.first = k;
  d.second = m;
  d.trig = trig;
  return d;
}

std::string ColumnDescriptor::label() const {
  switch (kind) {
    case Kind::Constant:
      return "1";
    case Kind::NodeHarmonic: {
      const std::string arg = (harmonic == 1 ? "" : std::to_string(harmonic)) + "th" +
                              std::to_string(first + 1);
      return std::string(trig_name(trig)) + "(" + arg + ")";
    }
    case Kind::PairDiff:
      return std::string(trig_name(trig)) + "(th" + std::to_string(first + 1) + "-th" +
             std::to_string(second + 1) + ")";
  }
  return {};
}

Eigen::VectorXd evaluate_column(const ColumnDescriptor& d, const Eigen::MatrixXd& phases) {
  const Eigen::Index n = phases.rows();
  auto apply = [&](const Eigen::VectorXd& arg) -> Eigen::VectorXd {
    return d.trig == Trig::Sin ? Eigen::VectorXd(arg.array().sin())
                               : Eigen::VectorXd(arg.array().cos());
  };
  switch (d.kind) {
    case ColumnDescriptor::Kind::Constant:
      return Eigen::VectorXd::Ones(n);
    case ColumnDescriptor::Kind::NodeHarmonic:
      if (d.first >= phases.cols()) throw Error(kStage, "descriptor node out of range");
      return apply(d.harmonic * phases.col(d.first));
    case ColumnDescriptor::Kind::PairDiff:
      if (d.second >= phases.cols()) throw Error(kStage, "descriptor node out of range");
      return apply(phases.col(d.first) - phases.col(d.second));
  }
  return {};
}

int LibraryMatrix::find(const ColumnDescriptor& d) const {
  const auto it = std::find(descriptors.begin(), descriptors.end(), d);
  return it == descriptors.end() ? -1 : static_cast<int>(it - descriptors.begin());
}

std::pair<LibraryMatrix, TargetMatrix> build_library(const PhaseData& ph,
                                                     bool first_harmonics_only) {
  if (ph.samples() == 0 || ph.channels() == 0) throw Error(kStage, "empty phase data");
  const int n_nodes = ph.channels();
  std::vector<ColumnDescriptor> desc;
  desc.push_back(ColumnDescriptor::constant());
  for (int l = 0; l < n_nodes; ++l) desc.push_back(ColumnDescriptor::node_harmonic(l, 1, Trig::Sin));
  for (int l = 0; l < n_nodes; ++l) desc.push_back(ColumnDescriptor::node_harmonic(l, 1, Trig::Cos));
  for (int k = 0; k < n_nodes; ++k) {
    for (int m = k + 1; m < n_nodes; ++m) {
      desc.push_back(ColumnDescriptor::pair_diff(k, m, Trig::Sin));
      desc.push_back(ColumnDescriptor::pair_diff(k, m, Trig::Cos));
    }
  }
  if (!first_harmonics_only) {
    for (int l = 0; l < n_nodes; ++l) {
      for (int h = 2; h <= kDefaultMaxHarmonic; ++h) {
        desc.push_back(ColumnDescriptor::node_harmonic(l, h, Trig::Sin));
        desc.push_back(ColumnDescriptor::node_harmonic(l, h, Trig::Cos));
      }
    }
  }

  const double prefactor = 1.0 / std::sqrt(static_cast<double>(ph.samples()));
  LibraryMatrix lib;
  lib.values.resize(ph.samples(), static_cast<Eigen::Index>(desc.size()));
  for (std::size_t j = 0; j < desc.size(); ++j)
    lib.values.col(static_cast<Eigen::Index>(j)) = prefactor * evaluate_column(desc[j], ph.phases);
  lib.descriptors = std::move(desc);
  lib.column_scales = Eigen::VectorXd::Ones(lib.columns());
  if (!lib.values.allFinite()) throw Error(kStage, "library contains non-finite entries");

  TargetMatrix target{prefactor * ph.derivatives};
  return {std::move(lib), std::move(target)};
}

std::pair<LibraryMatrix, LibraryMatrix> select_columns(const LibraryMatrix& lib,
                                                       const std::vector<ColumnDescriptor>& seed) {
  std::vector<int> seed_idx;
  std::set<int> taken;
  for (const auto& d : seed) {
    const int j = lib.find(d);
    if (j < 0) throw Error(kStage, "seed descriptor " + d.label() + " not in library");
    if (taken.insert(j).second) seed_idx.push_back(j);
  }
  std::vector<int> rest;
  for (int j = 0; j < lib.columns(); ++j)
    if (!taken.contains(j)) rest.push_back(j);
  return {take_columns(lib, seed_idx), take_columns(lib, rest)};
}

LibraryMatrix extend_basis(const LibraryMatrix& lib, const PhaseData& ph, int node,
                           int max_harmonic) {
  if (node < 0 || node >= ph.channels()) throw Error(kStage, "extension node out of range");
  if (ph.samples() != lib.rows()) throw Error(kStage, "phase data does not match library rows");
  if (max_harmonic < 2) throw Error(kStage, "max harmonic must be at least 2");
  std::vector<ColumnDescriptor> added;
  for (int h = 2; h <= max_harmonic; ++h) {
    for (Trig t : {Trig::Sin, Trig::Cos}) {
      const auto d = ColumnDescriptor::node_harmonic(node, h, t);
      if (lib.find(d) >= 0) throw Error(kStage, "harmonic " + d.label() + " already present");
      added.push_back(d);
    }
  }
  const double prefactor = 1.0 / std::sqrt(static_cast<double>(ph.samples()));
  LibraryMatrix out;
  const Eigen::Index m0 = lib.columns();
  const auto extra = static_cast<Eigen::Index>(added.size());
  out.values.resize(lib.rows(), m0 + extra);
  out.values.leftCols(m0) = lib.values;
  out.column_scales.resize(m0 + extra);
  out.column_scales.head(m0) = lib.column_scales;
  out.descriptors = lib.descriptors;
  for (Eigen::Index j = 0; j < extra; ++j) {
    out.values.col(m0 + j) = prefactor * evaluate_column(added[j], ph.phases);
    out.column_scales[m0 + j] = 1.0;
    out.descriptors.push_back(added[j]);
  }
  return out;
}

LibraryMatrix column_normalize(const LibraryMatrix& lib) {
  LibraryMatrix out = lib;
  for (int j = 0; j < lib.columns(); ++j) {
    const double norm = lib.values.col(j).norm();
    if (norm == 0.0) throw Error(kStage, "zero column " + lib.descriptors[j].label());
    out.values.col(j) /= norm;
    out.column_scales[j] = lib.column_scales[j] * norm;
  }
  return out;
}

LibraryMatrix denormalize(const LibraryMatrix& lib) {
  LibraryMatrix out = lib;
  for (int j = 0; j < lib.columns(); ++j) out.values.col(j) *= lib.column_scales[j];
  out.column_scales.setOnes();
  return out;
}

std::vector<ColumnDescriptor> pair_columns(int a, int b) {
  const int k = std::min(a, b);
  const int m = std::max(a, b);
  return {ColumnDescriptor::pair_diff(k, m, Trig::Sin), ColumnDescriptor::pair_diff(k, m, Trig::Cos)};
}

}  // namespace netrecon
