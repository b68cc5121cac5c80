#include "netrecon/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "io";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(kStage, "line " + std::to_string(line) + ": not a number '" + s + "'");
  }
}

Json coefficient_json(const CoefficientMatrix& w) {
  Json out = Json::array();
  for (int node = 0; node < w.nodes(); ++node) {
    Json terms = Json::object();
    for (std::size_t r = 0; r < w.descriptors.size(); ++r) {
      const double v = w.values(static_cast<Eigen::Index>(r), node);
      if (v != 0.0) terms[w.descriptors[r].label()] = v;
    }
    out.push_back({{"node", node + 1}, {"terms", terms}});
  }
  return out;
}

}  // namespace

void write_series_csv(std::ostream& out, const MultivariateSeries& series) {
  const char* prefix = series.meaning == ChannelMeaning::Phase ? "theta" : "x";
  out << "t";
  for (int c = 0; c < series.channels(); ++c) out << ',' << prefix << c + 1;
  out << '\n' << std::setprecision(17);
  for (int r = 0; r < series.samples(); ++r) {
    out << r * series.dt;
    for (int c = 0; c < series.channels(); ++c) out << ',' << series.values(r, c);
    out << '\n';
  }
}

MultivariateSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(kStage, "empty series file");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "t") throw Error(kStage, "series header must start with t");
  MultivariateSeries series;
  series.meaning = header[1].rfind("theta", 0) == 0 ? ChannelMeaning::Phase : ChannelMeaning::RealPartX;
  const auto channels = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<double> times, values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != channels + 1)
      throw Error(kStage, "line " + std::to_string(line_no) + ": wrong number of fields");
    times.push_back(parse_number(fields[0], line_no));
    for (Eigen::Index c = 0; c < channels; ++c) values.push_back(parse_number(fields[c + 1], line_no));
  }
  if (times.size() < 2) throw Error(kStage, "series needs at least two samples");
  series.dt = times[1] - times[0];
  series.values.resize(static_cast<Eigen::Index>(times.size()), channels);
  for (Eigen::Index r = 0; r < series.values.rows(); ++r)
    for (Eigen::Index c = 0; c < channels; ++c) series.values(r, c) = values[r * channels + c];
  series.validate();
  return series;
}

void write_phase_csv(std::ostream& out, const PhaseData& ph) {
  out << "t";
  for (int c = 0; c < ph.channels(); ++c) out << ",theta" << c + 1;
  for (int c = 0; c < ph.channels(); ++c) out << ",dtheta" << c + 1;
  out << '\n' << std::setprecision(17);
  for (int r = 0; r < ph.samples(); ++r) {
    out << (ph.trim_leading + r) * ph.dt;
    for (int c = 0; c < ph.channels(); ++c) out << ',' << ph.phases(r, c);
    for (int c = 0; c < ph.channels(); ++c) out << ',' << ph.derivatives(r, c);
    out << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

Json to_json(const ColumnDescriptor& d) {
  Json j;
  switch (d.kind) {
    case ColumnDescriptor::Kind::Constant:
      j["kind"] = "constant";
      break;
    case ColumnDescriptor::Kind::NodeHarmonic:
      j["kind"] = "node_harmonic";
      j["nodes"] = {d.first + 1};
      j["harmonic"] = d.harmonic;
      break;
    case ColumnDescriptor::Kind::PairDiff:
      j["kind"] = "pair_diff";
      j["nodes"] = {d.first + 1, d.second + 1};
      j["harmonic"] = 1;
      break;
  }
  if (d.kind != ColumnDescriptor::Kind::Constant) j["trig"] = d.trig == Trig::Sin ? "sin" : "cos";
  j["label"] = d.label();
  return j;
}

Json descriptors_to_json(const std::vector<ColumnDescriptor>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(to_json(d));
  return out;
}

Json to_json(const LassoFit& fit, const std::vector<ColumnDescriptor>& ds) {
  Json j;
  j["lambda_grid"] = fit.lambda_grid;
  j["support_sizes"] = fit.support_sizes();
  j["cv_error"] = fit.cv_error;
  j["chosen_lambda"] = fit.chosen_lambda;
  j["chosen_index"] = fit.chosen_index;
  Json coeffs = Json::object();
  for (Eigen::Index r = 0; r < fit.coefficients.size(); ++r)
    if (fit.coefficients[r] != 0.0)
      coeffs[static_cast<std::size_t>(r) < ds.size() ? ds[r].label() : std::to_string(r)] =
          fit.coefficients[r];
  j["coefficients"] = coeffs;
  return j;
}

Json to_json(const RecoveryReport& report) {
  Json j;
  j["method"] = to_string(report.method);
  j["nodes"] = report.recovered.size();
  Json edges = Json::array();
  for (const auto& [t, s] : report.recovered.edges()) edges.push_back({t + 1, s + 1});
  j["edges"] = edges;
  Json foreign = Json::array();
  for (const auto& c : report.foreign_claims)
    foreign.push_back({{"equation", c[0] + 1}, {"pair", {c[1] + 1, c[2] + 1}}});
  j["foreign_claims"] = foreign;
  if (report.score) {
    j["score"] = {{"false_positives", report.score->false_positives},
                  {"false_negatives", report.score->false_negatives}};
  }
  if (report.metrics) {
    std::vector<double> ki(report.metrics->kappa_i.data(),
                           report.metrics->kappa_i.data() + report.metrics->kappa_i.size());
    j["kappa_i"] = ki;
    j["kappa"] = report.metrics->kappa;
    j["kappa_s"] = report.metrics->kappa_s;
    j["kappa_minus_links"] = report.metrics->kappa_s_links;
  }
  j["chosen_lambda"] = report.chosen_lambda;
  j["sigma_min"] = report.sigma_min;
  j["coherence"] = report.coherence;
  j["library"] = {{"rows", report.library_rows}, {"columns", report.library_columns}};
  j["residual"] = report.residual;
  j["coefficients"] = coefficient_json(report.coefficients);
  const auto& cfg = report.config;
  Json extended = Json::array();
  for (int n : cfg.extended_nodes) extended.push_back(n + 1);
  j["config"] = {
      {"sg_window", cfg.preprocess.smoothing.window},
      {"sg_order", cfg.preprocess.smoothing.order},
      {"trim_fraction", cfg.preprocess.trim_fraction},
      {"smooth_phase_first", cfg.preprocess.smooth_phase_first},
      {"first_harmonics_only", cfg.first_harmonics_only},
      {"extended_nodes", extended},
      {"threshold_ratio", cfg.threshold_ratio},
      {"threshold_scope",
       cfg.threshold_scope == ThresholdScope::Network ? "network" : "per_equation"},
      {"penalize_constant", cfg.penalize_constant},
      {"folds", cfg.cross_validation.folds},
      {"grid_size", cfg.cross_validation.grid_size},
      {"decades", cfg.cross_validation.decades},
      {"coupling", cfg.coupling}};
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(kStage, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(kStage, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(kStage, "write failed for " + path.string());
}

}  // namespace netrecon
