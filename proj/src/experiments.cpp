#include "netrecon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "netrecon/analysis.hpp"
#include "netrecon/error.hpp"
#include "netrecon/plot.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "experiment";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::TimeSweep, "time-sweep"},
    {ExperimentKind::SizeSweep, "size-sweep"},
    {ExperimentKind::ThreeNetworks, "three-networks"},
    {ExperimentKind::BasisExtension, "basis-extension"},
    {ExperimentKind::NoiseSweep, "noise-sweep"},
    {ExperimentKind::InstabilityDemo, "instability-demo"},
};

// Runs fn(0..count-1) on up to `threads` workers. Results must be written to
// per-index slots so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(int count, int threads, Fn fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Outcome {
  bool ok = false;
  int fp = 0, fn = 0, columns = 0;
  double log_sigma_min = 0.0;
  double kappa_s = 0.0, kappa_minus_links = 0.0;
};

Outcome outcome_of(const RecoveryReport& r) {
  Outcome o;
  o.ok = true;
  o.fp = r.score ? r.score->false_positives : 0;
  o.fn = r.score ? r.score->false_negatives : 0;
  o.columns = r.library_columns;
  o.log_sigma_min = std::log10(std::max(r.sigma_min, 1e-300));
  if (r.metrics) {
    o.kappa_s = r.metrics->kappa_s;
    o.kappa_minus_links = r.metrics->kappa_s_links;
  }
  return o;
}

void log_failure(const std::string& what, int seed, double x, Method m, const std::exception& e) {
  std::cerr << what << ": seed " << seed << ", x " << x << ", " << to_string(m) << ": " << e.what()
            << '\n';
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

SweepRow aggregate(double x, Method m, const std::vector<Outcome>& runs) {
  SweepRow row;
  row.x = x;
  row.method = m;
  std::vector<double> fp, fn, total, ls, ks, kl;
  for (const auto& o : runs) {
    if (!o.ok) {
      ++row.failures;
      continue;
    }
    ++row.seeds;
    row.columns = o.columns;
    fp.push_back(o.fp);
    fn.push_back(o.fn);
    total.push_back(o.fp + o.fn);
    ls.push_back(o.log_sigma_min);
    ks.push_back(o.kappa_s);
    kl.push_back(o.kappa_minus_links);
  }
  std::tie(row.mean_fp, row.std_fp) = mean_std(fp);
  std::tie(row.mean_fn, row.std_fn) = mean_std(fn);
  std::tie(row.mean_total, row.std_total) = mean_std(total);
  std::tie(row.mean_log_sigma_min, row.std_log_sigma_min) = mean_std(ls);
  std::tie(row.mean_kappa_s, row.std_kappa_s) = mean_std(ks);
  std::tie(row.mean_kappa_minus_links, row.std_kappa_minus_links) = mean_std(kl);
  return row;
}

// outcomes[grid][method][seed]
using OutcomeTable = std::vector<std::vector<std::vector<Outcome>>>;

OutcomeTable make_table(const ExperimentConfig& cfg) {
  return OutcomeTable(cfg.grid.size(),
                      std::vector<std::vector<Outcome>>(cfg.methods.size(),
                                                        std::vector<Outcome>(cfg.seeds)));
}

SweepResult aggregate_table(const ExperimentConfig& cfg, const OutcomeTable& table) {
  SweepResult out;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g)
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      out.rows.push_back(aggregate(cfg.grid[g], cfg.methods[m], table[g][m]));
  return out;
}

OscillatorEnsemble ensemble(const Network& net, double coupling, const Instance& inst) {
  return OscillatorEnsemble{net, coupling, inst.frequencies};
}

MultivariateSeries head(const MultivariateSeries& s, int samples) {
  MultivariateSeries out = s;
  out.values = s.values.topRows(samples);
  return out;
}

RecoveryConfig recovery_config(const ExperimentConfig& cfg) {
  RecoveryConfig r = cfg.recovery;
  r.coupling = cfg.coupling;
  return r;
}

std::string network_kind_name(NetworkKind k) {
  switch (k) {
    case NetworkKind::Star: return "star";
    case NetworkKind::TwinStars: return "twin-stars";
    case NetworkKind::Ring: return "ring";
  }
  return "star";
}

NetworkKind parse_network_kind(const std::string& s) {
  if (s == "star") return NetworkKind::Star;
  if (s == "twin-stars") return NetworkKind::TwinStars;
  if (s == "ring") return NetworkKind::Ring;
  throw Error("config", "unknown network kind '" + s + "'");
}

template <class T>
void read(const Json& j, const char* key, T& into) {
  if (j.contains(key)) {
    try {
      into = j.at(key).get<T>();
    } catch (const std::exception& e) {
      throw Error("config", std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentNames)
    if (kind == k) return name;
  return "time-sweep";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (const auto& [kind, n] : kExperimentNames)
    if (name == n) return kind;
  throw Error("config", "unknown experiment '" + name + "'");
}

Network NetworkSpec::build() const {
  switch (kind) {
    case NetworkKind::Star: return make_star(nodes);
    case NetworkKind::TwinStars: return make_twin_stars(leaves_a, leaves_b, link);
    case NetworkKind::Ring: return make_ring(nodes);
  }
  return make_star(nodes);
}

NetworkSpec NetworkSpec::resized(int n) const {
  NetworkSpec out = *this;
  if (kind == NetworkKind::TwinStars) {
    if (n < 4) throw Error(kStage, "twin stars need at least 4 nodes");
    out.leaves_a = (n - 2) / 2;
    out.leaves_b = n - 2 - out.leaves_a;
  } else {
    out.nodes = n;
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (seeds < 1) throw Error("config", "seeds must be at least 1");
  if (experiment != ExperimentKind::ThreeNetworks && grid.empty())
    throw Error("config", "grid must not be empty");
  if (methods.empty()) throw Error("config", "method set must not be empty");
  if (!(coupling >= 0.0)) throw Error("config", "coupling must be non-negative");
  if (!(dt_sample > 0.0) || !(dt_euler > 0.0)) throw Error("config", "time steps must be positive");
  if (!(t_n > 0.0)) throw Error("config", "t_n must be positive");
  if (retries < 0) throw Error("config", "retries must be non-negative");
  switch (experiment) {
    case ExperimentKind::TimeSweep:
      for (double t : grid)
        if (!(t > 0.0)) throw Error("config", "time grid values must be positive");
      break;
    case ExperimentKind::SizeSweep:
      for (double n : grid)
        if (n < 2 || n != std::floor(n)) throw Error("config", "size grid needs integers >= 2");
      break;
    case ExperimentKind::BasisExtension:
      for (double k : grid)
        if (k < 0 || k != std::floor(k) || k > network.build().size())
          throw Error("config", "extension steps must be integers in [0, N]");
      break;
    case ExperimentKind::NoiseSweep:
      for (double eta : grid)
        if (!(eta >= 0.0)) throw Error("config", "noise intensities must be non-negative");
      break;
    case ExperimentKind::InstabilityDemo:
      for (double b : grid)
        if (!(b > 0.0 && b < 90.0)) throw Error("config", "angles must lie in (0, 90) degrees");
      break;
    case ExperimentKind::ThreeNetworks:
      break;
  }
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.output = to_string(kind);
  switch (kind) {
    case ExperimentKind::TimeSweep:
      for (int t = 20; t <= 200; t += 20) cfg.grid.push_back(t);
      break;
    case ExperimentKind::SizeSweep:
      for (int n = 4; n <= 14; ++n) cfg.grid.push_back(n);
      break;
    case ExperimentKind::ThreeNetworks:
      cfg.seeds = 1;
      break;
    case ExperimentKind::BasisExtension:
      cfg.network.kind = NetworkKind::Ring;
      for (int k = 0; k <= 10; ++k) cfg.grid.push_back(k);
      break;
    case ExperimentKind::NoiseSweep:
      // Noise-free baseline, then three decades. Below about 1e-2 the
      // shrinkage of true couplings and the growth of spurious ones cancel.
      cfg.grid = {0.0, 0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0};
      cfg.methods = {Method::Lasso};
      cfg.recovery.preprocess.smooth_phase_first = true;
      break;
    case ExperimentKind::InstabilityDemo:
      cfg.grid = {80.0, 85.0, 89.0, 89.9};
      cfg.seeds = 1;
      break;
  }
  return cfg;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error("config", "configuration must be a JSON object");
  std::string name = "time-sweep";
  read(j, "experiment", name);
  ExperimentConfig cfg = ExperimentConfig::defaults(parse_experiment(name));

  if (j.contains("network")) {
    const Json& n = j.at("network");
    std::string kind = network_kind_name(cfg.network.kind);
    read(n, "kind", kind);
    cfg.network.kind = parse_network_kind(kind);
    read(n, "nodes", cfg.network.nodes);
    read(n, "leaves_a", cfg.network.leaves_a);
    read(n, "leaves_b", cfg.network.leaves_b);
    std::string link = cfg.network.link == HubLink::AToB ? "a-to-b" : "b-to-a";
    read(n, "hub_link", link);
    if (link != "a-to-b" && link != "b-to-a") throw Error("config", "hub_link is a-to-b or b-to-a");
    cfg.network.link = link == "a-to-b" ? HubLink::AToB : HubLink::BToA;
  }
  read(j, "coupling", cfg.coupling);
  std::string model = cfg.model == SourceModel::Phase ? "phase" : "stuart-landau";
  read(j, "model", model);
  if (model != "phase" && model != "stuart-landau")
    throw Error("config", "model is phase or stuart-landau");
  cfg.model = model == "phase" ? SourceModel::Phase : SourceModel::StuartLandau;
  read(j, "dt_sample", cfg.dt_sample);
  read(j, "t_n", cfg.t_n);
  read(j, "grid", cfg.grid);
  read(j, "seeds", cfg.seeds);
  read(j, "master_seed", cfg.master_seed);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names);
    cfg.methods.clear();
    for (const auto& m : names) cfg.methods.push_back(parse_method(m));
  }
  read(j, "dt_euler", cfg.dt_euler);
  read(j, "noise_via_hilbert", cfg.noise_via_hilbert);
  read(j, "retries", cfg.retries);
  read(j, "threads", cfg.threads);
  std::string out = cfg.output.string();
  read(j, "output", out);
  cfg.output = out;

  if (j.contains("filter")) {
    const Json& f = j.at("filter");
    auto& p = cfg.recovery.preprocess;
    read(f, "window", p.smoothing.window);
    read(f, "order", p.smoothing.order);
    read(f, "trim_fraction", p.trim_fraction);
    read(f, "smooth_phase_first", p.smooth_phase_first);
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    auto& r = cfg.recovery;
    read(s, "folds", r.cross_validation.folds);
    read(s, "grid_size", r.cross_validation.grid_size);
    read(s, "decades", r.cross_validation.decades);
    read(s, "tolerance", r.cross_validation.lasso.tolerance);
    read(s, "max_sweeps", r.cross_validation.lasso.max_sweeps);
    read(s, "penalize_constant", r.penalize_constant);
    read(s, "threshold_ratio", r.threshold_ratio);
    std::string scope = r.threshold_scope == ThresholdScope::Network ? "network" : "per-equation";
    read(s, "threshold_scope", scope);
    if (scope != "network" && scope != "per-equation")
      throw Error("config", "threshold_scope is network or per-equation");
    r.threshold_scope = scope == "network" ? ThresholdScope::Network : ThresholdScope::PerEquation;
  }
  cfg.validate();
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> methods;
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  const auto& r = cfg.recovery;
  return Json{
      {"experiment", to_string(cfg.experiment)},
      {"network",
       {{"kind", network_kind_name(cfg.network.kind)},
        {"nodes", cfg.network.nodes},
        {"leaves_a", cfg.network.leaves_a},
        {"leaves_b", cfg.network.leaves_b},
        {"hub_link", cfg.network.link == HubLink::AToB ? "a-to-b" : "b-to-a"}}},
      {"coupling", cfg.coupling},
      {"model", cfg.model == SourceModel::Phase ? "phase" : "stuart-landau"},
      {"dt_sample", cfg.dt_sample},
      {"t_n", cfg.t_n},
      {"grid", cfg.grid},
      {"seeds", cfg.seeds},
      {"master_seed", cfg.master_seed},
      {"methods", methods},
      {"dt_euler", cfg.dt_euler},
      {"noise_via_hilbert", cfg.noise_via_hilbert},
      {"retries", cfg.retries},
      {"threads", cfg.threads},
      {"output", cfg.output.string()},
      {"filter",
       {{"window", r.preprocess.smoothing.window},
        {"order", r.preprocess.smoothing.order},
        {"trim_fraction", r.preprocess.trim_fraction},
        {"smooth_phase_first", r.preprocess.smooth_phase_first}}},
      {"solver",
       {{"folds", r.cross_validation.folds},
        {"grid_size", r.cross_validation.grid_size},
        {"decades", r.cross_validation.decades},
        {"tolerance", r.cross_validation.lasso.tolerance},
        {"max_sweeps", r.cross_validation.lasso.max_sweeps},
        {"penalize_constant", r.penalize_constant},
        {"threshold_ratio", r.threshold_ratio},
        {"threshold_scope",
         r.threshold_scope == ThresholdScope::Network ? "network" : "per-equation"}}}};
}

std::mt19937_64 seeded_rng(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Instance draw_instance(int nodes, std::uint64_t master, std::uint64_t index) {
  auto rng = seeded_rng(master, index);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> area(0.25, 2.25);
  Instance inst;
  inst.frequencies.resize(nodes);
  inst.theta0.resize(nodes);
  inst.z0.resize(nodes);
  for (int i = 0; i < nodes; ++i) inst.frequencies[i] = angle(rng);
  for (int i = 0; i < nodes; ++i) inst.theta0[i] = angle(rng);
  for (int i = 0; i < nodes; ++i) inst.z0[i] = std::polar(std::sqrt(area(rng)), angle(rng));
  inst.noise_seed = rng();
  return inst;
}

MultivariateSeries simulate_instance(const ExperimentConfig& cfg, const Network& net,
                                     const Instance& inst, double t_end) {
  const OscillatorEnsemble ens = ensemble(net, cfg.coupling, inst);
  if (cfg.model == SourceModel::Phase)
    return simulate_phase_model(ens, inst.theta0, t_end, cfg.dt_sample);
  return simulate_stuart_landau(ens, inst.z0, t_end, cfg.dt_sample);
}

const SweepRow* SweepResult::find(double x, Method m) const {
  for (const auto& r : rows)
    if (r.method == m && std::abs(r.x - x) <= 1e-9 * std::max(1.0, std::abs(x))) return &r;
  return nullptr;
}

SweepResult run_time_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Network net = cfg.network.build();
  const double t_max = *std::max_element(cfg.grid.begin(), cfg.grid.end());
  OutcomeTable table = make_table(cfg);
  parallel_for(cfg.seeds, cfg.threads, [&](int s) {
    const Instance inst = draw_instance(net.size(), cfg.master_seed, s);
    // One long run; shorter acquisitions are its prefixes.
    const MultivariateSeries full = simulate_instance(cfg, net, inst, t_max);
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
      const MultivariateSeries series = head(full, grid_samples(cfg.grid[g], cfg.dt_sample));
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        try {
          table[g][m][s] = outcome_of(recover(series, net, cfg.methods[m], recovery_config(cfg)));
        } catch (const std::exception& e) {
          log_failure("time-sweep", s, cfg.grid[g], cfg.methods[m], e);
        }
      }
    }
  });
  return aggregate_table(cfg, table);
}

SweepResult run_size_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  OutcomeTable table = make_table(cfg);
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const Network net = cfg.network.resized(static_cast<int>(cfg.grid[g])).build();
    parallel_for(cfg.seeds, cfg.threads, [&](int s) {
      const Instance inst = draw_instance(net.size(), cfg.master_seed, s);
      const MultivariateSeries series = simulate_instance(cfg, net, inst, cfg.t_n);
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        try {
          table[g][m][s] = outcome_of(recover(series, net, cfg.methods[m], recovery_config(cfg)));
        } catch (const std::exception& e) {
          log_failure("size-sweep", s, cfg.grid[g], cfg.methods[m], e);
        }
      }
    });
  }
  SweepResult out = aggregate_table(cfg, table);
  std::vector<double> sizes = cfg.grid;
  std::sort(sizes.begin(), sizes.end());
  for (double n : sizes) {
    const SweepRow* row = out.find(n, Method::L2);
    if (!row || row->seeds == 0 || row->mean_total > 0.5) break;
    out.l2_accurate_up_to = static_cast<int>(n);
  }
  return out;
}

ThreeNetworksResult run_three_networks(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.network.nodes;
  const std::vector<std::pair<std::string, NetworkSpec>> specs = {
      {"star", NetworkSpec{NetworkKind::Star, n}},
      {"twin-stars", NetworkSpec{NetworkKind::TwinStars, n}.resized(n)},
      {"ring", NetworkSpec{NetworkKind::Ring, n}},
  };
  ThreeNetworksResult out;
  const RecoveryConfig rc = recovery_config(cfg);
  for (const auto& [name, spec] : specs) {
    NetworkComparison cmp;
    cmp.name = name;
    cmp.truth = spec.build();
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
      cmp.seed_index = attempt;
      cmp.attempts = attempt + 1;
      cmp.reports.clear();
      const Instance inst = draw_instance(cmp.truth.size(), cfg.master_seed, attempt);
      const MultivariateSeries series = simulate_instance(cfg, cmp.truth, inst, cfg.t_n);
      bool lasso_exact = true;
      for (Method m : cfg.methods) {
        cmp.reports.push_back(recover(series, cmp.truth, m, rc));
        if (m == Method::Lasso) lasso_exact = cmp.reports.back().score->total() == 0;
      }
      if (lasso_exact) break;
    }
    out.networks.push_back(std::move(cmp));
  }
  return out;
}

SweepResult run_basis_extension(const ExperimentConfig& cfg) {
  cfg.validate();
  const Network net = cfg.network.build();
  OutcomeTable table = make_table(cfg);
  std::vector<double> ratio(cfg.seeds, 0.0);
  std::vector<int> steps;
  for (double k : cfg.grid) steps.push_back(static_cast<int>(k));

  parallel_for(cfg.seeds, cfg.threads, [&](int s) {
    const Instance inst = draw_instance(net.size(), cfg.master_seed, s);
    const RecoveryConfig rc = recovery_config(cfg);
    try {
      const MultivariateSeries series = simulate_instance(cfg, net, inst, cfg.t_n);
      const PhaseData ph = preprocess(series, rc.preprocess);
      const auto [base, target] = build_library(ph, rc.first_harmonics_only);
      for (std::size_t g = 0; g < steps.size(); ++g) {
        LibraryMatrix lib = base;
        RecoveryConfig step_cfg = rc;
        for (int node = 0; node < steps[g]; ++node) {
          lib = extend_basis(lib, ph, node);
          step_cfg.extended_nodes.push_back(node);
        }
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
          try {
            const RecoveryReport r = recover_from_library(lib, target, net, cfg.methods[m], step_cfg);
            table[g][m][s] = outcome_of(r);
            if (cfg.methods[m] == Method::Lasso && r.score->total() == 0 && r.residual > 0.0) {
              double w2 = 0.0;
              for (int j = base.columns(); j < lib.columns(); ++j)
                w2 += r.raw_coefficients.values.row(j).squaredNorm();
              ratio[s] = std::max(ratio[s], std::sqrt(w2) / r.residual);
            }
          } catch (const std::exception& e) {
            log_failure("basis-extension", s, cfg.grid[g], cfg.methods[m], e);
          }
        }
      }
    } catch (const std::exception& e) {
      std::cerr << "basis-extension: seed " << s << ": " << e.what() << '\n';
    }
  });

  SweepResult out = aggregate_table(cfg, table);
  const auto lasso = std::find(cfg.methods.begin(), cfg.methods.end(), Method::Lasso);
  if (lasso != cfg.methods.end()) {
    const auto m = static_cast<std::size_t>(lasso - cfg.methods.begin());
    for (int s = 0; s < cfg.seeds; ++s) {
      bool exact = true;
      for (std::size_t g = 0; g < steps.size(); ++g) {
        const Outcome& o = table[g][m][s];
        exact = exact && o.ok && o.fp == 0 && o.fn == 0;
      }
      out.lasso_exact_everywhere.push_back(exact);
    }
  }
  out.extension_ratio_max = *std::max_element(ratio.begin(), ratio.end());
  return out;
}

SweepResult run_noise_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Network net = cfg.network.build();
  OutcomeTable table = make_table(cfg);
  RecoveryConfig rc = recovery_config(cfg);
  if (!(rc.coupling > 0.0)) throw Error("config", "the noise sweep needs a positive coupling");

  parallel_for(cfg.seeds, cfg.threads, [&](int s) {
    const Instance inst = draw_instance(net.size(), cfg.master_seed, s);
    const OscillatorEnsemble ens = ensemble(net, cfg.coupling, inst);
    for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
      // A separate noise stream per intensity keeps each point reproducible
      // on its own.
      const std::uint64_t noise_seed = seeded_rng(cfg.master_seed, s, 1 + g)();
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        try {
          MultivariateSeries series =
              simulate_noisy_phase(ens, inst.theta0, cfg.grid[g], cfg.dt_euler, cfg.t_n, noise_seed);
          if (cfg.noise_via_hilbert) {
            series.values = series.values.array().cos().matrix();
            series.meaning = ChannelMeaning::RealPartX;
          }
          table[g][m][s] = outcome_of(recover(series, net, cfg.methods[m], rc));
        } catch (const std::exception& e) {
          log_failure("noise-sweep", s, cfg.grid[g], cfg.methods[m], e);
        }
      }
    }
  });
  return aggregate_table(cfg, table);
}

Eigen::MatrixXd instability_family_a() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  a(1, 1) = 1.0;
  return a;
}

Eigen::MatrixXd instability_family_b(double beta) {
  // cos(beta) along a direction of (Im A)^perp plus sin(beta) inside Im A.
  Eigen::VectorXd u_perp = Eigen::VectorXd::Zero(6), u_in = Eigen::VectorXd::Zero(6);
  u_perp(2) = u_perp(3) = 1.0 / std::sqrt(2.0);
  u_in(0) = u_in(1) = 1.0 / std::sqrt(2.0);
  return std::cos(beta) * u_perp + std::sin(beta) * u_in;
}

InstabilityResult run_instability_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd a = instability_family_a();
  const Eigen::VectorXd b = a * Eigen::Vector2d(1.0, 1.0);
  const Eigen::MatrixXd complement = orthocomplement_basis(a);

  // Generic direction: uniform on the unit sphere of (Im A)^perp, redrawn in
  // the measure-zero case of no overlap with the probe direction.
  auto rng = seeded_rng(cfg.master_seed, 0);
  std::normal_distribution<double> normal;
  const Eigen::VectorXd probe = instability_family_b(0.0);
  Eigen::VectorXd z;
  do {
    Eigen::VectorXd g(complement.cols());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
    z = complement * g.normalized();
  } while (std::abs(probe.dot(z)) < 1e-3);
  constexpr double kEpsilon = 0.1;

  InstabilityResult out;
  out.z = z;
  Eigen::JacobiSVD<Eigen::MatrixXd> asvd(a);
  const double sigma_min_a_pinv = 1.0 / asvd.singularValues()[0];

  auto row_for = [&](double degrees, const Eigen::VectorXd& zz) {
    const double beta = degrees * std::numbers::pi / 180.0;
    const Eigen::MatrixXd bm = instability_family_b(beta);
    const PartitionedSolution sol = partitioned_l2(a, bm, b, zz);
    const MSpectrum spec = m_spectrum(a, bm);
    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(bm);
    const double k1 = std::min(sigma_min_a_pinv, bsvd.singularValues().minCoeff());
    const double k2 = bsvd.singularValues().minCoeff() * sol.z_norm;
    InstabilityRow row;
    row.beta_degrees = degrees;
    row.gap = sol.gap;
    row.gap_cos_beta = sol.gap * spec.cos_beta_last;
    row.route_discrepancy = sol.route_discrepancy;
    row.sigma_min_m_inverse = spec.sigma_min_m_inverse;
    row.cos_beta = spec.cos_beta_last;
    row.k_constant = spec.k_constant;
    row.k1k2_bound = k1 * k2 / (spec.k_constant * spec.cos_beta_last);
    row.lemma_holds = spec.lemma_holds;
    row.proven_bound_holds = spec.proven_bound_holds;
    return row;
  };
  out.rows.push_back(row_for(cfg.grid.front(), Eigen::VectorXd::Zero(6)));
  for (double deg : cfg.grid) out.rows.push_back(row_for(deg, kEpsilon * z));
  return out;
}

std::string sweep_csv(const SweepResult& result, const std::string& x_name) {
  std::ostringstream out;
  out << "# netrecon sweep v1\n";
  out << x_name
      << ",method,seeds,failures,columns,mean_fp,std_fp,mean_fn,std_fn,mean_total,std_total,"
         "mean_log_sigma_min,std_log_sigma_min,mean_kappa_s,std_kappa_s,"
         "mean_kappa_minus_links,std_kappa_minus_links\n";
  out << std::setprecision(10);
  for (const auto& r : result.rows) {
    out << r.x << ',' << to_string(r.method) << ',' << r.seeds << ',' << r.failures << ','
        << r.columns << ',' << r.mean_fp << ',' << r.std_fp << ',' << r.mean_fn << ',' << r.std_fn
        << ',' << r.mean_total << ',' << r.std_total << ',' << r.mean_log_sigma_min << ','
        << r.std_log_sigma_min << ',' << r.mean_kappa_s << ',' << r.std_kappa_s << ','
        << r.mean_kappa_minus_links << ',' << r.std_kappa_minus_links << '\n';
  }
  return out.str();
}

Json to_json(const InstabilityResult& result) {
  Json rows = Json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"beta_degrees", r.beta_degrees},
                    {"gap", r.gap},
                    {"gap_cos_beta", r.gap_cos_beta},
                    {"route_discrepancy", r.route_discrepancy},
                    {"sigma_min_m_inverse", r.sigma_min_m_inverse},
                    {"cos_beta", r.cos_beta},
                    {"k_constant", r.k_constant},
                    {"k1k2_bound", r.k1k2_bound},
                    {"lemma_holds", r.lemma_holds},
                    {"proven_bound_holds", r.proven_bound_holds}});
  std::vector<double> z(result.z.data(), result.z.data() + result.z.size());
  return Json{{"dimensions", {{"n", 6}, {"p", 2}, {"q", 1}}}, {"z_direction", z}, {"rows", rows}};
}

namespace {

std::filesystem::path write(const std::filesystem::path& dir, const std::string& name,
                            const std::string& text) {
  const auto path = dir / name;
  write_text_file(path, text);
  return path;
}

void write_sweep_plots(const std::filesystem::path& dir, const std::string& csv,
                       const std::string& x, const std::string& x_label, bool log_x,
                       const std::vector<std::pair<std::string, std::string>>& metrics,
                       std::vector<std::filesystem::path>& written) {
  // Plots are drawn from the CSV text alone.
  const CsvTable table = parse_csv(csv);
  for (const auto& [metric, label] : metrics) {
    LinePlotSpec spec;
    spec.title = label + " vs " + x_label;
    spec.x_column = x;
    spec.y_column = "mean_" + metric;
    spec.std_column = "std_" + metric;
    spec.group_column = "method";
    spec.x_label = x_label;
    spec.y_label = label;
    spec.log_x = log_x;
    written.push_back(write(dir, metric + ".svg", line_chart_svg(table, spec)));
  }
}

Json manifest(const ExperimentConfig& cfg, const std::vector<int>& sizes) {
  Json instances = Json::array();
  for (int n : sizes)
    for (int s = 0; s < cfg.seeds + (cfg.experiment == ExperimentKind::ThreeNetworks ? cfg.retries : 0);
         ++s) {
      const Instance inst = draw_instance(n, cfg.master_seed, s);
      std::vector<double> w(inst.frequencies.data(), inst.frequencies.data() + n);
      std::vector<double> th(inst.theta0.data(), inst.theta0.data() + n);
      instances.push_back({{"nodes", n}, {"seed_index", s}, {"frequencies", w}, {"theta0", th}});
    }
  return Json{{"config", to_json(cfg)}, {"instances", instances}};
}

}  // namespace

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& dir = cfg.output;
  std::vector<std::filesystem::path> written;
  const std::vector<std::pair<std::string, std::string>> scores = {
      {"fp", "#FP"}, {"fn", "#FN"}, {"log_sigma_min", "log10 sigma_min"}};

  switch (cfg.experiment) {
    case ExperimentKind::TimeSweep: {
      const std::string csv = sweep_csv(run_time_sweep(cfg), "t_n");
      written.push_back(write(dir, "time_sweep.csv", csv));
      write_sweep_plots(dir, csv, "t_n", "acquisition time t_n", false, scores, written);
      written.push_back(write(dir, "manifest.json", manifest(cfg, {cfg.network.build().size()}).dump(2)));
      break;
    }
    case ExperimentKind::SizeSweep: {
      const SweepResult res = run_size_sweep(cfg);
      const std::string csv = sweep_csv(res, "nodes");
      written.push_back(write(dir, "size_sweep.csv", csv));
      write_sweep_plots(dir, csv, "nodes", "network size N", false, scores, written);
      written.push_back(write(dir, "summary.json",
                              Json{{"l2_accurate_up_to", res.l2_accurate_up_to}}.dump(2)));
      std::vector<int> sizes;
      for (double n : cfg.grid) sizes.push_back(static_cast<int>(n));
      written.push_back(write(dir, "manifest.json", manifest(cfg, sizes).dump(2)));
      break;
    }
    case ExperimentKind::ThreeNetworks: {
      const ThreeNetworksResult res = run_three_networks(cfg);
      Json summary = Json::array();
      for (const auto& cmp : res.networks) {
        written.push_back(write(dir, cmp.name + "_truth.edges", to_edge_list(cmp.truth)));
        Json entry{{"network", cmp.name}, {"seed_index", cmp.seed_index}, {"attempts", cmp.attempts}};
        for (const auto& r : cmp.reports) {
          const std::string stem = cmp.name + "_" + to_string(r.method);
          written.push_back(write(dir, stem + ".edges", to_edge_list(r.recovered)));
          written.push_back(write(dir, stem + ".svg",
                                  network_svg(cmp.truth, r.recovered,
                                              cmp.name + ", " + to_string(r.method))));
          Json spurious = Json::array(), missing = Json::array();
          for (int t = 0; t < cmp.truth.size(); ++t)
            for (int s = 0; s < cmp.truth.size(); ++s) {
              if (r.recovered.influences(t, s) && !cmp.truth.influences(t, s))
                spurious.push_back({t + 1, s + 1});
              if (!r.recovered.influences(t, s) && cmp.truth.influences(t, s))
                missing.push_back({t + 1, s + 1});
            }
          entry[to_string(r.method)] = {{"false_positives", r.score->false_positives},
                                        {"false_negatives", r.score->false_negatives},
                                        {"spurious", spurious},
                                        {"missing", missing}};
          written.push_back(write(dir, stem + "_report.json", to_json(r).dump(2)));
        }
        summary.push_back(entry);
      }
      written.push_back(write(dir, "three_networks.json", summary.dump(2)));
      written.push_back(write(dir, "manifest.json", manifest(cfg, {cfg.network.nodes}).dump(2)));
      break;
    }
    case ExperimentKind::BasisExtension: {
      const SweepResult res = run_basis_extension(cfg);
      const std::string csv = sweep_csv(res, "k");
      written.push_back(write(dir, "basis_extension.csv", csv));
      write_sweep_plots(dir, csv, "k", "extension step k", false,
                        {{"fp", "#FP"}, {"fn", "#FN"}}, written);
      int exact = 0;
      for (bool e : res.lasso_exact_everywhere) exact += e;
      written.push_back(write(dir, "summary.json",
                              Json{{"lasso_exact_at_every_step", exact},
                                   {"seeds", cfg.seeds},
                                   {"extension_ratio_max", res.extension_ratio_max}}
                                  .dump(2)));
      written.push_back(write(dir, "manifest.json", manifest(cfg, {cfg.network.build().size()}).dump(2)));
      break;
    }
    case ExperimentKind::NoiseSweep: {
      const std::string csv = sweep_csv(run_noise_sweep(cfg), "eta");
      written.push_back(write(dir, "noise_sweep.csv", csv));
      write_sweep_plots(dir, csv, "eta", "noise intensity eta", false,
                        {{"kappa_s", "kappa_s = kappa - N"},
                         {"kappa_minus_links", "kappa - (N - 1)"}},
                        written);
      written.push_back(write(dir, "manifest.json", manifest(cfg, {cfg.network.build().size()}).dump(2)));
      break;
    }
    case ExperimentKind::InstabilityDemo: {
      written.push_back(
          write(dir, "instability.json", to_json(run_instability_demo(cfg)).dump(2)));
      break;
    }
  }
  written.push_back(write(dir, "config.json", to_json(cfg).dump(2)));
  return written;
}

}  // namespace netrecon
