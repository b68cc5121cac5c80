#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "netrecon/io.hpp"
#include "netrecon/recovery.hpp"
#include "netrecon/topology.hpp"

namespace netrecon {

enum class ExperimentKind {
  TimeSweep,
  SizeSweep,
  ThreeNetworks,
  BasisExtension,
  NoiseSweep,
  InstabilityDemo
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

/// Which dynamics generate the measured series.
///   Phase        -> phase model, phases observed directly
///   StuartLandau -> full oscillators, Re z observed, Hilbert phases
enum class SourceModel { Phase, StuartLandau };

enum class NetworkKind { Star, TwinStars, Ring };

struct NetworkSpec {
  NetworkKind kind = NetworkKind::Star;
  int nodes = 10;  // star and ring
  int leaves_a = 4;
  int leaves_b = 4;
  HubLink link = HubLink::AToB;

  Network build() const;
  /// Same shape with a different node count (size sweep).
  NetworkSpec resized(int n) const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::TimeSweep;
  NetworkSpec network;
  double coupling = 0.1;
  SourceModel model = SourceModel::Phase;
  double dt_sample = 0.1;
  double t_n = 100.0;
  /// Swept values: t_n (time sweep), N (size sweep), eta (noise sweep),
  /// extension steps k (basis extension), beta in degrees (instability demo).
  std::vector<double> grid;
  int seeds = 20;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{Method::L2, Method::Lasso};
  RecoveryConfig recovery;
  double dt_euler = 0.1;
  /// Noise sweep: recover from Hilbert phases of cos(phi) rather than phi.
  bool noise_via_hilbert = true;
  /// Three-networks: further seeds tried when LASSO is not exact.
  int retries = 5;
  int threads = 1;
  std::filesystem::path output;

  void validate() const;
  /// Default grid and settings for each experiment.
  static ExperimentConfig defaults(ExperimentKind kind);
};

/// Missing keys keep the defaults of the named experiment.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);

/// Independent generator for (master seed, seed index, stream).
std::mt19937_64 seeded_rng(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

/// Random natural frequencies and initial conditions of one run.
struct Instance {
  Eigen::VectorXd frequencies;  // U[0, 2 pi]
  Eigen::VectorXd theta0;       // U[0, 2 pi)
  Eigen::VectorXcd z0;          // uniform on the annulus 0.5 <= |z| <= 1.5
  std::uint64_t noise_seed = 0;
};

Instance draw_instance(int nodes, std::uint64_t master, std::uint64_t index);

/// Simulated measurement for one instance, according to cfg.model.
MultivariateSeries simulate_instance(const ExperimentConfig& cfg, const Network& net,
                                     const Instance& inst, double t_end);

/// One aggregate line of a sweep: mean and std over the successful seeds.
struct SweepRow {
  double x = 0.0;
  Method method = Method::Lasso;
  int seeds = 0;
  int failures = 0;
  int columns = 0;
  double mean_fp = 0.0, std_fp = 0.0;
  double mean_fn = 0.0, std_fn = 0.0;
  double mean_total = 0.0, std_total = 0.0;
  double mean_log_sigma_min = 0.0, std_log_sigma_min = 0.0;
  double mean_kappa_s = 0.0, std_kappa_s = 0.0;
  double mean_kappa_minus_links = 0.0, std_kappa_minus_links = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Per seed, whether LASSO was exact at every grid point (basis extension).
  std::vector<bool> lasso_exact_everywhere;
  /// Largest ||w2|| / residual seen on exact LASSO runs (basis extension).
  double extension_ratio_max = 0.0;
  /// Largest N with L2 mean (#FP + #FN) <= 0.5 at it and every smaller N.
  int l2_accurate_up_to = 0;

  const SweepRow* find(double x, Method m) const;
};

struct NetworkComparison {
  std::string name;
  Network truth{1};
  int seed_index = 0;
  int attempts = 0;
  std::vector<RecoveryReport> reports;  // one per method
};

struct ThreeNetworksResult {
  std::vector<NetworkComparison> networks;
};

struct InstabilityRow {
  double beta_degrees = 0.0;
  double gap = 0.0;
  double gap_cos_beta = 0.0;
  double route_discrepancy = 0.0;
  double sigma_min_m_inverse = 0.0;
  double cos_beta = 0.0;
  double k_constant = 0.0;
  double k1k2_bound = 0.0;  // K1 K2 / (K cos beta)
  bool lemma_holds = false;
  bool proven_bound_holds = false;
};

struct InstabilityResult {
  std::vector<InstabilityRow> rows;
  Eigen::VectorXd z;  // unit direction in (Im A)^perp
};

/// The R^6 family used to realize the instability: A = [e1, e1 + e2], one
/// probe column B(beta) at principal angle beta from (Im A)^perp.
Eigen::MatrixXd instability_family_a();
Eigen::MatrixXd instability_family_b(double beta_radians);

SweepResult run_time_sweep(const ExperimentConfig& cfg);
SweepResult run_size_sweep(const ExperimentConfig& cfg);
ThreeNetworksResult run_three_networks(const ExperimentConfig& cfg);
SweepResult run_basis_extension(const ExperimentConfig& cfg);
SweepResult run_noise_sweep(const ExperimentConfig& cfg);
InstabilityResult run_instability_demo(const ExperimentConfig& cfg);

/// Runs cfg.experiment and writes its CSV, SVG and JSON files under
/// cfg.output. Returns the written paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

std::string sweep_csv(const SweepResult& result, const std::string& x_name);
Json to_json(const InstabilityResult& result);

}  // namespace netrecon
