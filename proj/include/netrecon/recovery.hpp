#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "netrecon/basis.hpp"
#include "netrecon/dynamics.hpp"
#include "netrecon/signal.hpp"
#include "netrecon/solvers.hpp"
#include "netrecon/topology.hpp"

namespace netrecon {

enum class Method { L2, Lasso };

std::string to_string(Method m);
Method parse_method(const std::string& name);

/// Coefficient matrix W of Theta W = V: one column per node equation, one
/// row per library descriptor, in the unnormalized basis.
struct CoefficientMatrix {
  Eigen::MatrixXd values;
  std::vector<ColumnDescriptor> descriptors;

  int nodes() const { return static_cast<int>(values.cols()); }
  /// sqrt(c^2 + d^2) of the sin/cos pair for (a, b) in equation `node`.
  double pair_magnitude(int node, int a, int b) const;
};

/// Where the reference "largest coupling" is taken: over the whole network or
/// separately within each node equation.
enum class ThresholdScope { Network, PerEquation };

/// Zeroes every coupling pair whose magnitude sqrt(c^2 + d^2) is below ratio
/// times the largest pair magnitude in scope. Ties are kept. Pairs within
/// 1e-9 of the largest entry of W count as zero. Non-coupling rows are left
/// alone.
CoefficientMatrix threshold_coefficients(const CoefficientMatrix& w, double ratio = 0.1,
                                         ThresholdScope scope = ThresholdScope::Network);

struct AssembledNetwork {
  Network network;
  /// Surviving pairs (k < m) in an equation that is neither k's nor m's,
  /// claimed as edge m <- k: (equation, k, m), 0-based.
  std::vector<std::array<int, 3>> foreign_claims;
};

/// In equation i a surviving pair {i, k} gives edge i <- k.
AssembledNetwork coefficients_to_network(const CoefficientMatrix& w);

struct CouplingMetrics {
  Eigen::VectorXd kappa_i;  // per equation, summed incoming pair magnitudes
  double kappa = 0.0;       // sum(kappa_i) / alpha
  double kappa_s = 0.0;     // kappa - N
  double kappa_s_links = 0.0;  // kappa - (N - 1)
};

/// For a star this is the hub-pair magnitude per leaf; for other topologies
/// every coupling pair of an equation contributes.
CouplingMetrics coupling_metrics(const CoefficientMatrix& w, double alpha);

struct RecoveryConfig {
  PreprocessOptions preprocess;
  bool first_harmonics_only = true;
  /// Nodes (0-based) whose higher harmonics are appended to the library.
  std::vector<int> extended_nodes;
  double threshold_ratio = 0.1;
  ThresholdScope threshold_scope = ThresholdScope::Network;
  CrossValidationOptions cross_validation;
  /// When false the constant column is left out of the L1 penalty, like an
  /// intercept.
  bool penalize_constant = false;
  /// Used for the kappa metrics; they are skipped when zero.
  double coupling = 0.0;
};

struct RecoveryReport {
  Method method = Method::Lasso;
  Network recovered{1};
  CoefficientMatrix raw_coefficients;  // before thresholding
  CoefficientMatrix coefficients;      // after thresholding
  std::vector<std::array<int, 3>> foreign_claims;
  std::optional<RecoveryScore> score;
  std::optional<CouplingMetrics> metrics;
  std::vector<double> chosen_lambda;  // per equation (LASSO only)
  double sigma_min = 0.0;
  double coherence = 0.0;
  int library_rows = 0;
  int library_columns = 0;
  double residual = 0.0;  // ||Theta W - V||_F with the thresholded W
  RecoveryConfig config;
};

/// Solves every node equation on an already built library.
RecoveryReport recover_from_library(const LibraryMatrix& library, const TargetMatrix& target,
                                    const std::optional<Network>& truth, Method method,
                                    const RecoveryConfig& config);

/// preprocess -> library -> normalize -> per-node solve -> threshold -> network.
RecoveryReport recover(const MultivariateSeries& series, const std::optional<Network>& truth,
                       Method method, const RecoveryConfig& config = {});

}  // namespace netrecon
