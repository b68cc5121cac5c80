#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace netrecon {

/// Principal angles in ascending order with their cosines (descending).
struct AngleSpectrum {
  Eigen::VectorXd angles;
  Eigen::VectorXd cosines;

  int size() const { return static_cast<int>(angles.size()); }
};

/// Orthonormal basis of (Im A)^perp. A must have full column rank; when A is
/// square the result has zero columns.
Eigen::MatrixXd orthocomplement_basis(const Eigen::MatrixXd& a);

/// Orthonormal basis of Im A (thin QR). Throws on rank deficiency.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a);

/// Cosines are the singular values of Q_U^T Q_W; min(p, q) angles.
AngleSpectrum principal_angles(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w);

/// Least squares on A alone versus on [A, B] for the data b + z.
struct PartitionedSolution {
  Eigen::VectorXd x_star;         // A^+ (b + z)
  Eigen::VectorXd w_hat1;         // [A,B]^+ (b + z), A block
  Eigen::VectorXd w_hat2;         // [A,B]^+ (b + z), B block
  Eigen::VectorXd w_hat1_block;   // A^+ b - A^+ B M^{-1} B^T z
  Eigen::VectorXd w_hat2_block;   // M^{-1} B^T z
  double route_discrepancy = 0.0; // max difference between the two routes
  double gap = 0.0;               // ||x_star - w_hat1||
  double z_norm = 0.0;            // norm of z after projection onto (Im A)^perp
};

/// z is projected onto (Im A)^perp first. Requires [A, B] of full column
/// rank with more rows than columns; throws when M = B^T (I - A A^+) B has
/// condition number above 1e12.
PartitionedSolution partitioned_l2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat,
                                   const Eigen::VectorXd& b, const Eigen::VectorXd& z);

/// M = B^T B - B^T A (A^T A)^{-1} A^T B.
Eigen::MatrixXd schur_complement_m(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat);

struct MSpectrum {
  double sigma_min_m_inverse = 0.0;
  double cos_beta_first = 0.0;  // smallest angle between (Im A)^perp and Im B
  double cos_beta_last = 0.0;   // largest angle
  double k_constant = 0.0;      // sigma_max(R_B)^2
  /// sigma_min(M^{-1}) >= 1 / (K cos^2 beta_r), the bound in the form the
  /// instability lemma states it.
  bool lemma_holds = false;
  /// sigma_min(M^{-1}) >= 1 / (K cos^2 beta_1), the bound its proof establishes.
  bool proven_bound_holds = false;
};

MSpectrum m_spectrum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat);

/// Mean of cos(beta_1) over `trials` pairs of independent uniformly random
/// p = round(xi n) dimensional subspaces of R^n. Also reports the mean of
/// cos^2(beta_1).
struct SubspaceStatistic {
  double mean_cos = 0.0;
  double mean_cos_squared = 0.0;
  int dimension = 0;
};

SubspaceStatistic random_subspace_angle_statistic(int n, double xi, int trials,
                                                  std::uint64_t seed);

}  // namespace netrecon
