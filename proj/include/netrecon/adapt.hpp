#pragma once

#include <vector>

#include <Eigen/Core>

#include "netrecon/basis.hpp"

namespace netrecon {

/// Library orthonormalized against the empirical trajectory measure.
/// Invariant: original = ortho.values * r_factor, r_factor upper triangular
/// with positive diagonal.
struct AdaptedLibrary {
  LibraryMatrix ortho;
  Eigen::MatrixXd r_factor;
};

/// Theta^T Theta: with the 1/sqrt(n) row factor, entry (i, j) is the time
/// average of psi_i * psi_j along the trajectory.
Eigen::MatrixXd empirical_gram(const LibraryMatrix& lib);

/// Gram-Schmidt (with one reorthogonalization pass) in column order. Columns
/// whose residual falls below 1e-10 of their original norm are rejected as
/// dependent.
AdaptedLibrary adapt_basis(const LibraryMatrix& lib);

/// Largest |<v_i, v_j>| over distinct normalized columns; 0 for a single column.
double coherence(const LibraryMatrix& lib);
double coherence(const Eigen::MatrixXd& columns);

/// Certified bound delta_s <= eta * (s - 1).
double rip_bound(double eta, int s);

struct SupportCheck {
  bool preserved = false;    // R x supported within the leading block of x
  std::vector<int> support;  // 0-based nonzero positions of R x
};

/// Applies the triangular factor to a coefficient vector and reports whether
/// the support stays within the first s entries, where s is one past the
/// last nonzero of x.
SupportCheck sparsity_preserved(const Eigen::MatrixXd& r_factor, const Eigen::VectorXd& x);

}  // namespace netrecon
