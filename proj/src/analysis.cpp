#include "netrecon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "netrecon/error.hpp"
#include "netrecon/solvers.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "analysis";
constexpr double kRankTolerance = 1e-10;
constexpr double kMaxConditionM = 1e12;

bool full_column_rank(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return true;
  if (a.cols() > a.rows()) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s[0] > 0.0 && s[s.size() - 1] > kRankTolerance * s[0];
}

Eigen::MatrixXd householder_q(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.rows());
}

}  // namespace

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a) {
  if (!full_column_rank(a)) throw Error(kStage, "matrix is not of full column rank");
  return householder_q(a).leftCols(a.cols());
}

Eigen::MatrixXd orthocomplement_basis(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) throw Error(kStage, "empty matrix");
  if (a.cols() == 0) return Eigen::MatrixXd::Identity(a.rows(), a.rows());
  if (!full_column_rank(a)) throw Error(kStage, "matrix is not of full column rank");
  return householder_q(a).rightCols(a.rows() - a.cols());
}

AngleSpectrum principal_angles(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w) {
  if (u.cols() == 0 || w.cols() == 0) throw Error(kStage, "zero-dimensional subspace");
  if (u.rows() != w.rows()) throw Error(kStage, "subspaces live in different ambient spaces");
  const Eigen::MatrixXd qu = orthonormal_basis(u);
  const Eigen::MatrixXd qw = orthonormal_basis(w);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qu.transpose() * qw);
  AngleSpectrum out;
  out.cosines = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  out.angles = out.cosines.array().acos();
  return out;
}

Eigen::MatrixXd schur_complement_m(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat) {
  if (a.cols() == 0) return b_mat.transpose() * b_mat;
  const Eigen::MatrixXd atb = a.transpose() * b_mat;
  const Eigen::MatrixXd ata = a.transpose() * a;
  return b_mat.transpose() * b_mat - atb.transpose() * ata.ldlt().solve(atb);
}

PartitionedSolution partitioned_l2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat,
                                   const Eigen::VectorXd& b, const Eigen::VectorXd& z) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();
  const Eigen::Index q = b_mat.cols();
  if (p == 0 || q == 0) throw Error(kStage, "both blocks need at least one column");
  if (b_mat.rows() != n || b.size() != n || z.size() != n)
    throw Error(kStage, "block dimensions disagree");
  if (n <= p + q) throw Error(kStage, "need more rows than columns in [A, B]");
  Eigen::MatrixXd c(n, p + q);
  c << a, b_mat;
  if (!full_column_rank(c)) throw Error(kStage, "[A, B] is not of full column rank");

  const Eigen::MatrixXd qa = orthonormal_basis(a);
  const Eigen::VectorXd b_residual = b - qa * (qa.transpose() * b);
  if (b_residual.norm() > 1e-8 * std::max(1.0, b.norm()))
    throw Error(kStage, "b must lie in the image of A");

  PartitionedSolution out;
  const Eigen::VectorXd z_perp = z - qa * (qa.transpose() * z);
  out.z_norm = z_perp.norm();
  const Eigen::VectorXd data = b + z_perp;

  out.x_star = least_squares(a, data);
  const Eigen::VectorXd w = least_squares(c, data);
  out.w_hat1 = w.head(p);
  out.w_hat2 = w.tail(q);

  const Eigen::MatrixXd m = schur_complement_m(a, b_mat);
  Eigen::JacobiSVD<Eigen::MatrixXd> msvd(m);
  const auto& ms = msvd.singularValues();
  if (ms[ms.size() - 1] <= 0.0 || ms[0] / ms[ms.size() - 1] > kMaxConditionM)
    throw Error(kStage, "M is too ill-conditioned to invert");
  const Eigen::MatrixXd ata = a.transpose() * a;
  const auto ata_ldlt = ata.ldlt();
  out.w_hat2_block = m.ldlt().solve(b_mat.transpose() * z_perp);
  out.w_hat1_block = ata_ldlt.solve(a.transpose() * b) -
                     ata_ldlt.solve(a.transpose() * (b_mat * out.w_hat2_block));

  out.route_discrepancy = std::max((out.w_hat1 - out.w_hat1_block).cwiseAbs().maxCoeff(),
                                   (out.w_hat2 - out.w_hat2_block).cwiseAbs().maxCoeff());
  out.gap = (out.x_star - out.w_hat1).norm();
  return out;
}

MSpectrum m_spectrum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b_mat) {
  if (b_mat.cols() == 0) throw Error(kStage, "B needs at least one column");
  if (a.cols() > 0 && a.rows() != b_mat.rows()) throw Error(kStage, "block dimensions disagree");
  Eigen::MatrixXd c(b_mat.rows(), a.cols() + b_mat.cols());
  if (a.cols() > 0)
    c << a, b_mat;
  else
    c = b_mat;
  if (!full_column_rank(c)) throw Error(kStage, "[A, B] is not of full column rank");

  const Eigen::MatrixXd m = schur_complement_m(a, b_mat);
  Eigen::JacobiSVD<Eigen::MatrixXd> msvd(m);
  const auto& ms = msvd.singularValues();
  if (ms[ms.size() - 1] <= 0.0 || ms[0] / ms[ms.size() - 1] > kMaxConditionM)
    throw Error(kStage, "M is singular or too ill-conditioned to invert");

  MSpectrum out;
  out.sigma_min_m_inverse = 1.0 / ms[0];
  const Eigen::MatrixXd complement = a.cols() > 0
                                         ? orthocomplement_basis(a)
                                         : Eigen::MatrixXd::Identity(b_mat.rows(), b_mat.rows());
  const AngleSpectrum angles = principal_angles(complement, b_mat);
  out.cos_beta_first = angles.cosines[0];
  out.cos_beta_last = angles.cosines[angles.size() - 1];
  Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(b_mat);
  out.k_constant = bsvd.singularValues()[0] * bsvd.singularValues()[0];

  constexpr double slack = 1.0 - 1e-9;
  auto bound_holds = [&](double cosine) {
    return out.sigma_min_m_inverse * out.k_constant * cosine * cosine >= slack;
  };
  out.lemma_holds = bound_holds(out.cos_beta_last);
  out.proven_bound_holds = bound_holds(out.cos_beta_first);
  return out;
}

SubspaceStatistic random_subspace_angle_statistic(int n, double xi, int trials,
                                                  std::uint64_t seed) {
  if (!(xi > 0.0 && xi < 0.5)) throw Error(kStage, "xi must lie in (0, 1/2)");
  if (trials < 1) throw Error(kStage, "need at least one trial");
  const int p = static_cast<int>(std::lround(xi * n));
  if (p < 1) throw Error(kStage, "subspace dimension xi * n must be at least 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&]() {
    Eigen::MatrixXd g(n, p);
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
    return g;
  };

  SubspaceStatistic stat;
  stat.dimension = p;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd u = gaussian();
    const Eigen::MatrixXd w = gaussian();
    const double c = principal_angles(u, w).cosines[0];
    stat.mean_cos += c;
    stat.mean_cos_squared += c * c;
  }
  stat.mean_cos /= trials;
  stat.mean_cos_squared /= trials;
  return stat;
}

}  // namespace netrecon
