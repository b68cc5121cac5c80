#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "netrecon/analysis.hpp"
#include "netrecon/error.hpp"
#include "netrecon/experiments.hpp"

using namespace netrecon;
using std::numbers::pi;

namespace {

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

Eigen::VectorXd unit(int n, int i) { return Eigen::VectorXd::Unit(n, i); }

double degrees(double d) { return d * pi / 180.0; }

// For the R^6 family, with u = (e3 + e4)/sqrt2 and z in (Im A)^perp:
// M = cos^2 beta, w2 = (u.z)/cos beta, A^+ B = (0, sin beta / sqrt2), so the
// gap is |u.z| tan(beta) / sqrt2.
double family_gap(double beta, const Eigen::VectorXd& z) {
  const Eigen::VectorXd u = (unit(6, 2) + unit(6, 3)) / std::numbers::sqrt2;
  return std::abs(u.dot(z)) * std::tan(beta) / std::numbers::sqrt2;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("orthogonal complements") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 2);
  const Eigen::MatrixXd q = orthocomplement_basis(a);
  CHECK(q.cols() == 3);
  CHECK(q.topRows(2).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(1);
  const Eigen::MatrixXd r = gaussian(20, 5, rng);
  const Eigen::MatrixXd qr = orthocomplement_basis(r);
  CHECK(qr.cols() == 15);
  CHECK((qr.transpose() * qr - Eigen::MatrixXd::Identity(15, 15)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((r.transpose() * qr).cwiseAbs().maxCoeff() < 1e-10);

  CHECK(orthocomplement_basis(gaussian(4, 4, rng)).cols() == 0);
  Eigen::MatrixXd dup = gaussian(6, 2, rng);
  dup.col(1) = 3.0 * dup.col(0);
  CHECK_THROWS_AS(orthocomplement_basis(dup), Error);
  CHECK_THROWS_AS(orthonormal_basis(dup), Error);
}

TEST_CASE("principal angles") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd u = gaussian(7, 3, rng);
  const AngleSpectrum same = principal_angles(u, u * gaussian(3, 3, rng));
  CHECK(same.size() == 3);
  CHECK(same.angles.cwiseAbs().maxCoeff() < 1e-6);

  const AngleSpectrum ortho = principal_angles(Eigen::MatrixXd::Identity(5, 2), Eigen::MatrixXd::Identity(5, 5).rightCols(3));
  CHECK(ortho.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(ortho.angles[i] == doctest::Approx(pi / 2));

  Eigen::MatrixXd p1(3, 2), p2(3, 2);
  p1 << 1, 0, 0, 1, 0, 0;
  p2 << 1, 0, 0, 1 / std::numbers::sqrt2, 0, 1 / std::numbers::sqrt2;
  const AngleSpectrum planes = principal_angles(p1, p2);
  CHECK(planes.angles[0] == doctest::Approx(0.0));
  CHECK(planes.angles[1] == doctest::Approx(pi / 4));
  CHECK(planes.cosines[0] >= planes.cosines[1]);

  const Eigen::MatrixXd w = gaussian(9, 4, rng), v = gaussian(9, 2, rng);
  const AngleSpectrum ab = principal_angles(w, v), ba = principal_angles(v, w);
  CHECK((ab.angles - ba.angles).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(principal_angles(Eigen::MatrixXd(5, 0), v), Error);
}

TEST_CASE("partitioned least squares: both routes agree") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd a = gaussian(15, 3, rng), bm = gaussian(15, 4, rng);
    const Eigen::VectorXd b = a * gaussian(3, 1, rng);
    const Eigen::VectorXd z = gaussian(15, 1, rng);
    const auto sol = partitioned_l2(a, bm, b, z);
    CHECK(sol.route_discrepancy < 1e-8);
    CHECK(sol.gap == doctest::Approx((sol.x_star - sol.w_hat1).norm()));
    // Oracle: normal equations of [A, B] on the projected data.
    Eigen::MatrixXd c(15, 7);
    c << a, bm;
    const Eigen::MatrixXd qa = orthonormal_basis(a);
    const Eigen::VectorXd zp = z - qa * (qa.transpose() * z);
    const Eigen::VectorXd w = (c.transpose() * c).ldlt().solve(c.transpose() * (b + zp));
    CHECK((w.head(3) - sol.w_hat1).norm() < 1e-8);
    CHECK(sol.z_norm == doctest::Approx(zp.norm()));
    CHECK((schur_complement_m(a, bm) - bm.transpose() * (bm - qa * (qa.transpose() * bm))).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("partitioned least squares without perturbation") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd a = gaussian(10, 2, rng), bm = gaussian(10, 2, rng);
  const Eigen::VectorXd b = a * Eigen::Vector2d(1.0, -2.0);
  const auto sol = partitioned_l2(a, bm, b, Eigen::VectorXd::Zero(10));
  CHECK((sol.x_star - Eigen::Vector2d(1.0, -2.0)).norm() < 1e-10);
  CHECK(sol.w_hat2.norm() < 1e-10);
  CHECK(sol.gap < 1e-10);

  // z orthogonal to Im B as well: B^T z = 0 leaves w2 at zero.
  Eigen::MatrixXd ab(10, 4);
  ab << a, bm;
  const Eigen::VectorXd z = orthocomplement_basis(ab).col(0);
  const auto orth = partitioned_l2(a, bm, b, z);
  CHECK(orth.w_hat2.norm() < 1e-10);
  CHECK(orth.gap < 1e-10);

  CHECK_THROWS_AS(partitioned_l2(a, bm, gaussian(10, 1, rng), z), Error);
  CHECK_THROWS_AS(partitioned_l2(a, a, b, z), Error);
  CHECK_THROWS_AS(partitioned_l2(gaussian(4, 2, rng), gaussian(4, 2, rng), Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)), Error);
}

TEST_CASE("instability family follows its closed form") {
  const Eigen::MatrixXd a = instability_family_a();
  const Eigen::VectorXd b = a * Eigen::Vector2d(1.0, 1.0);
  const Eigen::VectorXd z = ((unit(6, 2) + unit(6, 3)) / std::numbers::sqrt2 + unit(6, 4)).normalized();
  double previous = 0.0, low = 1e300, high = 0.0;
  for (double deg : {80.0, 85.0, 89.0, 89.9}) {
    const double beta = degrees(deg);
    const Eigen::MatrixXd bm = instability_family_b(beta);
    const auto sol = partitioned_l2(a, bm, b, z);
    CHECK(sol.route_discrepancy < 1e-8);
    CHECK(sol.gap == doctest::Approx(family_gap(beta, z)).epsilon(1e-8));
    CHECK(sol.gap > previous);
    previous = sol.gap;
    low = std::min(low, sol.gap * std::cos(beta));
    high = std::max(high, sol.gap * std::cos(beta));

    const MSpectrum spec = m_spectrum(a, bm);
    CHECK(spec.cos_beta_last == doctest::Approx(std::cos(beta)));
    CHECK(spec.sigma_min_m_inverse == doctest::Approx(1.0 / (std::cos(beta) * std::cos(beta))).epsilon(1e-8));
    CHECK(spec.k_constant == doctest::Approx(1.0));
    CHECK(spec.lemma_holds);
    CHECK(spec.proven_bound_holds);
  }
  CHECK(low > 0.0);
  CHECK(high < 1.0);
}

TEST_CASE("the gap exceeds any bound close enough to a right angle") {
  const Eigen::MatrixXd a = instability_family_a();
  const Eigen::VectorXd b = a * Eigen::Vector2d(0.5, 2.0);
  const Eigen::VectorXd z = ((unit(6, 2) + unit(6, 3)) / std::numbers::sqrt2 + 0.5 * unit(6, 5)).normalized();
  auto gap = [&](double beta) { return partitioned_l2(a, instability_family_b(beta), b, z).gap; };
  for (double bound : {10.0, 1e3}) {
    double lo = degrees(45.0), hi = degrees(90.0) - 1e-7;
    REQUIRE(gap(lo) < bound);
    REQUIRE(gap(hi) > bound);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) > bound ? hi : lo) = mid;
    }
    CHECK(gap(hi) > bound);
    CHECK(hi < degrees(90.0));
  }
}

TEST_CASE("M spectrum edge cases") {
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(5, 2);
  const MSpectrum s = m_spectrum(Eigen::MatrixXd(5, 0), b);
  CHECK(s.sigma_min_m_inverse == doctest::Approx(1.0));
  std::mt19937_64 rng(5);
  Eigen::MatrixXd dup = gaussian(8, 2, rng);
  dup.col(1) = dup.col(0);
  CHECK_THROWS_AS(m_spectrum(gaussian(8, 2, rng), dup), Error);
  // Random instances satisfy the proven form of the bound.
  for (int t = 0; t < 20; ++t) CHECK(m_spectrum(gaussian(12, 3, rng), gaussian(12, 2, rng)).proven_bound_holds);
}

TEST_CASE("random lines: mean cos^2 of the angle is 1/n") {
  // For independent uniform directions in R^n, E[(u.w)^2] = 1/n.
  const auto stat = random_subspace_angle_statistic(50, 0.02, 4000, 17);
  CHECK(stat.dimension == 1);
  CHECK(stat.mean_cos_squared == doctest::Approx(1.0 / 50).epsilon(0.1));
}

TEST_CASE("random subspace statistic behaviour") {
  const auto a = random_subspace_angle_statistic(100, 0.1, 30, 3);
  const auto b = random_subspace_angle_statistic(100, 0.1, 30, 3);
  CHECK(a.mean_cos == b.mean_cos);
  const auto small = random_subspace_angle_statistic(400, 0.01, 30, 3);
  CHECK(small.mean_cos < a.mean_cos);
  CHECK(small.mean_cos < 0.4);
  CHECK_THROWS_AS(random_subspace_angle_statistic(100, 0.6, 10, 1), Error);
  CHECK_THROWS_AS(random_subspace_angle_statistic(10, 0.01, 10, 1), Error);
}

}
