#include <doctest.h>

#include <cmath>
#include <random>

#include "netrecon/basis.hpp"
#include "netrecon/dynamics.hpp"
#include "netrecon/error.hpp"

using namespace netrecon;

namespace {

PhaseData random_phases(int rows, int nodes, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  PhaseData ph;
  ph.dt = 0.1;
  ph.phases.resize(rows, nodes);
  ph.derivatives.resize(rows, nodes);
  for (int k = 0; k < rows; ++k)
    for (int c = 0; c < nodes; ++c) {
      ph.phases(k, c) = u(rng);
      ph.derivatives(k, c) = u(rng);
    }
  return ph;
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("column count follows the construction rule") {
  for (int n = 1; n <= 12; ++n) {
    const auto [lib, target] = build_library(random_phases(40, n, n));
    CHECK(lib.columns() == 1 + 2 * n + n * (n - 1));
    CHECK(target.values.cols() == n);
    CHECK(target.values.rows() == lib.rows());
  }
  CHECK(build_library(random_phases(40, 2, 0)).first.columns() == 7);
  CHECK(build_library(random_phases(40, 10, 0)).first.columns() == 111);
  CHECK(build_library(random_phases(40, 3, 0), false).first.columns() == 13 + 3 * 18);
}

TEST_CASE("rows carry the 1/sqrt(n) factor") {
  const PhaseData ph = random_phases(900, 3, 1);
  const auto [lib, target] = build_library(ph);
  const double f = 1.0 / 30.0;
  CHECK((lib.values.col(0).array() - f).abs().maxCoeff() < 1e-15);
  CHECK((target.values - f * ph.derivatives).cwiseAbs().maxCoeff() < 1e-15);
  // sin^2 + cos^2 = 1 makes the two columns of one argument sum to unit norm.
  const int s = lib.find(ColumnDescriptor::pair_diff(0, 2, Trig::Sin));
  const int c = lib.find(ColumnDescriptor::pair_diff(0, 2, Trig::Cos));
  CHECK(lib.values.col(s).squaredNorm() + lib.values.col(c).squaredNorm() == doctest::Approx(1.0));
  CHECK((lib.column_scales.array() == 1.0).all());
}

TEST_CASE("every column is reproducible from its descriptor") {
  const PhaseData ph = random_phases(50, 4, 2);
  const auto [lib, target] = build_library(ph);
  const double f = 1.0 / std::sqrt(50.0);
  for (int j = 0; j < lib.columns(); ++j) {
    const auto& d = lib.descriptors[j];
    Eigen::VectorXd expected(50);
    for (int k = 0; k < 50; ++k) {
      double arg = 0.0;
      if (d.kind == ColumnDescriptor::Kind::NodeHarmonic) arg = d.harmonic * ph.phases(k, d.first);
      if (d.kind == ColumnDescriptor::Kind::PairDiff) arg = ph.phases(k, d.first) - ph.phases(k, d.second);
      expected[k] = d.kind == ColumnDescriptor::Kind::Constant ? 1.0
                    : d.trig == Trig::Sin                      ? std::sin(arg)
                                                               : std::cos(arg);
    }
    CHECK((lib.values.col(j) - f * expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("descriptors are unique and labelled 1-based") {
  const auto lib = build_library(random_phases(20, 5, 3)).first;
  for (int i = 0; i < lib.columns(); ++i)
    for (int j = i + 1; j < lib.columns(); ++j) CHECK(lib.descriptors[i] != lib.descriptors[j]);
  CHECK(lib.descriptors[0].label() == "1");
  CHECK(ColumnDescriptor::node_harmonic(2, 1, Trig::Cos).label() == "cos(th3)");
  CHECK(ColumnDescriptor::node_harmonic(0, 4, Trig::Sin).label() == "sin(4th1)");
  CHECK(ColumnDescriptor::pair_diff(0, 3, Trig::Sin).label() == "sin(th1-th4)");
  CHECK_THROWS_AS(ColumnDescriptor::pair_diff(3, 1, Trig::Sin), Error);
  CHECK_THROWS_AS(ColumnDescriptor::node_harmonic(0, 0, Trig::Sin), Error);
}

TEST_CASE("true phase-model coefficients reproduce the velocities") {
  const int n = 10;
  const double alpha = 0.1;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.3 + 0.55 * i;
  const OscillatorEnsemble ens{make_star(n), alpha, w};
  const auto series = simulate_phase_model(ens, Eigen::VectorXd::LinSpaced(n, 0.0, 6.0), 100.0, 0.1);
  const PhaseData ph = preprocess(series);
  const auto [lib, target] = build_library(ph);

  // theta_i' = w_i + alpha sum_k C_ik sin(th_k - th_i); sin(th_k - th_i) is
  // +sin(th_k - th_i) when k < i and -sin(th_i - th_k) otherwise.
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(lib.columns(), n);
  for (int i = 0; i < n; ++i) {
    coef(0, i) = w[i];
    for (int k = 0; k < n; ++k) {
      if (!ens.network.influences(i, k)) continue;
      const double sign = k < i ? 1.0 : -1.0;
      coef(lib.find(ColumnDescriptor::pair_diff(std::min(i, k), std::max(i, k), Trig::Sin)), i) = sign * alpha;
    }
  }
  const double rel = (lib.values * coef - target.values).norm() / target.values.norm();
  CHECK(rel < 1e-2);
}

TEST_CASE("seed selection partitions the library") {
  const auto lib = build_library(random_phases(30, 10, 4)).first;
  std::vector<ColumnDescriptor> seed;
  for (int i = 1; i < 10; ++i)
    for (const auto& d : pair_columns(i, 0)) seed.push_back(d);
  const auto [a, b] = select_columns(lib, seed);
  CHECK(a.columns() == 18);
  CHECK(b.columns() == 93);
  for (int j = 0; j < a.columns(); ++j) CHECK(a.descriptors[j] == seed[j]);
  // Reassembling by descriptor recovers the original matrix exactly.
  for (int j = 0; j < lib.columns(); ++j) {
    const int ia = a.find(lib.descriptors[j]);
    const int ib = b.find(lib.descriptors[j]);
    REQUIRE((ia >= 0) != (ib >= 0));
    const Eigen::VectorXd col = ia >= 0 ? a.values.col(ia) : b.values.col(ib);
    CHECK(col == lib.values.col(j));
  }

  const auto [none, all] = select_columns(lib, {});
  CHECK(none.columns() == 0);
  CHECK(all.values == lib.values);
  const auto [everything, rest] = select_columns(lib, lib.descriptors);
  CHECK(rest.columns() == 0);
  CHECK_THROWS_AS(select_columns(lib, {ColumnDescriptor::node_harmonic(0, 5, Trig::Sin)}), Error);
}

TEST_CASE("basis extension appends sixteen columns per node") {
  const PhaseData ph = random_phases(60, 10, 5);
  const auto lib = build_library(ph).first;
  auto ext = extend_basis(lib, ph, 3);
  CHECK(ext.columns() == 127);
  CHECK(ext.values.leftCols(111) == lib.values);
  CHECK(ext.find(ColumnDescriptor::node_harmonic(3, 2, Trig::Sin)) == 111);
  CHECK(ext.find(ColumnDescriptor::node_harmonic(3, 9, Trig::Cos)) == 126);
  const Eigen::VectorXd expected = ph.phases.col(3).unaryExpr([](double t) { return std::cos(5 * t); }) / std::sqrt(60.0);
  CHECK((ext.values.col(ext.find(ColumnDescriptor::node_harmonic(3, 5, Trig::Cos))) - expected).norm() < 1e-14);
  CHECK_THROWS_AS(extend_basis(ext, ph, 3), Error);
  CHECK_THROWS_AS(extend_basis(lib, ph, 10), Error);

  LibraryMatrix grown = lib;
  for (int node = 0; node < 10; ++node) grown = extend_basis(grown, ph, node);
  CHECK(grown.columns() == 111 + 160);
  CHECK(extend_basis(lib, ph, 0, 10).columns() == 111 + 18);
}

TEST_CASE("column normalization round trip") {
  const auto lib = build_library(random_phases(200, 4, 6)).first;
  const auto norm = column_normalize(lib);
  for (int j = 0; j < norm.columns(); ++j) CHECK(std::abs(norm.values.col(j).norm() - 1.0) < 1e-12);
  CHECK(norm.column_scales[0] == doctest::Approx(1.0));
  const auto back = denormalize(norm);
  CHECK((back.values - lib.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.column_scales.array() == 1.0).all());
  const auto twice = column_normalize(norm);
  CHECK((twice.values - norm.values).cwiseAbs().maxCoeff() < 1e-12);

  LibraryMatrix zero = lib;
  zero.values.col(2).setZero();
  CHECK_THROWS_AS(column_normalize(zero), Error);
}

TEST_CASE("empty phase data is rejected") {
  PhaseData ph;
  CHECK_THROWS_AS(build_library(ph), Error);
}

}
