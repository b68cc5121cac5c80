#include <doctest.h>

#include <cmath>
#include <numbers>

#include "netrecon/dynamics.hpp"
#include "netrecon/error.hpp"

using namespace netrecon;

namespace {

OscillatorEnsemble single(double omega) {
  return OscillatorEnsemble{Network(1), 0.0, Eigen::VectorXd::Constant(1, omega)};
}

// Two mutually coupled identical oscillators: the phase difference obeys
// d(delta)/dt = -2 alpha sin(delta), so tan(delta/2) decays like exp(-2 alpha t).
OscillatorEnsemble pair(double alpha) {
  Network net(2);
  net.set_edge(0, 1);
  net.set_edge(1, 0);
  return OscillatorEnsemble{net, alpha, Eigen::Vector2d(1.3, 1.3)};
}

double pair_difference(double alpha, double delta0, double t) {
  return 2.0 * std::atan(std::tan(delta0 / 2.0) * std::exp(-2.0 * alpha * t));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("single oscillator on the limit cycle is a pure cosine") {
  const auto s = simulate_stuart_landau(single(2.0), Eigen::VectorXcd::Constant(1, 1.0), 20.0, 0.1);
  REQUIRE(s.samples() == 201);
  double worst = 0.0;
  for (int k = 0; k < s.samples(); ++k)
    worst = std::max(worst, std::abs(s.values(k, 0) - std::cos(2.0 * k * 0.1)));
  // RK4 phase drift on a rotation: (w h)^5 / 120 per step, 2000 steps.
  const double drift = std::pow(2.0 * 0.01, 5) / 120.0 * 2000;
  CHECK(worst < 2.0 * drift);
  CHECK(worst > 0.1 * drift);
}

TEST_CASE("radial growth matches the closed form") {
  const double r0 = 0.5;
  const auto z = simulate_stuart_landau_state(single(2.0), Eigen::VectorXcd::Constant(1, r0), 10.0, 0.1);
  double worst = 0.0, previous = 0.0;
  bool monotone = true;
  for (int k = 0; k < z.rows(); ++k) {
    const double t = 0.1 * k;
    const double exact = 1.0 / std::sqrt(1.0 + (1.0 / (r0 * r0) - 1.0) * std::exp(-2.0 * t));
    const double r = std::abs(z(k, 0));
    worst = std::max(worst, std::abs(r - exact));
    if (k > 0 && r <= previous) monotone = false;
    previous = r;
  }
  CHECK(worst < 1e-8);
  CHECK(monotone);
}

TEST_CASE("uncoupled amplitudes settle on the unit circle") {
  for (double r0 : {0.11, 0.5, 1.0, 1.5, 1.99}) {
    const auto z = simulate_stuart_landau_state(single(3.0), Eigen::VectorXcd::Constant(1, r0), 20.0, 0.1);
    CHECK(std::abs(std::abs(z(z.rows() - 1, 0)) - 1.0) < 1e-6);
  }
}

TEST_CASE("star series length follows the sampling rate") {
  OscillatorEnsemble ens{make_star(10), 0.1, Eigen::VectorXd::LinSpaced(10, 0.5, 6.0)};
  const auto s = simulate_stuart_landau(ens, Eigen::VectorXcd::Constant(10, {0.8, 0.3}), 40.0, 0.1);
  CHECK(s.samples() == 401);
  CHECK(s.channels() == 10);
  CHECK(s.meaning == ChannelMeaning::RealPartX);
}

TEST_CASE("decoupled phases grow linearly") {
  OscillatorEnsemble ens{make_ring(4), 0.0, Eigen::Vector4d(0.3, 1.0, 2.5, 6.0)};
  const Eigen::Vector4d theta0(0.1, 2.0, -1.0, 3.0);
  const auto s = simulate_phase_model(ens, theta0, 50.0, 0.1);
  CHECK(s.meaning == ChannelMeaning::Phase);
  double worst = 0.0;
  for (int k = 0; k < s.samples(); ++k)
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(s.values(k, i) - (theta0[i] + ens.frequencies[i] * 0.1 * k)));
  CHECK(worst < 1e-10);
}

TEST_CASE("mutually coupled pair synchronizes as in closed form") {
  const double alpha = 0.1;
  const auto s = simulate_phase_model(pair(alpha), Eigen::Vector2d(0.0, std::numbers::pi / 2), 30.0, 0.1);
  double worst = 0.0;
  for (int k = 0; k < s.samples(); ++k) {
    const double delta = s.values(k, 1) - s.values(k, 0);
    worst = std::max(worst, std::abs(delta - pair_difference(alpha, std::numbers::pi / 2, 0.1 * k)));
  }
  CHECK(worst < 1e-9);
  const double last = s.values(s.samples() - 1, 1) - s.values(s.samples() - 1, 0);
  CHECK(last < std::numbers::pi / 2 * 0.01);
}

TEST_CASE("phase series satisfies its own equation") {
  Eigen::VectorXd w(10);
  for (int i = 0; i < 10; ++i) w[i] = 0.4 + 0.6 * i;
  const OscillatorEnsemble ens{make_star(10), 0.1, w};
  const double dt = 0.01;
  const auto s = simulate_phase_model(ens, Eigen::VectorXd::LinSpaced(10, 0.0, 5.0), 10.0, dt);
  double worst = 0.0;
  for (int k = 1; k + 1 < s.samples(); ++k) {
    const Eigen::VectorXd diff = (s.values.row(k + 1) - s.values.row(k - 1)).transpose() / (2 * dt);
    const Eigen::VectorXd rhs = phase_velocity(ens, s.values.row(k).transpose());
    worst = std::max(worst, (diff - rhs).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("fourth order convergence") {
  const double alpha = 1.0, delta0 = 2.5, t_end = 4.0;
  auto error_for = [&](double step) {
    IntegratorOptions opts;
    opts.step = step;
    const auto s = simulate_phase_model(pair(alpha), Eigen::Vector2d(0.0, delta0), t_end, 0.4, opts);
    const double delta = s.values(s.samples() - 1, 1) - s.values(s.samples() - 1, 0);
    return std::abs(delta - pair_difference(alpha, delta0, t_end));
  };
  const double ratio = error_for(0.2) / error_for(0.1);
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("noise-free Euler-Maruyama reproduces Euler exactly") {
  Eigen::VectorXd w(5);
  w << 0.5, 1.5, 2.0, 3.1, 4.4;
  const OscillatorEnsemble ens{make_star(5), 0.1, w};
  const Eigen::VectorXd theta0 = Eigen::VectorXd::LinSpaced(5, 0.2, 4.0);
  const auto noisy = simulate_noisy_phase(ens, theta0, 0.0, 0.1, 30.0, 99);
  IntegratorOptions euler;
  euler.step = 0.1;
  euler.stepper = Stepper::Euler;
  const auto plain = simulate_phase_model(ens, theta0, 30.0, 0.1, euler);
  REQUIRE(noisy.samples() == plain.samples());
  CHECK((noisy.values.array() == plain.values.array()).all());
}

TEST_CASE("phase diffusion variance grows like 2 eta t") {
  const double eta = 0.05, t_end = 10.0, omega = 1.0;
  const int paths = 600;
  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < paths; ++p) {
    const auto s = simulate_noisy_phase(single(omega), Eigen::VectorXd::Zero(1), eta, 0.1, t_end, 1000 + p);
    const double d = s.values(s.samples() - 1, 0) - omega * t_end;
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / paths;
  const double var = sum_sq / paths - mean * mean;
  CHECK(var == doctest::Approx(2.0 * eta * t_end).epsilon(0.2));
}

TEST_CASE("noisy runs are deterministic per seed") {
  const OscillatorEnsemble ens{make_star(4), 0.1, Eigen::Vector4d(1, 2, 3, 4)};
  const auto a = simulate_noisy_phase(ens, Eigen::Vector4d::Zero(), 0.01, 0.1, 20.0, 5);
  const auto b = simulate_noisy_phase(ens, Eigen::Vector4d::Zero(), 0.01, 0.1, 20.0, 5);
  const auto c = simulate_noisy_phase(ens, Eigen::Vector4d::Zero(), 0.01, 0.1, 20.0, 6);
  CHECK((a.values.array() == b.values.array()).all());
  CHECK_FALSE((a.values.array() == c.values.array()).all());
  CHECK_THROWS_AS(simulate_noisy_phase(ens, Eigen::Vector4d::Zero(), -0.1, 0.1, 20.0, 5), Error);
}

TEST_CASE("invalid inputs and blow-up are reported") {
  OscillatorEnsemble ens{make_star(3), 0.1, Eigen::Vector2d(1, 2)};
  CHECK_THROWS_AS(simulate_phase_model(ens, Eigen::Vector3d::Zero(), 1.0, 0.1), Error);
  ens.frequencies = Eigen::Vector3d(1, 2, 3);
  ens.coupling = -1.0;
  CHECK_THROWS_AS(simulate_phase_model(ens, Eigen::Vector3d::Zero(), 1.0, 0.1), Error);
  ens.coupling = 0.1;
  CHECK_THROWS_AS(simulate_phase_model(ens, Eigen::Vector3d::Zero(), -1.0, 0.1), Error);
  try {
    simulate_stuart_landau(single(1.0), Eigen::VectorXcd::Constant(1, 1e200), 1.0, 0.1);
    FAIL("expected a blow-up error");
  } catch (const Error& e) {
    CHECK(e.stage() == "dynamics");
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("grid sample count") {
  CHECK(grid_samples(100.0, 0.1) == 1001);
  CHECK(grid_samples(0.3, 0.1) == 4);
}

}
