#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "netrecon/error.hpp"
#include "netrecon/signal.hpp"

using namespace netrecon;
using std::numbers::pi;

namespace {

std::vector<double> sampled(int n, double dt, auto f) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = f(k * dt);
  return v;
}

double wrap(double x) { return std::remainder(x, 2 * pi); }

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("analytic signal of a whole-period cosine is the exponential") {
  // 8 full periods in 400 samples: every bin is exact.
  const int n = 400;
  const double omega = 2 * pi * 8 / (n * 0.1);
  const auto x = sampled(n, 0.1, [&](double t) { return std::cos(omega * t + 0.3); });
  const auto s = analytic_signal(x);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    worst = std::max(worst, std::abs(s[k].real() - x[k]));
    worst = std::max(worst, std::abs(s[k].imag() - std::sin(omega * 0.1 * k + 0.3)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("odd length and offset signals") {
  const int n = 301;
  const double omega = 2 * pi * 5 / n;
  const auto x = sampled(n, 1.0, [&](double t) { return 2.0 + std::sin(omega * t); });
  const auto s = analytic_signal(x);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(s[k].imag() + std::cos(omega * k)));
  CHECK(worst < 1e-10);

  // The offset is removed before taking the angle.
  const auto phase = extract_phase(x);
  for (int k = 1; k < n; ++k) CHECK(phase[k] - phase[k - 1] == doctest::Approx(omega).epsilon(1e-9));
}

TEST_CASE("extracted phase is the unwrapped argument") {
  const int n = 1000;
  const double omega = 2 * pi * 37 / (n * 0.1);
  const auto x = sampled(n, 0.1, [&](double t) { return std::cos(omega * t - 1.0); });
  const auto phase = extract_phase(x);
  for (int k = 0; k < n; ++k) {
    CHECK(std::abs(wrap(phase[k] - (omega * 0.1 * k - 1.0))) < 1e-9);
    if (k > 0) CHECK(std::abs(phase[k] - phase[k - 1]) < pi);
  }
  CHECK(phase.back() - phase.front() == doctest::Approx(omega * 0.1 * (n - 1)).epsilon(1e-9));
}

TEST_CASE("unwrap inverts wrapping for slow increments") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  std::vector<double> truth(2000), wrapped(2000);
  truth[0] = 0.4;
  for (std::size_t k = 1; k < truth.size(); ++k) truth[k] = truth[k - 1] + step(rng);
  for (std::size_t k = 0; k < truth.size(); ++k) wrapped[k] = wrap(truth[k]);
  const auto u = unwrap(wrapped);
  const double offset = u[0] - truth[0];
  CHECK(std::abs(wrap(offset)) < 1e-12);
  for (std::size_t k = 0; k < truth.size(); ++k) CHECK(u[k] - truth[k] == doctest::Approx(offset));
}

TEST_CASE("unwrap handles multi-turn jumps and leaves small steps alone") {
  const std::vector<double> w{0.0, 3.0, -3.0, 3.0 + 4 * pi};
  const auto u = unwrap(w);
  CHECK(u[1] == doctest::Approx(3.0));
  CHECK(u[2] == doctest::Approx(-3.0 + 2 * pi));
  CHECK(std::abs(u[3] - u[2]) <= pi);
  CHECK(unwrap(std::vector<double>{}).empty());
}

TEST_CASE("Savitzky-Golay reproduces cubics everywhere") {
  const auto y = sampled(60, 0.5, [](double t) { return 1.0 - 2.0 * t + 0.3 * t * t - 0.05 * t * t * t; });
  const auto s = sg_smooth(y, 11, 3);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(s[k] == doctest::Approx(y[k]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("Savitzky-Golay interior weights match the classical table") {
  // Quadratic, 5 points: (-3, 12, 17, 12, -3) / 35.
  std::vector<double> impulse(21, 0.0);
  impulse[10] = 1.0;
  const auto s = sg_smooth(impulse, 5, 2);
  const double expected[] = {-3.0, 12.0, 17.0, 12.0, -3.0};
  for (int d = -2; d <= 2; ++d) CHECK(s[10 + d] == doctest::Approx(expected[2 - d] / 35.0));
  CHECK(s[5] == doctest::Approx(0.0));
  // Cubic, 7 points: (-2, 3, 6, 7, 6, 3, -2) / 21.
  const auto c = sg_smooth(impulse, 7, 3);
  const double cubic[] = {-2.0, 3.0, 6.0, 7.0, 6.0, 3.0, -2.0};
  for (int d = -3; d <= 3; ++d) CHECK(c[10 + d] == doctest::Approx(cubic[3 - d] / 21.0));
}

TEST_CASE("Savitzky-Golay arguments are validated") {
  const std::vector<double> y(50, 1.0);
  CHECK_THROWS_AS(sg_smooth(y, 10, 3), Error);
  CHECK_THROWS_AS(sg_smooth(y, 5, 5), Error);
  // Windows longer than the series shrink to fit.
  const auto s = sg_smooth(std::vector<double>{1, 2, 3, 4, 5, 6}, 11, 3);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[5] == doctest::Approx(6.0));
}

TEST_CASE("differentiation is exact on quadratics") {
  const auto th = sampled(200, 0.1, [](double t) { return 0.5 + 3.0 * t - 0.2 * t * t; });
  const auto d = differentiate(th, 0.1);
  for (std::size_t k = 0; k < th.size(); ++k) CHECK(d[k] == doctest::Approx(3.0 - 0.4 * 0.1 * k).epsilon(1e-9).scale(1.0));
}

TEST_CASE("differentiation of a sinusoid is second order accurate") {
  const double omega = 1.7;
  auto worst_error = [&](double dt) {
    const int n = static_cast<int>(std::lround(20.0 / dt)) + 1;
    const auto th = sampled(n, dt, [&](double t) { return std::sin(omega * t); });
    const auto d = differentiate(th, dt, SmoothingOptions{1, 0});
    double worst = 0.0;
    for (int k = 1; k + 1 < n; ++k) worst = std::max(worst, std::abs(d[k] - omega * std::cos(omega * k * dt)));
    return worst;
  };
  const double ratio = worst_error(0.02) / worst_error(0.01);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  CHECK(worst_error(0.01) < omega * omega * omega * 1e-4 / 6.0 * 1.01);
}

TEST_CASE("preprocess trims five percent from each end") {
  MultivariateSeries s;
  s.dt = 0.1;
  s.meaning = ChannelMeaning::Phase;
  s.values.resize(1001, 2);
  for (int k = 0; k < 1001; ++k) {
    s.values(k, 0) = 1.5 * 0.1 * k;
    s.values(k, 1) = 0.2 - 0.7 * 0.1 * k;
  }
  const PhaseData ph = preprocess(s);
  CHECK(ph.samples() == 901);
  CHECK(ph.trim_leading == 50);
  CHECK(ph.trim_trailing == 50);
  CHECK(ph.phases(0, 0) == doctest::Approx(1.5 * 5.0));
  for (int k = 0; k < ph.samples(); ++k) {
    CHECK(ph.derivatives(k, 0) == doctest::Approx(1.5));
    CHECK(ph.derivatives(k, 1) == doctest::Approx(-0.7));
  }
}

TEST_CASE("preprocess recovers the frequency of a measured oscillation") {
  MultivariateSeries s;
  s.dt = 0.1;
  s.values.resize(1001, 1);
  const double omega = 2 * pi * 40 / 100.0;
  for (int k = 0; k < 1001; ++k) s.values(k, 0) = std::cos(omega * 0.1 * k + 0.9);
  const PhaseData ph = preprocess(s);
  REQUIRE(ph.samples() == 901);
  // End effects of the transform stay inside the trimmed margins.
  CHECK((ph.derivatives.array() - omega).abs().maxCoeff() < 1e-2);
}

TEST_CASE("signal errors") {
  CHECK_THROWS_AS(analytic_signal(std::vector<double>{1.0, 2.0}), Error);
  std::vector<double> bad(50, 1.0);
  bad[7] = std::nan("");
  CHECK_THROWS_AS(analytic_signal(bad), Error);
  CHECK_THROWS_AS(extract_phase(std::vector<double>(64, 3.0)), Error);
  CHECK_THROWS_AS(differentiate(std::vector<double>{1, 2, 3}, 0.1), Error);
  CHECK_THROWS_AS(differentiate(std::vector<double>(10, 1.0), 0.0), Error);
  MultivariateSeries s;
  s.dt = 0.1;
  s.meaning = ChannelMeaning::Phase;
  s.values = Eigen::MatrixXd::Zero(20, 1);
  PreprocessOptions o;
  o.trim_fraction = 0.5;
  CHECK_THROWS_AS(preprocess(s, o), Error);
}

}
