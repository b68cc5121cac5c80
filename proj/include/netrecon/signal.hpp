#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netrecon/dynamics.hpp"

namespace netrecon {

/// x + jH(x), computed spectrally. H is applied to the mean-removed signal;
/// the real part reproduces the input.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

/// Unwrapped argument of the (mean-removed) analytic signal.
std::vector<double> extract_phase(std::span<const double> x);

/// Adds multiples of 2*pi so successive samples never jump by more than pi.
std::vector<double> unwrap(std::span<const double> wrapped);

/// Savitzky-Golay smoothing. Edge samples are evaluated from the polynomial
/// fitted to the first/last full window, so any polynomial of degree
/// <= order is reproduced everywhere.
std::vector<double> sg_smooth(std::span<const double> y, int window, int order);

struct SmoothingOptions {
  int window = 11;
  int order = 3;
};

/// Second-order finite differences followed by Savitzky-Golay smoothing.
std::vector<double> differentiate(std::span<const double> theta, double dt,
                                  SmoothingOptions smoothing = {});

struct PreprocessOptions {
  SmoothingOptions smoothing;
  double trim_fraction = 0.05;      // removed from each end
  bool smooth_phase_first = false;  // also smooth the phases before differencing
};

/// Surrogate phases and their smoothed time derivatives on a common grid.
struct PhaseData {
  double dt = 0.0;
  Eigen::MatrixXd phases;
  Eigen::MatrixXd derivatives;
  int trim_leading = 0;
  int trim_trailing = 0;

  int samples() const { return static_cast<int>(phases.rows()); }
  int channels() const { return static_cast<int>(phases.cols()); }
};

PhaseData preprocess(const MultivariateSeries& series, const PreprocessOptions& opts = {});

}  // namespace netrecon
