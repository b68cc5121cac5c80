#include "netrecon/signal.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <fftw3.h>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "signal";
constexpr int kMinHilbertLength = 16;
constexpr double kMinAmplitude = 1e-8;

// The FFTW planner is not re-entrant; executing a plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftBuffer {
 public:
  explicit FftBuffer(int n) : n_(n) {
    data_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_1d(n, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(data_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::complex<double>& operator[](int k) { return reinterpret_cast<std::complex<double>*>(data_)[k]; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }
  int size() const { return n_; }

 private:
  int n_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Row vectors evaluating the least-squares polynomial of a window at each
// offset -half..half. Row `half + u` gives the weights for offset u.
Eigen::MatrixXd sg_weights(int window, int order) {
  const int half = window / 2;
  Eigen::MatrixXd design(window, order + 1);
  for (int r = 0; r < window; ++r) {
    const double u = half > 0 ? static_cast<double>(r - half) / half : 0.0;
    double p = 1.0;
    for (int c = 0; c <= order; ++c) {
      design(r, c) = p;
      p *= u;
    }
  }
  const Eigen::MatrixXd pinv =
      design.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(window, window));
  return design * pinv;
}

}  // namespace

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < kMinHilbertLength) throw Error(kStage, "series too short for Hilbert transform");
  for (double v : x)
    if (!std::isfinite(v)) throw Error(kStage, "non-finite sample in series");

  const double mean = mean_of(x);
  FftBuffer buf(n);
  for (int k = 0; k < n; ++k) buf[k] = x[k] - mean;
  buf.forward();
  // Keep DC (and Nyquist for even n) at unit weight, double positive bins,
  // zero negative bins.
  const int positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (int k = 1; k < positive_end; ++k) buf[k] *= 2.0;
  for (int k = (n % 2 == 0) ? n / 2 + 1 : positive_end; k < n; ++k) buf[k] = 0.0;
  buf.backward();

  std::vector<std::complex<double>> s(n);
  const double scale = 1.0 / n;
  for (int k = 0; k < n; ++k) s[k] = {x[k], buf[k].imag() * scale};
  return s;
}

std::vector<double> unwrap(std::span<const double> wrapped) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(wrapped.begin(), wrapped.end());
  double offset = 0.0;
  for (std::size_t k = 1; k < wrapped.size(); ++k) {
    const double jump = wrapped[k] - wrapped[k - 1];
    if (jump > std::numbers::pi)
      offset -= two_pi * std::ceil((jump - std::numbers::pi) / two_pi);
    else if (jump < -std::numbers::pi)
      offset += two_pi * std::ceil((-jump - std::numbers::pi) / two_pi);
    out[k] = wrapped[k] + offset;
  }
  return out;
}

std::vector<double> extract_phase(std::span<const double> x) {
  const auto s = analytic_signal(x);
  const double mean = mean_of(x);
  std::vector<double> angle(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::complex<double> centred = s[k] - mean;
    if (std::abs(centred) < kMinAmplitude)
      throw Error(kStage, "analytic signal amplitude vanishes; phase undefined");
    angle[k] = std::arg(centred);
  }
  return unwrap(angle);
}

std::vector<double> sg_smooth(std::span<const double> y, int window, int order) {
  if (window < 1 || window % 2 == 0) throw Error(kStage, "Savitzky-Golay window must be odd");
  if (order < 0 || order >= window) throw Error(kStage, "Savitzky-Golay order must be < window");
  const int n = static_cast<int>(y.size());
  if (n == 0) return {};
  if (window > n) {
    window = (n % 2 == 0) ? n - 1 : n;
    order = std::min(order, window - 1);
  }
  const int half = window / 2;
  const Eigen::MatrixXd w = sg_weights(window, order);
  std::vector<double> out(n);
  auto apply = [&](int row, int start) {
    double acc = 0.0;
    for (int r = 0; r < window; ++r) acc += w(row, r) * y[start + r];
    return acc;
  };
  for (int k = 0; k < n; ++k) {
    if (k < half)
      out[k] = apply(k, 0);
    else if (k >= n - half)
      out[k] = apply(window - (n - k), n - window);
    else
      out[k] = apply(half, k - half);
  }
  return out;
}

std::vector<double> differentiate(std::span<const double> theta, double dt,
                                  SmoothingOptions smoothing) {
  const int n = static_cast<int>(theta.size());
  if (n < 5) throw Error(kStage, "series too short to differentiate");
  if (!(dt > 0.0)) throw Error(kStage, "dt must be positive");
  std::vector<double> d(n);
  const double inv = 1.0 / (2.0 * dt);
  d[0] = (-3.0 * theta[0] + 4.0 * theta[1] - theta[2]) * inv;
  d[n - 1] = (3.0 * theta[n - 1] - 4.0 * theta[n - 2] + theta[n - 3]) * inv;
  for (int k = 1; k < n - 1; ++k) d[k] = (theta[k + 1] - theta[k - 1]) * inv;
  return sg_smooth(d, smoothing.window, smoothing.order);
}

PhaseData preprocess(const MultivariateSeries& series, const PreprocessOptions& opts) {
  series.validate();
  if (!(opts.trim_fraction >= 0.0 && opts.trim_fraction < 0.5))
    throw Error(kStage, "trim fraction must lie in [0, 0.5)");
  const int n = series.samples();
  const int channels = series.channels();
  const int trim = static_cast<int>(std::floor(opts.trim_fraction * n));
  const int rows = n - 2 * trim;
  if (rows < 5) throw Error(kStage, "too few samples left after trimming");

  PhaseData out;
  out.dt = series.dt;
  out.trim_leading = trim;
  out.trim_trailing = trim;
  out.phases.resize(rows, channels);
  out.derivatives.resize(rows, channels);

  std::vector<double> column(n);
  for (int c = 0; c < channels; ++c) {
    for (int k = 0; k < n; ++k) column[k] = series.values(k, c);
    std::vector<double> phase = series.meaning == ChannelMeaning::Phase
                                    ? column
                                    : extract_phase(column);
    if (opts.smooth_phase_first)
      phase = sg_smooth(phase, opts.smoothing.window, opts.smoothing.order);
    const auto rate = differentiate(phase, series.dt, opts.smoothing);
    for (int k = 0; k < rows; ++k) {
      out.phases(k, c) = phase[trim + k];
      out.derivatives(k, c) = rate[trim + k];
    }
  }
  return out;
}

}  // namespace netrecon
