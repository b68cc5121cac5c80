#include "netrecon/dynamics.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "dynamics";

struct Grid {
  int samples = 0;
  int substeps = 0;  // internal steps per sample
  double h = 0.0;
};

Grid make_grid(double t_end, double dt_sample, double step) {
  if (!(t_end > 0.0)) throw Error(kStage, "t_end must be positive");
  if (!(dt_sample > 0.0)) throw Error(kStage, "dt_sample must be positive");
  if (!(step > 0.0)) throw Error(kStage, "integrator step must be positive");
  Grid g;
  g.samples = grid_samples(t_end, dt_sample);
  g.substeps = std::max(1, static_cast<int>(std::ceil(dt_sample / step - 1e-9)));
  g.h = dt_sample / g.substeps;
  return g;
}

template <class State>
void require_finite(const State& s, double t) {
  if (!s.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state during integration at t=" << t;
    throw Error(kStage, msg.str());
  }
}

template <class State, class Rhs>
void advance(State& x, double h, Stepper stepper, const Rhs& rhs) {
  if (stepper == Stepper::Euler) {
    x += h * rhs(x);
    return;
  }
  const State k1 = rhs(x);
  const State k2 = rhs(State(x + 0.5 * h * k1));
  const State k3 = rhs(State(x + 0.5 * h * k2));
  const State k4 = rhs(State(x + h * k3));
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Incoming edge list per node, so the coupling sum skips absent links.
std::vector<std::vector<int>> incoming(const Network& net) {
  std::vector<std::vector<int>> in(net.size());
  for (const auto& [target, source] : net.edges()) in[target].push_back(source);
  return in;
}

}  // namespace

int grid_samples(double t_end, double dt_sample) {
  return static_cast<int>(std::llround(t_end / dt_sample)) + 1;
}

void OscillatorEnsemble::validate() const {
  if (!(coupling >= 0.0)) throw Error(kStage, "coupling strength must be non-negative");
  if (frequencies.size() != network.size())
    throw Error(kStage, "frequency vector length must equal node count");
  if (!frequencies.allFinite()) throw Error(kStage, "frequencies must be finite");
}

void MultivariateSeries::validate() const {
  if (!(dt > 0.0)) throw Error(kStage, "series dt must be positive");
  if (values.rows() < 2) throw Error(kStage, "series needs at least two samples");
  if (!values.allFinite()) throw Error(kStage, "series contains non-finite samples");
}

Eigen::MatrixXcd simulate_stuart_landau_state(const OscillatorEnsemble& ens,
                                              const Eigen::VectorXcd& z0, double t_end,
                                              double dt_sample, IntegratorOptions opts) {
  ens.validate();
  const int n = ens.network.size();
  if (z0.size() != n) throw Error(kStage, "initial state length must equal node count");
  if (!z0.allFinite()) throw Error(kStage, "initial state must be finite");
  const Grid g = make_grid(t_end, dt_sample, opts.step);
  const auto in = incoming(ens.network);
  const std::complex<double> j(0.0, 1.0);
  const double alpha = ens.coupling;

  auto rhs = [&](const Eigen::VectorXcd& z) {
    Eigen::VectorXcd dz(n);
    for (int i = 0; i < n; ++i) {
      std::complex<double> c = 0.0;
      for (int k : in[i]) c += z[k] - z[i];
      dz[i] = (1.0 + j * ens.frequencies[i]) * z[i] - std::norm(z[i]) * z[i] + alpha * c;
    }
    return dz;
  };

  Eigen::MatrixXcd out(g.samples, n);
  Eigen::VectorXcd z = z0;
  out.row(0) = z.transpose();
  for (int s = 1; s < g.samples; ++s) {
    for (int k = 0; k < g.substeps; ++k) advance(z, g.h, opts.stepper, rhs);
    require_finite(z, s * dt_sample);
    out.row(s) = z.transpose();
  }
  return out;
}

MultivariateSeries simulate_stuart_landau(const OscillatorEnsemble& ens,
                                          const Eigen::VectorXcd& z0, double t_end,
                                          double dt_sample, IntegratorOptions opts) {
  MultivariateSeries series;
  series.dt = dt_sample;
  series.values = simulate_stuart_landau_state(ens, z0, t_end, dt_sample, opts).real();
  series.meaning = ChannelMeaning::RealPartX;
  return series;
}

Eigen::VectorXd phase_velocity(const OscillatorEnsemble& ens, const Eigen::VectorXd& theta) {
  const int n = ens.network.size();
  Eigen::VectorXd v = ens.frequencies;
  const auto& adj = ens.network.adjacency();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (adj(i, k) != 0) v[i] += ens.coupling * std::sin(theta[k] - theta[i]);
  return v;
}

MultivariateSeries simulate_phase_model(const OscillatorEnsemble& ens,
                                        const Eigen::VectorXd& theta0, double t_end,
                                        double dt_sample, IntegratorOptions opts) {
  ens.validate();
  const int n = ens.network.size();
  if (theta0.size() != n) throw Error(kStage, "initial phase length must equal node count");
  if (!theta0.allFinite()) throw Error(kStage, "initial phases must be finite");
  const Grid g = make_grid(t_end, dt_sample, opts.step);
  const auto in = incoming(ens.network);
  const double alpha = ens.coupling;

  auto rhs = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd v = ens.frequencies;
    for (int i = 0; i < n; ++i)
      for (int k : in[i]) v[i] += alpha * std::sin(th[k] - th[i]);
    return v;
  };

  MultivariateSeries series;
  series.dt = dt_sample;
  series.meaning = ChannelMeaning::Phase;
  series.values.resize(g.samples, n);
  Eigen::VectorXd th = theta0;
  series.values.row(0) = th.transpose();
  for (int s = 1; s < g.samples; ++s) {
    for (int k = 0; k < g.substeps; ++k) advance(th, g.h, opts.stepper, rhs);
    require_finite(th, s * dt_sample);
    series.values.row(s) = th.transpose();
  }
  return series;
}

MultivariateSeries simulate_noisy_phase(const OscillatorEnsemble& ens,
                                        const Eigen::VectorXd& theta0, double noise_intensity,
                                        double dt_euler, double t_end, std::uint64_t seed) {
  if (!(noise_intensity >= 0.0)) throw Error(kStage, "noise intensity must be non-negative");
  if (!(dt_euler > 0.0)) throw Error(kStage, "Euler step must be positive");
  ens.validate();
  const int n = ens.network.size();
  if (theta0.size() != n) throw Error(kStage, "initial phase length must equal node count");
  const int samples = grid_samples(t_end, dt_euler);
  if (!(t_end > 0.0)) throw Error(kStage, "t_end must be positive");
  const auto in = incoming(ens.network);
  const double alpha = ens.coupling;
  const double amplitude = std::sqrt(2.0 * noise_intensity * dt_euler);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  MultivariateSeries series;
  series.dt = dt_euler;
  series.meaning = ChannelMeaning::Phase;
  series.values.resize(samples, n);
  Eigen::VectorXd phi = theta0;
  Eigen::VectorXd drift(n);
  series.values.row(0) = phi.transpose();
  for (int s = 1; s < samples; ++s) {
    drift = ens.frequencies;
    for (int i = 0; i < n; ++i)
      for (int k : in[i]) drift[i] += alpha * std::sin(phi[k] - phi[i]);
    if (noise_intensity > 0.0) {
      for (int i = 0; i < n; ++i) {
        const double xi = normal(rng);
        const double zeta = normal(rng);
        const double kick = amplitude * (std::cos(phi[i]) * xi + std::sin(phi[i]) * zeta);
        phi[i] += dt_euler * drift[i] + kick;
      }
    } else {
      phi += dt_euler * drift;
    }
    require_finite(phi, s * dt_euler);
    series.values.row(s) = phi.transpose();
  }
  return series;
}

}  // namespace netrecon
