#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "netrecon/topology.hpp"

namespace netrecon {

/// Coupled oscillators: a network, a coupling strength and one natural
/// frequency (rad/s) per node.
struct OscillatorEnsemble {
  Network network;
  double coupling = 0.0;
  Eigen::VectorXd frequencies;

  void validate() const;
};

enum class ChannelMeaning { RealPartX, Phase };

/// Uniformly sampled multichannel record; rows are time samples.
struct MultivariateSeries {
  double dt = 0.0;
  Eigen::MatrixXd values;
  ChannelMeaning meaning = ChannelMeaning::RealPartX;

  int samples() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
  void validate() const;
};

enum class Stepper { RungeKutta4, Euler };

struct IntegratorOptions {
  double step = 0.01;  // internal step (s); shrunk so it divides dt_sample
  Stepper stepper = Stepper::RungeKutta4;
};

/// z_i' = (1 + j w_i) z_i - |z_i|^2 z_i + alpha * sum_k C_ik (z_k - z_i).
/// Returns Re z_i on the grid t = 0, dt_sample, ..., t_end.
MultivariateSeries simulate_stuart_landau(const OscillatorEnsemble& ens,
                                          const Eigen::VectorXcd& z0, double t_end,
                                          double dt_sample, IntegratorOptions opts = {});

/// Same integration, returning the full complex state per sample (rows).
Eigen::MatrixXcd simulate_stuart_landau_state(const OscillatorEnsemble& ens,
                                              const Eigen::VectorXcd& z0, double t_end,
                                              double dt_sample, IntegratorOptions opts = {});

/// theta_i' = w_i + alpha * sum_k C_ik sin(theta_k - theta_i); unwrapped phases.
MultivariateSeries simulate_phase_model(const OscillatorEnsemble& ens,
                                        const Eigen::VectorXd& theta0, double t_end,
                                        double dt_sample, IntegratorOptions opts = {});

/// Right-hand side of the phase model at one state.
Eigen::VectorXd phase_velocity(const OscillatorEnsemble& ens, const Eigen::VectorXd& theta);

/// Euler-Maruyama for the phase model driven by
/// sqrt(2 eta) (cos(phi_i) xi_i + sin(phi_i) zeta_i), with independent unit
/// white noises per node. Samples every Euler step.
MultivariateSeries simulate_noisy_phase(const OscillatorEnsemble& ens,
                                        const Eigen::VectorXd& theta0, double noise_intensity,
                                        double dt_euler, double t_end, std::uint64_t seed);

/// Number of samples on the grid 0, dt, ..., t_end.
int grid_samples(double t_end, double dt_sample);

}  // namespace netrecon
