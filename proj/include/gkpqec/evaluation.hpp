#pragma once

#include <random>
#include <vector>

#include "gkpqec/code.hpp"
#include "gkpqec/policy.hpp"
#include "gkpqec/sbs.hpp"
#include "gkpqec/types.hpp"

namespace gkpqec {

// y(t) = amplitude * exp(-t / tau). tau is +inf when the data does not decay
// (non-negative log-slope), with amplitude then the plain mean.
struct ExponentialFit {
  double amplitude = 0.0;
  double tau = 0.0;
  double rms_residual = 0.0;
};

ExponentialFit fit_exponential_decay(const std::vector<double>& times,
                                     const std::vector<double>& values);

// y(k) = p_inf + (p0 - p_inf) * exp(-gamma * k).
struct SaturationFit {
  double p_inf = 0.0;
  double p0 = 0.0;
  double gamma = 0.0;
  double rms_residual = 0.0;
};

SaturationFit fit_saturation(const std::vector<double>& cycles,
                             const std::vector<double>& values);

// Pauli-twirled channel figures from per-axis lifetimes at time t (same units).
// Infinite lifetimes contribute a factor of 1.
double average_channel_fidelity(double t, double tx, double ty, double tz);
double entanglement_fidelity_from_average(double f_avg);
double aggregate_lifetime(double tx, double ty, double tz);

// 1 - exp(-kappa * tau): photon-loss probability over one cycle.
double dimensionless_decay_rate(double kappa, double tau);

struct LifetimeOptions {
  int cycles = 100;  // full cycles per trajectory
  int batch = 32;
  unsigned seed = 2024;
  char axis = 'Z';
  // The protocol applies a deterministic logical Y flip every full cycle;
  // with this set, X and Z expectations are sign-corrected before fitting.
  bool frame_corrected = true;
};

struct LifetimeResult {
  std::vector<double> times;  // full-cycle indices 1..cycles
  std::vector<double> mean;   // batch-mean logical expectation at each time
  ExponentialFit fit;         // tau in cycle units
};

// Monte Carlo estimate of the logical lifetime: runs a batch of sampled
// trajectories from rho0, watching Re tr[(pauli (x) I) rho] each half-cycle,
// and fits the full-cycle record to a decaying exponential.
LifetimeResult logical_lifetime(SbsEngine& eng, const FeedbackPolicy& policy,
                                const MatrixXcd& rho0,
                                const MatrixXcd& pauli_cavity,
                                const LifetimeOptions& opt);

// Applies a cavity displacement of the given amplitude to a joint state.
MatrixXcd inject_displacement(const MatrixXcd& rho, Complex amplitude,
                              const HilbertConfig& hc);

}  // namespace gkpqec
