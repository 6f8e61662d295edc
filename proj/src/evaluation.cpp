#include "gkpqec/evaluation.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "gkpqec/fock.hpp"
#include "gkpqec/gates.hpp"

namespace gkpqec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sse_exponential(const std::vector<double>& t, const std::vector<double>& y,
                       double a, double tau) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = a * std::exp(-t[i] / tau) - y[i];
    s += r * r;
  }
  return s;
}

double sse_saturation(const std::vector<double>& k, const std::vector<double>& y,
                      double p_inf, double p0, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double r = p_inf + (p0 - p_inf) * std::exp(-gamma * k[i]) - y[i];
    s += r * r;
  }
  return s;
}

}  // namespace

ExponentialFit fit_exponential_decay(const std::vector<double>& times,
                                     const std::vector<double>& values) {
  if (times.size() != values.size())
    throw ConfigError("decay fit needs matching time and value lists");
  const std::size_t n = times.size();
  if (n < 2) throw ConfigError("decay fit needs at least two samples");

  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  ExponentialFit fit;
  if (vmax == 0.0) {
    fit.amplitude = 0.0;
    fit.tau = kInf;
    return fit;
  }

  // log-linear start from the clearly positive samples
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] <= vmax * 1e-3) continue;
    const double ly = std::log(values[i]);
    st += times[i];
    sy += ly;
    stt += times[i] * times[i];
    sty += times[i] * ly;
    ++m;
  }
  double a = 0.0, tau = kInf;
  bool decaying = false;
  if (m >= 2) {
    const double denom = double(m) * stt - st * st;
    if (denom > 0.0) {
      const double slope = (double(m) * sty - st * sy) / denom;
      const double intercept = (sy - slope * st) / double(m);
      if (slope < 0.0) {
        decaying = true;
        tau = -1.0 / slope;
        a = std::exp(intercept);
      }
    }
  }
  if (!decaying) {
    // flat or rising data: report the mean level with an infinite lifetime
    double mean = 0.0;
    for (double v : values) mean += v / double(n);
    fit.amplitude = mean;
    fit.tau = kInf;
    fit.rms_residual = std::sqrt(sse_exponential(times, values, mean, kInf) / double(n));
    return fit;
  }

  // damped Gauss-Newton refinement over every sample
  double sse = sse_exponential(times, values, a, tau);
  for (int it = 0; it < 200; ++it) {
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-times[i] / tau);
      const double r = a * e - values[i];
      const double ja = e;
      const double jt = a * e * times[i] / (tau * tau);
      jtj00 += ja * ja;
      jtj01 += ja * jt;
      jtj11 += jt * jt;
      jtr0 += ja * r;
      jtr1 += jt * r;
    }
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (!(std::abs(det) > 1e-300)) break;
    double da = -(jtj11 * jtr0 - jtj01 * jtr1) / det;
    double dt = -(jtj00 * jtr1 - jtj01 * jtr0) / det;
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      const double a2 = a + step * da;
      const double t2 = tau + step * dt;
      if (t2 > 0.0) {
        const double s2 = sse_exponential(times, values, a2, t2);
        if (s2 <= sse) {
          const bool converged =
              std::abs(step * da) <= 1e-12 * std::max(1.0, std::abs(a)) &&
              std::abs(step * dt) <= 1e-12 * std::max(1.0, tau);
          a = a2;
          tau = t2;
          sse = s2;
          accepted = true;
          if (converged) it = 200;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  fit.amplitude = a;
  fit.tau = tau;
  fit.rms_residual = std::sqrt(sse / double(n));
  return fit;
}

SaturationFit fit_saturation(const std::vector<double>& cycles,
                             const std::vector<double>& values) {
  if (cycles.size() != values.size())
    throw ConfigError("saturation fit needs matching cycle and value lists");
  const std::size_t n = cycles.size();
  if (n < 3) throw ConfigError("saturation fit needs at least three samples");

  double p_inf = values.back();
  double p0 = values.front();
  SaturationFit fit;
  if (std::abs(p0 - p_inf) < 1e-14) {
    double mean = 0.0;
    for (double v : values) mean += v / double(n);
    fit.p_inf = fit.p0 = mean;
    fit.gamma = 0.0;
    fit.rms_residual = std::sqrt(sse_saturation(cycles, values, mean, mean, 0.0) / double(n));
    return fit;
  }

  // log-linear start on the normalized approach to the plateau
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (values[i] - p_inf) / (p0 - p_inf);
    if (u <= 1e-6) continue;
    const double lu = std::log(u);
    sk += cycles[i];
    sy += lu;
    skk += cycles[i] * cycles[i];
    sky += cycles[i] * lu;
    ++m;
  }
  double gamma = 0.1;
  if (m >= 2) {
    const double denom = double(m) * skk - sk * sk;
    if (denom > 0.0) {
      const double slope = (double(m) * sky - sk * sy) / denom;
      if (slope < 0.0) gamma = -slope;
    }
  }

  double sse = sse_saturation(cycles, values, p_inf, p0, gamma);
  for (int it = 0; it < 300; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-gamma * cycles[i]);
      const double r = p_inf + (p0 - p_inf) * e - values[i];
      Eigen::Vector3d j(1.0 - e, e, -(p0 - p_inf) * cycles[i] * e);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    // tiny ridge keeps the solve stable when the plateau is barely resolved
    jtj += 1e-12 * Eigen::Matrix3d::Identity();
    const Eigen::Vector3d delta = -jtj.ldlt().solve(jtr);
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      const double pi2 = p_inf + step * delta(0);
      const double p02 = p0 + step * delta(1);
      const double g2 = gamma + step * delta(2);
      if (g2 >= 0.0) {
        const double s2 = sse_saturation(cycles, values, pi2, p02, g2);
        if (s2 <= sse) {
          const bool converged = step * delta.cwiseAbs().maxCoeff() <= 1e-13;
          p_inf = pi2;
          p0 = p02;
          gamma = g2;
          sse = s2;
          accepted = true;
          if (converged) it = 300;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  fit.p_inf = p_inf;
  fit.p0 = p0;
  fit.gamma = gamma;
  fit.rms_residual = std::sqrt(sse / double(n));
  return fit;
}

double average_channel_fidelity(double t, double tx, double ty, double tz) {
  if (t < 0.0) throw ConfigError("channel fidelity needs a non-negative time");
  return 0.5 + (std::exp(-t / tx) + std::exp(-t / ty) + std::exp(-t / tz)) / 6.0;
}

double entanglement_fidelity_from_average(double f_avg) {
  return (3.0 * f_avg - 1.0) / 2.0;
}

double aggregate_lifetime(double tx, double ty, double tz) {
  return 3.0 / (1.0 / tx + 1.0 / ty + 1.0 / tz);
}

double dimensionless_decay_rate(double kappa, double tau) {
  return -std::expm1(-kappa * tau);
}

LifetimeResult logical_lifetime(SbsEngine& eng, const FeedbackPolicy& policy,
                                const MatrixXcd& rho0,
                                const MatrixXcd& pauli_cavity,
                                const LifetimeOptions& opt) {
  if (opt.cycles < 2) throw ConfigError("lifetime needs at least two cycles");
  if (opt.batch < 1) throw ConfigError("lifetime batch must be positive");
  const char axis = char(std::toupper(static_cast<unsigned char>(opt.axis)));
  if (axis != 'X' && axis != 'Y' && axis != 'Z')
    throw ConfigError("lifetime axis must be X, Y or Z");

  std::mt19937 rng(opt.seed);
  LifetimeResult out;
  out.times.resize(std::size_t(opt.cycles));
  out.mean.assign(std::size_t(opt.cycles), 0.0);
  for (int k = 1; k <= opt.cycles; ++k) out.times[std::size_t(k - 1)] = double(k);

  TrajectoryOptions topt;
  topt.half_cycles = 2 * opt.cycles;
  topt.watch_cavity_op = &pauli_cavity;
  for (int b = 0; b < opt.batch; ++b) {
    const TrajectoryResult tr = run_trajectory(eng, policy, rho0, topt, rng);
    for (int k = 1; k <= opt.cycles; ++k) {
      double v = tr.steps[std::size_t(2 * k - 1)].z_logical;
      // the protocol flips the X/Z frame every full cycle
      if (opt.frame_corrected && axis != 'Y' && k % 2 == 1) v = -v;
      out.mean[std::size_t(k - 1)] += v / double(opt.batch);
    }
  }
  out.fit = fit_exponential_decay(out.times, out.mean);
  return out;
}

MatrixXcd inject_displacement(const MatrixXcd& rho, Complex amplitude,
                              const HilbertConfig& hc) {
  if (rho.rows() != hc.joint_dim() || rho.cols() != hc.joint_dim())
    throw ConfigError("state dimension does not match the configured space");
  const MatrixXcd d = embed_cavity(displacement_operator(amplitude, hc.n_fock));
  return d * rho * d.adjoint();
}

}  // namespace gkpqec
