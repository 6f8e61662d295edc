#include "gkpqec/code.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gkpqec/fock.hpp"

namespace gkpqec {

CodeLattice CodeLattice::square() {
  const double a = std::sqrt(kPi / 2.0);
  return {Complex(a, 0), Complex(0, a)};
}

CodeLattice CodeLattice::rectangular(double aspect) {
  if (aspect <= 0) throw ConfigError("rectangular lattice aspect must be positive");
  const double a = std::sqrt(kPi / 2.0);
  return {Complex(aspect * a, 0), Complex(0, a / aspect)};
}

CodeLattice CodeLattice::hexagonal() {
  const double a = std::sqrt(kPi / std::sqrt(3.0));
  return {Complex(a, 0), std::polar(a, 2.0 * kPi / 3.0)};
}

CodeLattice CodeLattice::from_name(const std::string& name, double aspect) {
  if (name == "square") return square();
  if (name == "rectangular") return rectangular(aspect);
  if (name == "hexagonal") return hexagonal();
  throw ConfigError("unknown lattice '" + name + "' (square|rectangular|hexagonal)");
}

void CodeLattice::validate(double tol) const {
  const Complex area = std::conj(alpha) * beta - alpha * std::conj(beta);
  if (std::abs(area - Complex(0, kPi)) > tol)
    throw ConfigError("lattice cell constraint conj(a)b - a conj(b) = i*pi violated");
}

void GkpStateSpec::validate() const {
  lattice.validate();
  if (delta <= 0 || delta >= 1) throw ConfigError("delta must be in (0, 1)");
  if (lattice_shells < 0 || lattice_shells > 64) throw ConfigError("lattice_shells out of range");
  if (truncation_tolerance <= 0 || truncation_tolerance > 1)
    throw ConfigError("truncation_tolerance must be in (0, 1]");
}

LogicalLabel logical_label_from_name(const std::string& name) {
  if (name == "+X") return LogicalLabel::plus_x;
  if (name == "-X") return LogicalLabel::minus_x;
  if (name == "+Y") return LogicalLabel::plus_y;
  if (name == "-Y") return LogicalLabel::minus_y;
  if (name == "+Z") return LogicalLabel::plus_z;
  if (name == "-Z") return LogicalLabel::minus_z;
  throw ConfigError("unknown logical state '" + name + "' (+X,-X,+Y,-Y,+Z,-Z)");
}

std::string logical_label_name(LogicalLabel l) {
  switch (l) {
    case LogicalLabel::plus_x: return "+X";
    case LogicalLabel::minus_x: return "-X";
    case LogicalLabel::plus_y: return "+Y";
    case LogicalLabel::minus_y: return "-Y";
    case LogicalLabel::plus_z: return "+Z";
    case LogicalLabel::minus_z: return "-Z";
  }
  return "?";
}

namespace {

// Computational-basis grid state on an extended cutoff. `one` selects the
// displaced sublattice carrying the second computational state.
VectorXcd grid_sum(bool one, const GkpStateSpec& spec, int n_ext) {
  const Complex alpha = spec.lattice.alpha, beta = spec.lattice.beta;
  VectorXcd acc = VectorXcd::Zero(n_ext);
  VectorXcd prev = acc;
  const int max_shell = spec.lattice_shells > 0 ? spec.lattice_shells : 64;
  const bool adaptive = spec.lattice_shells == 0;
  for (int shell = 0; shell <= max_shell; ++shell) {
    for (int k = -shell; k <= shell; ++k)
      for (int l = -shell; l <= shell; ++l) {
        if (std::max(std::abs(k), std::abs(l)) != shell) continue;
        Complex site, phase;
        if (!one) {
          site = double(2 * k) * alpha + double(l) * beta;
          phase = std::exp(Complex(0, -kPi * double(k) * double(l)));
        } else {
          site = double(2 * k + 1) * alpha + double(l) * beta;
          phase = std::exp(Complex(0, -kPi * (double(k) * double(l) + 0.5 * double(l))));
        }
        acc += phase * coherent_state(site, n_ext);
      }
    if (adaptive && shell > 0) {
      VectorXcd cur_n = acc.normalized();
      VectorXcd prev_n = prev.normalized();
      // Global-phase-free distance between successive normalized iterates.
      const Complex ov = prev_n.dot(cur_n);
      const double dist = std::sqrt(std::max(0.0, 2.0 * (1.0 - std::abs(ov))));
      if (dist < 1e-10) break;
    }
    prev = acc;
  }
  return acc;
}

VectorXcd computational_state(bool one, const GkpStateSpec& spec, const HilbertConfig& hc) {
  const int n_ext = hc.n_fock + 32;
  VectorXcd psi = grid_sum(one, spec, n_ext);
  for (int n = 0; n < n_ext; ++n) psi(n) *= std::exp(-spec.delta * spec.delta * double(n));
  const double total = psi.squaredNorm();
  if (!(total > 0)) throw NumericalError("logical state vanished after envelope");
  const double tail = psi.tail(n_ext - hc.n_fock).squaredNorm() / total;
  if (tail > spec.truncation_tolerance)
    throw NumericalError("logical state loses " + std::to_string(tail) +
                         " of its norm beyond n_fock = " + std::to_string(hc.n_fock) +
                         " (tolerance " + std::to_string(spec.truncation_tolerance) +
                         "); raise n_fock or the truncation tolerance");
  return psi.head(hc.n_fock).normalized();
}

}  // namespace

VectorXcd logical_state(LogicalLabel which, const GkpStateSpec& spec, const HilbertConfig& hc) {
  spec.validate();
  hc.validate();
  switch (which) {
    case LogicalLabel::plus_z: return computational_state(false, spec, hc);
    case LogicalLabel::minus_z: return computational_state(true, spec, hc);
    default: break;
  }
  const VectorXcd zero = computational_state(false, spec, hc);
  const VectorXcd one = computational_state(true, spec, hc);
  Complex w;
  switch (which) {
    case LogicalLabel::plus_x: w = Complex(1, 0); break;
    case LogicalLabel::minus_x: w = Complex(-1, 0); break;
    case LogicalLabel::plus_y: w = Complex(0, 1); break;
    default: w = Complex(0, -1); break;  // minus_y
  }
  VectorXcd psi = zero + w * one;
  return psi.normalized();
}

MatrixXcd pauli_operator(char axis, const CodeLattice& lattice, int n_fock) {
  switch (axis) {
    case 'X': return displacement_operator(lattice.alpha, n_fock);
    case 'Z': return displacement_operator(lattice.beta, n_fock);
    case 'Y':
      return Complex(0, 1) * (displacement_operator(lattice.alpha, n_fock) *
                              displacement_operator(lattice.beta, n_fock));
    default: throw ConfigError(std::string("pauli axis must be X, Y or Z, got ") + axis);
  }
}

MatrixXcd stabilizer_operator(char axis, const CodeLattice& lattice, int n_fock) {
  switch (axis) {
    case 'X': return displacement_operator(2.0 * lattice.alpha, n_fock);
    case 'Z': return displacement_operator(2.0 * lattice.beta, n_fock);
    default: throw ConfigError(std::string("stabilizer axis must be X or Z, got ") + axis);
  }
}

double fidelity_pure(const MatrixXcd& rho, const VectorXcd& psi) {
  const Complex v = psi.adjoint() * rho * psi;
  return std::max(0.0, v.real());
}

double fidelity(const MatrixXcd& rho, const MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows()) throw ConfigError("fidelity: dimension mismatch");
  const double purity = (sigma * sigma).trace().real();
  if (purity > 1.0 - 1e-10) return std::max(0.0, (sigma * rho).trace().real());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const MatrixXcd sqrt_rho =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es2(MatrixXcd(sqrt_rho * sigma * sqrt_rho));
  const double tr = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

double logical_expectation(const MatrixXcd& op, const MatrixXcd& rho, double* imag_part) {
  const Complex v = (op * rho).trace();
  if (imag_part) *imag_part = v.imag();
  return v.real();
}

double mean_photon(const MatrixXcd& rho) {
  double acc = 0;
  for (int n = 0; n < rho.rows(); ++n) acc += double(n) * rho(n, n).real();
  return acc;
}

double mean_photon(const VectorXcd& psi) {
  double acc = 0;
  for (int n = 0; n < psi.size(); ++n) acc += double(n) * std::norm(psi(n));
  return acc;
}

namespace {

// Split D(g)^dag into the two quadrature factors so a qxp grid needs only
// |q|+|p| matrix exponentials; the splitting phase drops out below.
std::vector<MatrixXcd> axis_displacements(const VectorXd& vals, bool imaginary, int n) {
  std::vector<MatrixXcd> out;
  out.reserve(vals.size());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < vals.size(); ++i) {
    const Complex g = imaginary ? Complex(0, vals(i) * inv_sqrt2) : Complex(vals(i) * inv_sqrt2, 0);
    out.push_back(displacement_operator(g, n).adjoint());
  }
  return out;
}

}  // namespace

WignerGrid wigner_grid(const VectorXcd& psi, const VectorXd& qs, const VectorXd& ps) {
  const int n = int(psi.size());
  WignerGrid grid{qs, ps, MatrixXd(qs.size(), ps.size())};
  const auto dq = axis_displacements(qs, false, n);
  const auto dp = axis_displacements(ps, true, n);
  VectorXd parity(n);
  for (int k = 0; k < n; ++k) parity(k) = (k % 2 == 0) ? 1.0 : -1.0;
  const double kPiInv = 1.0 / kPi;
  for (int i = 0; i < qs.size(); ++i) {
    const VectorXcd u = dq[i] * psi;
    for (int j = 0; j < ps.size(); ++j) {
      const VectorXcd v = dp[j] * u;
      grid.value(i, j) = kPiInv * parity.dot(v.cwiseAbs2());
    }
  }
  return grid;
}

WignerGrid wigner_grid(const MatrixXcd& rho, const VectorXd& qs, const VectorXd& ps) {
  const int n = int(rho.rows());
  WignerGrid grid{qs, ps, MatrixXd(qs.size(), ps.size())};
  const auto dq = axis_displacements(qs, false, n);
  const auto dp = axis_displacements(ps, true, n);
  const double kPiInv = 1.0 / kPi;
  for (int i = 0; i < qs.size(); ++i) {
    const MatrixXcd m = dq[i] * rho * dq[i].adjoint();
    for (int j = 0; j < ps.size(); ++j) {
      const MatrixXcd w = dp[j] * m * dp[j].adjoint();
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += ((k % 2 == 0) ? 1.0 : -1.0) * w(k, k).real();
      grid.value(i, j) = kPiInv * acc;
    }
  }
  return grid;
}

}  // namespace gkpqec
