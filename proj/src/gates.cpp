#include "gkpqec/gates.hpp"

#include <cmath>

#include "gkpqec/fock.hpp"

namespace gkpqec {

Matrix2cd qubit_rotation(double phi, double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Complex i(0.0, 1.0);
  Matrix2cd r;
  r << c, -i * s * std::exp(-i * phi),
       -i * s * std::exp(i * phi), c;
  return r;
}

MatrixXcd ecd_operator(Complex beta, int n_fock) {
  const MatrixXcd d_half = displacement_operator(0.5 * beta, n_fock);
  Matrix2cd raise = Matrix2cd::Zero();  // |e><g|
  raise(1, 0) = 1.0;
  Matrix2cd lower = Matrix2cd::Zero();  // |g><e|
  lower(0, 1) = 1.0;
  return kron(d_half, MatrixXcd(raise)) +
         kron(MatrixXcd(d_half.adjoint()), MatrixXcd(lower));
}

MatrixXcd virtual_rotation(double theta, int n_fock) {
  MatrixXcd vr = MatrixXcd::Zero(n_fock, n_fock);
  const Complex i(0.0, 1.0);
  for (int n = 0; n < n_fock; ++n) vr(n, n) = std::exp(i * (theta * n));
  return vr;
}

MatrixXcd embed_cavity(const MatrixXcd& op_c) {
  return kron(op_c, MatrixXcd(MatrixXcd::Identity(2, 2)));
}

MatrixXcd embed_qubit(const Matrix2cd& op_q, int n_fock) {
  return kron(MatrixXcd(MatrixXcd::Identity(n_fock, n_fock)), MatrixXcd(op_q));
}

MatrixXcd apply_unitary(const MatrixXcd& u, const MatrixXcd& rho) {
  return u * rho * u.adjoint();
}

HalfCycleParams HalfCycleParams::standard() {
  HalfCycleParams p;
  const double h = 0.5 * kPi;
  p.phi = {h, 0.0, 0.0, h};
  p.theta = {h, -h, h, -h};
  p.beta = {Complex(0.0, 0.2), Complex(std::sqrt(2.0 * kPi), 0.0),
            Complex(0.0, 0.2)};
  p.theta_vr = h;
  return p;
}

std::array<double, 15> HalfCycleParams::flatten() const {
  std::array<double, 15> v{};
  for (int l = 0; l < 4; ++l) {
    v[2 * l] = phi[l];
    v[2 * l + 1] = theta[l];
  }
  for (int k = 0; k < 3; ++k) {
    v[8 + 2 * k] = beta[k].real();
    v[8 + 2 * k + 1] = beta[k].imag();
  }
  v[14] = theta_vr;
  return v;
}

HalfCycleParams HalfCycleParams::unflatten(const std::array<double, 15>& v) {
  HalfCycleParams p;
  for (int l = 0; l < 4; ++l) {
    p.phi[l] = v[2 * l];
    p.theta[l] = v[2 * l + 1];
  }
  for (int k = 0; k < 3; ++k) p.beta[k] = Complex(v[8 + 2 * k], v[8 + 2 * k + 1]);
  p.theta_vr = v[14];
  return p;
}

}  // namespace gkpqec
