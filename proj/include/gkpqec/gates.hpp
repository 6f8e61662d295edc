#pragma once

#include <array>

#include "gkpqec/types.hpp"

namespace gkpqec {

// Qubit rotation exp{-i th/2 (sx cos(phi) + sy sin(phi))} in the {|g>,|e>} basis.
Matrix2cd qubit_rotation(double phi, double theta);

// Echoed conditional displacement D(beta/2) (x) |e><g| + D(-beta/2) (x) |g><e|,
// returned on the joint cavity (x) qubit space.
MatrixXcd ecd_operator(Complex beta, int n_fock);

// Cavity phase-space rotation exp{i theta n}, diagonal in the Fock basis.
MatrixXcd virtual_rotation(double theta, int n_fock);

// Lift a cavity operator or a qubit operator to the joint space.
MatrixXcd embed_cavity(const MatrixXcd& op_c);
MatrixXcd embed_qubit(const Matrix2cd& op_q, int n_fock);

// Conjugation rho -> U rho U^dag.
MatrixXcd apply_unitary(const MatrixXcd& u, const MatrixXcd& rho);

// The 15 controls of one half-cycle. Layers carry a qubit rotation each;
// layers 1-3 pair it with an ECD, layer 4 with a plain cavity displacement
// whose (real) amplitude is fixed by the lattice geometry rather than learned.
struct HalfCycleParams {
  std::array<double, 4> phi{};
  std::array<double, 4> theta{};
  std::array<Complex, 3> beta{};
  double theta_vr = 0.0;

  static HalfCycleParams standard();

  // Flat order (phi1,th1,...,phi4,th4, Re b1,Im b1,...,Re b3,Im b3, theta_vr),
  // shared with the policy output layer.
  std::array<double, 15> flatten() const;
  static HalfCycleParams unflatten(const std::array<double, 15>& v);
};

}  // namespace gkpqec
