#pragma once

#include "gkpqec/types.hpp"

namespace gkpqec {

// Translation pair generating the code's phase-space lattice. The cell-area
// constraint conj(alpha)*beta - alpha*conj(beta) = i*pi must hold so that the
// logical translations commute with the stabilizers.
struct CodeLattice {
  Complex alpha;
  Complex beta;

  static CodeLattice square();
  static CodeLattice rectangular(double aspect);  // alpha scaled by `aspect`
  static CodeLattice hexagonal();
  static CodeLattice from_name(const std::string& name, double aspect = 1.0);

  void validate(double tol = 1e-12) const;
};

struct GkpStateSpec {
  CodeLattice lattice = CodeLattice::square();
  double delta = 0.34;
  // 0 = adaptive: grow shells until the normalized state moves < 1e-10.
  int lattice_shells = 0;
  // Fraction of norm allowed beyond the Fock cutoff before construction fails.
  double truncation_tolerance = 1e-6;

  void validate() const;
};

enum class LogicalLabel { plus_x, minus_x, plus_y, minus_y, plus_z, minus_z };
LogicalLabel logical_label_from_name(const std::string& name);  // "+Z", "-X", ...
std::string logical_label_name(LogicalLabel l);

// Finite-energy logical state: coherent-state lattice sum, then the
// exp(-delta^2 n) envelope, then normalization. Throws NumericalError when
// the norm lost beyond n_fock exceeds spec.truncation_tolerance.
VectorXcd logical_state(LogicalLabel which, const GkpStateSpec& spec, const HilbertConfig& hc);

// Bare (infinite-energy) logical translations on the truncated space:
// X = D(alpha), Z = D(beta), Y = i X Z.
MatrixXcd pauli_operator(char axis, const CodeLattice& lattice, int n_fock);
// Stabilizers: S_X = D(2 alpha), S_Z = D(2 beta).
MatrixXcd stabilizer_operator(char axis, const CodeLattice& lattice, int n_fock);

// Uhlmann fidelity; takes the Tr(sigma rho) shortcut when sigma is pure.
double fidelity(const MatrixXcd& rho, const MatrixXcd& sigma);
double fidelity_pure(const MatrixXcd& rho, const VectorXcd& psi);

// Re Tr(op rho); the imaginary part is reported by pointer if wanted.
double logical_expectation(const MatrixXcd& op, const MatrixXcd& rho, double* imag_part = nullptr);

double mean_photon(const MatrixXcd& rho);
double mean_photon(const VectorXcd& psi);

struct WignerGrid {
  VectorXd q;
  VectorXd p;
  MatrixXd value;  // value(i, j) = W(q(i), p(j))
};

// W(q,p) = (1/pi) * sum_n (-1)^n <n| D(g)^dag rho D(g) |n>, g = (q+ip)/sqrt(2);
// normalized so the full phase-space integral over dq dp is Tr rho.
WignerGrid wigner_grid(const MatrixXcd& rho, const VectorXd& qs, const VectorXd& ps);
WignerGrid wigner_grid(const VectorXcd& psi, const VectorXd& qs, const VectorXd& ps);

}  // namespace gkpqec
