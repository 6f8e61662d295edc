#pragma once

#include "gkpqec/types.hpp"

namespace gkpqec {

// Truncated ladder operators on the first n_fock Fock states.
MatrixXcd annihilation_operator(int n_fock);
MatrixXcd creation_operator(int n_fock);
MatrixXcd number_operator(int n_fock);

// Normalized coherent state |gamma> truncated to n_fock levels. The
// coefficients are the exact infinite-dimensional ones, so the truncated
// vector's norm falls short of 1 by the (discarded) tail mass.
VectorXcd coherent_state(Complex gamma, int n_fock);

// Scaling-and-squaring matrix exponential with a Pade(13) core, after
// Higham (2005). Works for real and complex square matrices.
MatrixXcd matrix_exponential(const MatrixXcd& m);
MatrixXd matrix_exponential(const MatrixXd& m);

// D(zeta) = exp(zeta a^dag - conj(zeta) a). Logs a one-shot warning when
// |zeta|^2 > n_fock / 4, where truncation starts to bite.
MatrixXcd displacement_operator(Complex zeta, int n_fock);

// Kronecker product, row-blocks of a scaled by entries of... the usual thing.
MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);
MatrixXd kron(const MatrixXd& a, const MatrixXd& b);

// D[A] rho = A rho A^dag - 1/2 {A^dag A, rho}
MatrixXcd dissipator_apply(const MatrixXcd& collapse, const MatrixXcd& rho);

// Trace out the second factor of a bipartite system with dims (dim_a, dim_b).
MatrixXcd partial_trace_second(const MatrixXcd& rho, int dim_a, int dim_b);

// Column-major superoperator matrix of rho -> A rho B.
MatrixXcd sandwich_superoperator(const MatrixXcd& a, const MatrixXcd& b);
// Column-major superoperator matrix of the dissipator D[A].
MatrixXcd dissipator_superoperator(const MatrixXcd& collapse);

bool is_hermitian(const MatrixXcd& m, double tol = 1e-10);
double min_eigenvalue(const MatrixXcd& hermitian);

namespace detail {
// Rate-limited stderr warning (each distinct tag fires once per process).
void warn_once(const std::string& tag, const std::string& message);
}  // namespace detail

}  // namespace gkpqec
