#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "gkpqec/types.hpp"

namespace gkpqec::ad {

// Reverse-mode tape over real dense matrices. Scalars are 1x1 nodes. Complex
// matrices are carried as (re, im) node pairs by CVar below, which keeps
// every derivative a plain real adjoint.
//
// Nodes are append-only; backward() walks the tape once in reverse and
// accumulates adjoints only into nodes that can reach a parameter.
class Tape {
 public:
  int constant(const MatrixXd& v);
  int parameter(const MatrixXd& v);

  int add(int a, int b);
  int sub(int a, int b);
  int neg(int a);
  int axpy(int a, int b, double c);  // a + c * b
  int scale(int a, double c);
  int matmul(int a, int b);
  int hadamard(int a, int b);
  int scalar_mul(int s, int m);  // (1x1 s) * matrix m
  int scalar_div(int m, int s);  // matrix m / (1x1 s)
  int transpose(int a);

  int tanh_(int a);
  int sigmoid_(int a);
  int sin_(int a);
  int cos_(int a);
  int log_(int a);

  int trace(int a);
  int sum(int a);
  int entry(int a, int r, int c);

  // Builds a rows x cols matrix that is zero except for the listed
  // (row, col, scalar node) entries.
  int from_entries(int rows, int cols,
                   const std::vector<std::tuple<int, int, int>>& entries);

  int kron_const_left(const MatrixXd& k, int b);   // k (x) B
  int kron_const_right(int a, const MatrixXd& k);  // A (x) k

  // Joint-space block surgery for the cavity (x) qubit layout
  // (joint row = cavity_row * 2 + qubit_row). qubit_block extracts the
  // n x n cavity block at fixed qubit indices; qubit_assemble builds a
  // 2n x 2n joint matrix from such blocks, zero where none is given.
  int qubit_block(int a, int rq, int cq);
  int qubit_assemble(int n_fock,
                     const std::vector<std::tuple<int, int, int>>& blocks);

  // Reshuffle between the joint matrix (2n x 2n) and the pair-index matrix
  // (n^2 x 4) used by factored segment propagators.
  int pair_permute(int a, int n_fock, bool to_pair);

  void backward(int root);

  const MatrixXd& value(int id) const { return nodes_[id].value; }
  // Valid after backward(); zero-sized matrix if the node got no adjoint.
  const MatrixXd& grad(int id) const { return grads_[id]; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t value_bytes() const { return value_bytes_; }

 private:
  enum class Op {
    kConst, kParam, kAdd, kSub, kNeg, kAxpy, kScale, kMatMul, kHadamard,
    kScalarMul, kScalarDiv, kTranspose, kTanh, kSigmoid, kSin, kCos, kLog,
    kTrace, kSum, kEntry, kFromEntries, kKronL, kKronR, kQubitBlock,
    kQubitAssemble, kPairPermute,
  };
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double c = 0.0;
    bool needs_grad = false;
    MatrixXd value;
    MatrixXd aux;           // constant payload for kron ops
    std::vector<int> idx;   // op-specific indices
  };

  int push(Node n);
  void accumulate(int id, const MatrixXd& g);

  std::vector<Node> nodes_;
  std::vector<MatrixXd> grads_;
  std::size_t value_bytes_ = 0;
};

// Handle pairing a tape with a node id, so expressions read naturally.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const MatrixXd& value() const { return tape->value(id); }
  const MatrixXd& grad() const { return tape->grad(id); }
};

Var constant(Tape& t, const MatrixXd& v);
Var parameter(Tape& t, const MatrixXd& v);
Var scalar(Tape& t, double v);  // 1x1 constant

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator-(Var a);
Var operator*(Var a, Var b);  // matmul; 1x1 * matrix broadcasts
Var operator*(double c, Var a);
Var hadamard(Var a, Var b);
Var axpy(Var a, Var b, double c);
Var scalar_div(Var m, Var s);
Var transpose(Var a);
Var tanh(Var a);
Var sigmoid(Var a);
Var sin(Var a);
Var cos(Var a);
Var log(Var a);
Var trace(Var a);
Var sum(Var a);
Var entry(Var a, int r, int c);
Var detach(Var a);  // value copied into a fresh constant

// Complex matrix as a (re, im) pair of real nodes.
struct CVar {
  Var re, im;
};

CVar cconstant(Tape& t, const MatrixXcd& v);
MatrixXcd cvalue(const CVar& a);
CVar cadd(CVar a, CVar b);
CVar csub(CVar a, CVar b);
CVar cneg(CVar a);
CVar cmul(CVar a, CVar b);           // 4 real matmuls
CVar cscale(CVar a, Complex c);
CVar cscalar_mul(Var s, CVar m);     // real 1x1 scalar
CVar cscalar_div(CVar m, Var s);
CVar cadjoint(CVar a);
CVar ckron_const_left(const MatrixXcd& k, CVar b);
CVar ckron_const_right(CVar a, const MatrixXcd& k);
CVar cqubit_block(CVar a, int rq, int cq);
CVar cqubit_assemble(int n_fock,
                     const std::vector<std::tuple<int, int, CVar>>& blocks);
CVar cpair_permute(CVar a, int n_fock, bool to_pair);
Var creal_trace(CVar a);             // Re tr(A), 1x1

// U rho U^dag
CVar conjugate(CVar u, CVar rho);

// exp(Z) by Taylor series with scaling and squaring; the scaling count is
// picked from the current norm, the series order is fixed at 18.
CVar cmatexp(CVar z);

// Re <psi| rho |psi> for a constant pure target.
Var pure_state_overlap(const VectorXcd& psi, CVar rho);

}  // namespace gkpqec::ad
