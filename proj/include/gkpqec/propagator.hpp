#pragma once

#include <map>

#include "gkpqec/lindblad.hpp"
#include "gkpqec/types.hpp"

namespace gkpqec {

// Precomputed exp(L * t) for the idle segments of a schedule, factored into a
// cavity piece (n^2 x n^2) and a qubit piece (4 x 4). The factorization holds
// because every collapse operator acts on one subsystem only and the
// dispersive coupling is rejected up front. Maps are cached per duration, so
// repeated trajectories pay the matrix exponential once.
class SegmentPropagator {
 public:
  explicit SegmentPropagator(const LindbladGenerator& gen);

  // rho -> exp(L * duration) rho on the joint space, via the factored maps.
  MatrixXcd apply(const MatrixXcd& rho, double duration);

  // Factor access for callers that apply the maps themselves.
  const MatrixXcd& cavity_map(double duration);
  const Eigen::Matrix4cd& qubit_map(double duration);

  bool trivial() const { return trivial_; }
  int n_fock() const { return n_; }

 private:
  int n_;
  bool trivial_;
  MatrixXcd cavity_gen_;
  Eigen::Matrix4cd qubit_gen_;
  std::map<double, MatrixXcd> cavity_cache_;
  std::map<double, Eigen::Matrix4cd> qubit_cache_;
};

// Reshuffles between the joint density matrix (2n x 2n, index ic*2+iq) and
// the pair-index matrix M (n^2 x 4) with M(ic + jc*n, iq + jq*2) = rho(...).
// In the pair basis a separable propagator acts as M -> Phi_c * M * Phi_q^T.
MatrixXcd joint_to_pair(const MatrixXcd& rho, int n_fock);
MatrixXcd pair_to_joint(const MatrixXcd& m, int n_fock);

}  // namespace gkpqec
