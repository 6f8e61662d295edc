#include "gkpqec/propagator.hpp"

#include "gkpqec/fock.hpp"

namespace gkpqec {

SegmentPropagator::SegmentPropagator(const LindbladGenerator& gen)
    : n_(gen.hilbert().n_fock) {
  if (n_ > 64)
    throw ConfigError(
        "factored segment propagators hold an n^2 x n^2 map and scale as n^6; "
        "beyond n_fock = 64 use the RK4 integrator instead");
  trivial_ = gen.noise().is_trivial() && !gen.has_hamiltonian();
  if (trivial_) return;
  cavity_gen_ = gen.cavity_superoperator();
  qubit_gen_ = gen.qubit_superoperator();
}

const MatrixXcd& SegmentPropagator::cavity_map(double duration) {
  auto it = cavity_cache_.find(duration);
  if (it == cavity_cache_.end()) {
    MatrixXcd m = trivial_ ? MatrixXcd(MatrixXcd::Identity(n_ * n_, n_ * n_))
                           : matrix_exponential(MatrixXcd(duration * cavity_gen_));
    it = cavity_cache_.emplace(duration, std::move(m)).first;
  }
  return it->second;
}

const Eigen::Matrix4cd& SegmentPropagator::qubit_map(double duration) {
  auto it = qubit_cache_.find(duration);
  if (it == qubit_cache_.end()) {
    Eigen::Matrix4cd m;
    if (trivial_) {
      m = Eigen::Matrix4cd::Identity();
    } else {
      m = matrix_exponential(MatrixXcd(duration * qubit_gen_));
    }
    it = qubit_cache_.emplace(duration, m).first;
  }
  return it->second;
}

MatrixXcd joint_to_pair(const MatrixXcd& rho, int n_fock) {
  MatrixXcd m(n_fock * n_fock, 4);
  for (int jc = 0; jc < n_fock; ++jc)
    for (int ic = 0; ic < n_fock; ++ic)
      for (int jq = 0; jq < 2; ++jq)
        for (int iq = 0; iq < 2; ++iq)
          m(ic + jc * n_fock, iq + jq * 2) = rho(ic * 2 + iq, jc * 2 + jq);
  return m;
}

MatrixXcd pair_to_joint(const MatrixXcd& m, int n_fock) {
  MatrixXcd rho(2 * n_fock, 2 * n_fock);
  for (int jc = 0; jc < n_fock; ++jc)
    for (int ic = 0; ic < n_fock; ++ic)
      for (int jq = 0; jq < 2; ++jq)
        for (int iq = 0; iq < 2; ++iq)
          rho(ic * 2 + iq, jc * 2 + jq) = m(ic + jc * n_fock, iq + jq * 2);
  return rho;
}

MatrixXcd SegmentPropagator::apply(const MatrixXcd& rho, double duration) {
  if (duration < 0) throw ConfigError("evolution duration must be non-negative");
  if (trivial_ || duration == 0) return rho;
  const MatrixXcd& pc = cavity_map(duration);
  const Eigen::Matrix4cd& pq = qubit_map(duration);
  MatrixXcd m = joint_to_pair(rho, n_);
  MatrixXcd out = pc * (m * pq.transpose());
  return pair_to_joint(out, n_);
}

}  // namespace gkpqec
