#include "gkpqec/lindblad.hpp"

#include <cmath>

#include "gkpqec/fock.hpp"

namespace gkpqec {

namespace {

MatrixXcd qubit_sigma_z() {
  MatrixXcd z = MatrixXcd::Zero(2, 2);
  z(0, 0) = 1;   // |g>
  z(1, 1) = -1;  // |e>
  return z;
}

// Lowering-to-ground convention: |g> = (1,0), relaxation takes e -> g.
MatrixXcd qubit_lower_to_ground() {
  MatrixXcd s = MatrixXcd::Zero(2, 2);
  s(0, 1) = 1;
  return s;
}

}  // namespace

LindbladGenerator::LindbladGenerator(const HilbertConfig& hc, const NoiseModel& noise,
                                     const HamiltonianParams& ham)
    : hc_(hc), noise_(noise), ham_(ham) {
  hc_.validate();
  noise_.validate();
  const int n = hc_.n_fock;
  const MatrixXcd ic = MatrixXcd::Identity(n, n);
  const MatrixXcd iq = MatrixXcd::Identity(2, 2);
  const MatrixXcd a = annihilation_operator(n);
  const MatrixXcd num = number_operator(n);

  auto add = [&](double lifetime, double prefactor, const MatrixXcd& op) {
    if (std::isinf(lifetime)) return;
    Channel c;
    c.rate = prefactor / lifetime;
    c.op = op;
    c.op_dag_op = op.adjoint() * op;
    channels_.push_back(std::move(c));
  };

  add(noise_.t_cavity, 1.0, kron(a, iq));
  add(noise_.t_cavity_deph, 2.0, kron(num, iq));
  add(noise_.t_cavity_deph_lumped, 2.0, kron(num, iq));
  add(noise_.t_qubit_relax, 1.0, kron(ic, qubit_lower_to_ground()));
  add(noise_.pure_dephasing_time(), 2.0, kron(ic, MatrixXcd(0.5 * qubit_sigma_z())));

  if (ham_.enabled && (ham_.chi != 0.0 || ham_.kerr != 0.0)) {
    has_ham_ = true;
    hamiltonian_ = 0.5 * ham_.chi * kron(num, qubit_sigma_z()) +
                   0.5 * ham_.kerr * kron(MatrixXcd(num * num), iq);
  }
}

MatrixXcd LindbladGenerator::rhs(const MatrixXcd& rho) const {
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  if (has_ham_) out -= Complex(0, 1) * (hamiltonian_ * rho - rho * hamiltonian_);
  for (const auto& c : channels_) {
    out.noalias() += c.rate * (c.op * rho * c.op.adjoint());
    out.noalias() -= (0.5 * c.rate) * (c.op_dag_op * rho);
    out.noalias() -= (0.5 * c.rate) * (rho * c.op_dag_op);
  }
  return out;
}

MatrixXcd LindbladGenerator::cavity_superoperator() const {
  if (has_ham_ && ham_.chi != 0.0)
    throw ConfigError(
        "segment propagators need a factorizable generator; the dispersive shift couples cavity "
        "and qubit, use the RK4 path instead");
  const int n = hc_.n_fock;
  const MatrixXcd a = annihilation_operator(n);
  const MatrixXcd num = number_operator(n);
  MatrixXcd sup = MatrixXcd::Zero(n * n, n * n);
  if (!std::isinf(noise_.t_cavity)) sup += (1.0 / noise_.t_cavity) * dissipator_superoperator(a);
  if (!std::isinf(noise_.t_cavity_deph))
    sup += (2.0 / noise_.t_cavity_deph) * dissipator_superoperator(num);
  if (!std::isinf(noise_.t_cavity_deph_lumped))
    sup += (2.0 / noise_.t_cavity_deph_lumped) * dissipator_superoperator(num);
  if (has_ham_ && ham_.kerr != 0.0) {
    const MatrixXcd h = 0.5 * ham_.kerr * (num * num);
    const MatrixXcd id = MatrixXcd::Identity(n, n);
    sup += Complex(0, -1) * (sandwich_superoperator(h, id) - sandwich_superoperator(id, h));
  }
  return sup;
}

MatrixXcd LindbladGenerator::qubit_superoperator() const {
  if (has_ham_ && ham_.chi != 0.0)
    throw ConfigError("segment propagators unavailable with the dispersive shift enabled");
  MatrixXcd sup = MatrixXcd::Zero(4, 4);
  if (!std::isinf(noise_.t_qubit_relax))
    sup += (1.0 / noise_.t_qubit_relax) * dissipator_superoperator(qubit_lower_to_ground());
  const double t_phi = noise_.pure_dephasing_time();
  if (!std::isinf(t_phi))
    sup += (2.0 / t_phi) * dissipator_superoperator(MatrixXcd(0.5 * qubit_sigma_z()));
  return sup;
}

MatrixXcd evolve_rk4(const LindbladGenerator& gen, MatrixXcd rho, double duration,
                     const IntegratorConfig& icfg) {
  icfg.validate();
  if (duration < 0) throw ConfigError("evolution duration must be non-negative");
  if (duration == 0) return rho;

  const double dt = icfg.dt;
  const long n_full = long(duration / dt + 1e-9);
  const double remainder = duration - double(n_full) * dt;

  auto step = [&](MatrixXcd& r, double h) {
    const MatrixXcd k1 = gen.rhs(r);
    const MatrixXcd k2 = gen.rhs(MatrixXcd(r + (0.5 * h) * k1));
    const MatrixXcd k3 = gen.rhs(MatrixXcd(r + (0.5 * h) * k2));
    const MatrixXcd k4 = gen.rhs(MatrixXcd(r + h * k3));
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    r = 0.5 * (r + r.adjoint().eval());
  };

  for (long s = 0; s < n_full; ++s) step(rho, dt);
  if (remainder > 1e-12 * dt) step(rho, remainder);
  return rho;
}

}  // namespace gkpqec
