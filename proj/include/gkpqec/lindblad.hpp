#pragma once

#include "gkpqec/noise.hpp"
#include "gkpqec/types.hpp"

namespace gkpqec {

struct IntegratorConfig {
  // tau_cycle / 2000 = 5 ns at the reference hardware scale.
  double dt = 1.0 / 2000.0;

  void validate() const {
    if (!(dt > 0) || dt > 1.0) throw ConfigError("integrator dt must lie in (0, 1] cycle units");
  }
};

// Collapse operators and Hamiltonian assembled once per (HilbertConfig, noise)
// so the RK4 inner loop touches only cached joint-space matrices.
class LindbladGenerator {
 public:
  LindbladGenerator(const HilbertConfig& hc, const NoiseModel& noise,
                    const HamiltonianParams& ham = {});

  // rho_dot = -i [H, rho] + sum_k rate_k D[c_k] rho
  MatrixXcd rhs(const MatrixXcd& rho) const;

  const HilbertConfig& hilbert() const { return hc_; }
  const NoiseModel& noise() const { return noise_; }
  const HamiltonianParams& hamiltonian_params() const { return ham_; }
  bool has_hamiltonian() const { return has_ham_; }

  // Cavity-only / qubit-only generator pieces for the factored propagators.
  // Throws when the dispersive coupling makes the generator non-separable.
  MatrixXcd cavity_superoperator() const;
  MatrixXcd qubit_superoperator() const;

 private:
  HilbertConfig hc_;
  NoiseModel noise_;
  HamiltonianParams ham_;
  bool has_ham_ = false;
  MatrixXcd hamiltonian_;
  struct Channel {
    double rate;
    MatrixXcd op;       // collapse operator C
    MatrixXcd op_dag_op;  // C^dag C
  };
  std::vector<Channel> channels_;
};

// Fixed-step RK4 with re-Hermitization after every step. Integrates the full
// duration in dt steps plus one fractional step for the remainder.
MatrixXcd evolve_rk4(const LindbladGenerator& gen, MatrixXcd rho, double duration,
                     const IntegratorConfig& icfg = {});

}  // namespace gkpqec
