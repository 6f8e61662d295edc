#pragma once

#include "gkpqec/types.hpp"

namespace gkpqec {

// All times in cavity-cycle units (tau_cycle = 10 us at the reference
// hardware scale). Infinite lifetimes (= 0 rates) are expressed as inf.
struct NoiseModel {
  double t_cavity = std::numeric_limits<double>::infinity();      // single-photon loss
  double t_qubit_relax = std::numeric_limits<double>::infinity();  // ancilla T1
  double t_qubit_deph = std::numeric_limits<double>::infinity();   // ancilla T2 (full)
  // White-noise cavity dephasing (full T2c would fold in t_cavity; this is the
  // pure-dephasing time entering 2/T D[n] directly).
  double t_cavity_deph = std::numeric_limits<double>::infinity();
  // Optional lumped cavity dephasing from ancilla shot noise, same dissipator.
  double t_cavity_deph_lumped = std::numeric_limits<double>::infinity();

  static NoiseModel none();
  static NoiseModel low();
  static NoiseModel medium();
  static NoiseModel high();
  static NoiseModel from_name(const std::string& name);

  // 1 / (1/T2 - 1/(2 T1)); infinite when T2 is infinite.
  double pure_dephasing_time() const;
  bool is_trivial() const;
  void validate() const;
};

// Dispersive shift and cavity self-Kerr, disabled by default. Enabled terms
// are integrated by the RK4 path; the qubit-cavity coupling (chi) blocks the
// factored segment propagators.
struct HamiltonianParams {
  bool enabled = false;
  double chi = 0.0;   // qubit-conditioned cavity frequency shift
  double kerr = 0.0;  // cavity self-Kerr
};

inline constexpr double kTauCycleMicroseconds = 10.0;

}  // namespace gkpqec
