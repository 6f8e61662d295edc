#include "gkpqec/noise.hpp"

#include <cmath>

namespace gkpqec {

NoiseModel NoiseModel::none() { return NoiseModel{}; }

NoiseModel NoiseModel::low() {
  NoiseModel n;
  n.t_cavity = 61.0;
  n.t_qubit_relax = 28.0;
  n.t_qubit_deph = 23.8;
  return n;
}

NoiseModel NoiseModel::medium() {
  NoiseModel n;
  n.t_cavity = 49.0;
  n.t_qubit_relax = 10.0;
  n.t_qubit_deph = 12.0;
  return n;
}

NoiseModel NoiseModel::high() {
  NoiseModel n;
  n.t_cavity = 24.5;
  n.t_qubit_relax = 5.0;
  n.t_qubit_deph = 6.0;
  return n;
}

NoiseModel NoiseModel::from_name(const std::string& name) {
  if (name == "none") return none();
  if (name == "low") return low();
  if (name == "medium") return medium();
  if (name == "high") return high();
  throw ConfigError("unknown noise preset '" + name + "' (none|low|medium|high)");
}

double NoiseModel::pure_dephasing_time() const {
  if (std::isinf(t_qubit_deph)) return std::numeric_limits<double>::infinity();
  const double rate = 1.0 / t_qubit_deph - 0.5 / t_qubit_relax;
  if (rate <= 0) throw ConfigError("qubit T2 must be below 2*T1 for a positive dephasing rate");
  return 1.0 / rate;
}

bool NoiseModel::is_trivial() const {
  return std::isinf(t_cavity) && std::isinf(t_qubit_relax) && std::isinf(t_qubit_deph) &&
         std::isinf(t_cavity_deph) && std::isinf(t_cavity_deph_lumped);
}

void NoiseModel::validate() const {
  for (double t : {t_cavity, t_qubit_relax, t_qubit_deph, t_cavity_deph, t_cavity_deph_lumped})
    if (!(t > 0)) throw ConfigError("lifetimes must be positive (use inf to disable a channel)");
  (void)pure_dephasing_time();  // throws on inconsistent T1/T2
}

}  // namespace gkpqec
