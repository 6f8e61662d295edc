#pragma once

#include <array>
#include <string>

#include "gkpqec/types.hpp"

namespace gkpqec {

// Timing of one half-cycle, in cycle units. Gates are instantaneous; each
// entry is the dissipative idle that follows the corresponding event:
//   entering -> layer 1..4 gates -> measurement(+reset) -> frame rotation.
// Autonomous schedules drop the measurement and keep the unconditional reset.
struct Schedule {
  double entering = 0.0;
  std::array<double, 4> layer{};
  double measurement = 0.0;  // idle after measurement + reset (or reset alone)
  double rotation = 0.0;     // idle after the virtual frame rotation
  bool measured = true;      // false = autonomous (reset without measurement)

  static Schedule standard();    // 0.01 | 0.05 0.07 0.03 0.01 | 0.23 | 0.10
  static Schedule autonomous();  // measurement slot replaced by a 0.08 reset idle
  static Schedule simplified();  // uniform 0.10 layers, instantaneous measurement/reset
  static Schedule from_name(const std::string& name);

  double pre_measurement_idle() const;
  double half_cycle_duration() const;
  void validate() const;
};

}  // namespace gkpqec
