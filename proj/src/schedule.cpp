#include "gkpqec/schedule.hpp"

#include <numeric>

namespace gkpqec {

Schedule Schedule::standard() {
  Schedule s;
  s.entering = 0.01;
  s.layer = {0.05, 0.07, 0.03, 0.01};
  s.measurement = 0.23;
  s.rotation = 0.10;
  s.measured = true;
  return s;
}

Schedule Schedule::autonomous() {
  Schedule s = standard();
  s.measurement = 0.08;
  s.measured = false;
  return s;
}

Schedule Schedule::simplified() {
  Schedule s;
  s.entering = 0.0;
  s.layer = {0.10, 0.10, 0.10, 0.10};
  s.measurement = 0.0;
  s.rotation = 0.0;
  s.measured = true;
  return s;
}

Schedule Schedule::from_name(const std::string& name) {
  if (name == "standard") return standard();
  if (name == "autonomous") return autonomous();
  if (name == "simplified") return simplified();
  throw ConfigError("unknown schedule '" + name +
                    "' (expected standard, autonomous or simplified)");
}

double Schedule::pre_measurement_idle() const {
  return entering + std::accumulate(layer.begin(), layer.end(), 0.0);
}

double Schedule::half_cycle_duration() const {
  return pre_measurement_idle() + measurement + rotation;
}

void Schedule::validate() const {
  if (entering < 0.0 || measurement < 0.0 || rotation < 0.0)
    throw ConfigError("schedule idle durations must be non-negative");
  for (double d : layer)
    if (d < 0.0) throw ConfigError("schedule idle durations must be non-negative");
}

}  // namespace gkpqec
