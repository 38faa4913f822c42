#include "hypman/diagnostics.hpp"

#include <algorithm>

namespace hypman {

Diagnostics& Diagnostics::instance() {
  static Diagnostics d;
  return d;
}

MonitorCounters Diagnostics::snapshot() const {
  std::lock_guard lock(mutex_);
  return counters_;
}

void Diagnostics::reset() {
  std::lock_guard lock(mutex_);
  counters_ = {};
}

void Diagnostics::record_decay(bool ok) {
  std::lock_guard lock(mutex_);
  ++counters_.decay_checks;
  if (!ok) ++counters_.decay_violations;
}

void Diagnostics::merge(const MonitorCounters& d) {
  std::lock_guard lock(mutex_);
  counters_.decay_checks += d.decay_checks;
  counters_.decay_violations += d.decay_violations;
  counters_.ine1_checks += d.ine1_checks;
  counters_.ine1_violations += d.ine1_violations;
  counters_.ine2_checks += d.ine2_checks;
  counters_.ine2_violations += d.ine2_violations;
  counters_.ine3_checks += d.ine3_checks;
  counters_.ine3_violations += d.ine3_violations;
  counters_.ratio_checks += d.ratio_checks;
  counters_.ratio_violations += d.ratio_violations;
  counters_.max_ratio = std::max(counters_.max_ratio, d.max_ratio);
  counters_.picard_solves += d.picard_solves;
}

}  // namespace hypman
