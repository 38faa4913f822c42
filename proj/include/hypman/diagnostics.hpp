#pragma once

#include <cstdint>
#include <mutex>

namespace hypman {

/// Process-wide counters for the runtime certificates (decay bounds and
/// iteration monitors).  Thread-safe; read by tests and the acceptance suite.
struct MonitorCounters {
  std::uint64_t decay_checks = 0;
  std::uint64_t decay_violations = 0;
  std::uint64_t ine1_checks = 0;
  std::uint64_t ine1_violations = 0;
  std::uint64_t ine2_checks = 0;
  std::uint64_t ine2_violations = 0;
  std::uint64_t ine3_checks = 0;
  std::uint64_t ine3_violations = 0;
  std::uint64_t ratio_checks = 0;
  std::uint64_t ratio_violations = 0;
  double max_ratio = 0;
  std::uint64_t picard_solves = 0;
};

class Diagnostics {
 public:
  static Diagnostics& instance();

  MonitorCounters snapshot() const;
  void reset();
  void record_decay(bool ok);
  void merge(const MonitorCounters& delta);

 private:
  mutable std::mutex mutex_;
  MonitorCounters counters_;
};

}  // namespace hypman
