#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace consent::network {

/// Simulated time in microseconds.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerMs = 1000;

/// Single-threaded discrete-event scheduler. Events at equal times run in
/// scheduling order, so a run depends only on the order of at() calls.
class Scheduler {
 public:
  explicit Scheduler(SimTime start = 0) : now_(start) {}

  SimTime now() const noexcept { return now_; }

  void at(SimTime when, std::function<void()> fn);
  void after(SimTime delay, std::function<void()> fn) { at(now_ + delay, std::move(fn)); }

  bool empty() const noexcept { return queue_.empty(); }
  std::size_t pending() const noexcept { return queue_.size(); }

  // Runs the earliest event. Returns false when nothing is queued.
  bool step();

  // Runs every event scheduled at or before `until`, then moves the clock
  // to `until` if it is later than the last event.
  void runUntil(SimTime until);

  template <typename Pred>
  bool runWhile(Pred keepGoing) {
    while (keepGoing()) {
      if (!step()) return false;
    }
    return true;
  }

 private:
  struct Event {
    SimTime when;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.when != b.when ? a.when > b.when : a.seq > b.seq;
    }
  };

  SimTime now_;
  std::uint64_t nextSeq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

}  // namespace consent::network
