#include "consent/network/simulator.hpp"

#include <algorithm>

namespace consent::network {

void Scheduler::at(SimTime when, std::function<void()> fn) {
  queue_.push(Event{std::max(when, now_), nextSeq_++, std::move(fn)});
}

bool Scheduler::step() {
  if (queue_.empty()) return false;
  // priority_queue::top is const; the handler is moved out via a copy of the
  // node, which is cheap next to the work the handlers do.
  Event ev = queue_.top();
  queue_.pop();
  now_ = ev.when;
  ev.fn();
  return true;
}

void Scheduler::runUntil(SimTime until) {
  while (!queue_.empty() && queue_.top().when <= until) step();
  now_ = std::max(now_, until);
}

}  // namespace consent::network
