#include "wpan/trace.hpp"

#include <stdexcept>

namespace wpan {

const char* radio_state_name(RadioState s) {
  switch (s) {
    case RadioState::Tx: return "TX";
    case RadioState::Rx: return "RX";
    case RadioState::Cca: return "CCA";
    case RadioState::Idle: return "IDLE";
  }
  return "?";
}

std::string format_event(const Event& e) {
  return std::to_string(e.symbol_time) + " " + e.node + " " + e.event +
         (e.detail.empty() ? "" : " " + e.detail);
}

void StateTracker::set_state(std::uint64_t t, RadioState s) {
  if (finished_) throw std::logic_error("StateTracker already finished");
  if (t < since_) throw std::logic_error("StateTracker time went backwards");
  if (s == current_) return;
  if (t > since_) intervals_.push_back({current_, since_, t});
  current_ = s;
  since_ = t;
}

void StateTracker::finish(std::uint64_t t) {
  if (finished_) return;
  if (t < since_) throw std::logic_error("StateTracker time went backwards");
  if (t > since_) intervals_.push_back({current_, since_, t});
  finished_ = true;
}

}  // namespace wpan
