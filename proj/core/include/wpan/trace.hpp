#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wpan {

enum class RadioState { Tx, Rx, Cca, Idle };

const char* radio_state_name(RadioState s);

/// One simulator event on the symbol clock. Rendered as
/// `<symbol_time> <node> <event> <detail>`.
struct Event {
  std::uint64_t symbol_time;
  std::string node;
  std::string event;
  std::string detail;
};

using EventLog = std::vector<Event>;

std::string format_event(const Event& e);

struct StateInterval {
  RadioState state;
  std::uint64_t start;  // symbols, inclusive
  std::uint64_t end;    // symbols, exclusive
};

/// Builds a gap-free, overlap-free partition of the session span by
/// construction: each set_state() closes the previous interval.
class StateTracker {
 public:
  explicit StateTracker(RadioState initial = RadioState::Idle)
      : current_(initial) {}

  void set_state(std::uint64_t t, RadioState s);
  void finish(std::uint64_t t);

  const std::vector<StateInterval>& intervals() const { return intervals_; }

 private:
  RadioState current_;
  std::uint64_t since_ = 0;
  bool finished_ = false;
  std::vector<StateInterval> intervals_;
};

}  // namespace wpan
