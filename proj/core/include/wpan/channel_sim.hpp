#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpan/bytes.hpp"
#include "wpan/mac.hpp"
#include "wpan/modem.hpp"
#include "wpan/rng.hpp"
#include "wpan/trace.hpp"

namespace wpan {

enum class ImpairmentMode { Lossless, ChipFlip, SampleAwgn };

const char* impairment_mode_name(ImpairmentMode m);

struct SymbolInterval {
  std::uint64_t start;  // inclusive
  std::uint64_t end;    // exclusive
};

struct ChannelConfig {
  ImpairmentMode mode = ImpairmentMode::Lossless;
  double chip_flip_p = 0.0;
  double awgn_sigma = 0.0;
  std::vector<unsigned> ack_drop_pattern;  // global transmission indices
  std::vector<SymbolInterval> busy_schedule;
  std::uint64_t seed = 0;
  std::uint64_t propagation_delay = 0;  // symbols

  void validate() const;  // throws ConfigError
};

struct EnergyModel {
  double tx_ma = 17.4;
  double rx_ma = 19.7;
  double cca_ma = 19.7;
  double idle_ma = 0.02;
  double supply_voltage = 3.0;

  double current_ma(RadioState s) const;
};

struct EnergyLedger {
  struct StateEntry {
    std::uint64_t symbols = 0;
    double seconds = 0.0;
    double charge_uc = 0.0;  // microcoulombs
  };
  StateEntry tx, rx, cca, idle;
  double total_charge_uc = 0.0;
  double total_energy_uj = 0.0;  // microjoules at the supply voltage

  StateEntry& entry(RadioState s);
  const StateEntry& entry(RadioState s) const;
};

struct LinkStats {
  std::uint64_t frames_sent = 0;       // data frames offered
  std::uint64_t frames_delivered = 0;
  std::uint64_t acks_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t chip_errors_injected = 0;
  double per = 0.0;  // delivered-failure fraction
  double ber = 0.0;  // payload bit error fraction over delivered frames
  double airtime_per_frame_s = 0.0;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what)
      : std::runtime_error(what) {}
};

class ModeMismatch : public std::runtime_error {
 public:
  explicit ModeMismatch(const std::string& what)
      : std::runtime_error(what) {}
};

struct SessionResult {
  LinkStats stats;
  EnergyLedger tx_ledger;
  EnergyLedger rx_ledger;
  EventLog log;
  std::vector<TxOutcome> outcomes;
  std::uint64_t span_symbols = 0;
};

/// Flips each chip independently with probability p. Counts flips into
/// *flips when non-null.
std::vector<std::uint8_t> apply_chip_flips(
    const std::vector<std::uint8_t>& chips, double p, Rng& rng,
    std::uint64_t* flips = nullptr);

/// Adds seeded Gaussian noise of the given sigma to every I and Q sample
/// with saturating 16-bit arithmetic.
IqBuffer apply_awgn(const IqBuffer& buf, double sigma, Rng& rng);

/// Signal-kind dispatch per the configured mode; throws ModeMismatch when
/// the signal kind does not match (chips for ChipFlip, samples for
/// SampleAwgn).
std::vector<std::uint8_t> apply_impairment(
    const std::vector<std::uint8_t>& chips, const ChannelConfig& chan,
    Rng& rng, std::uint64_t* flips = nullptr);
IqBuffer apply_impairment(const IqBuffer& buf, const ChannelConfig& chan,
                          Rng& rng);

/// Busy iff symbol_time falls inside a scheduled busy interval or a peer
/// transmission's energy exceeds the threshold.
bool cca_read(const ChannelConfig& chan, std::uint64_t symbol_time,
              double energy_threshold, bool peer_transmitting = false);

/// Charge per state = current * seconds in state; 16 us per symbol.
EnergyLedger account_energy(const std::vector<StateInterval>& intervals,
                            const EnergyModel& energy);

/// Runs the full two-node session: for each payload the transmitter runs
/// CSMA-CA + data/ACK with retransmission; every transmission goes through
/// the full codec/spreading/modem pipeline under ChipFlip or SampleAwgn,
/// or byte passthrough under Lossless. Deterministic given the seed.
SessionResult run_session(NodeIdentity tx_node, NodeIdentity rx_node,
                          const std::vector<Bytes>& payloads,
                          const ChannelConfig& chan, const MacConfig& mac_cfg,
                          const EnergyModel& energy);

}  // namespace wpan
