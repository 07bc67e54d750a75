#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpan/bytes.hpp"
#include "wpan/frame_codec.hpp"
#include "wpan/rng.hpp"
#include "wpan/trace.hpp"

namespace wpan {

/// Symbols per transmitted octet: 250 kb/s over 62.5 ksymbol/s.
constexpr std::uint64_t kSymbolsPerOctetAir = 2;
/// Symbol period in microseconds (62.5 ksymbol/s).
constexpr std::uint64_t kSymbolMicros = 16;

enum class CcaMode { EnergyDetect, CarrierSense, CarrierAndEnergy };

struct MacConfig {
  unsigned min_be = 3;
  unsigned max_be = 5;
  unsigned max_csma_backoffs = 4;
  unsigned max_frame_retries = 3;
  std::uint64_t unit_backoff_period = 20;  // symbols
  std::uint64_t turnaround_time = 12;      // symbols
  std::uint64_t ack_wait_duration = 54;    // symbols
  std::uint64_t cca_duration = 8;          // symbols
  double cca_threshold = 0.0;
  CcaMode cca_mode = CcaMode::EnergyDetect;

  /// Throws std::invalid_argument on min_be > max_be, a zero duration, or
  /// a CCA mode other than energy detection (recognized but unimplemented).
  void validate() const;
};

struct NodeIdentity {
  std::uint16_t pan_id = 0;
  std::uint16_t short_addr = 0;
};

enum class TxStatus { Success, ChannelAccessFailure, NoAck };

const char* tx_status_name(TxStatus s);

struct TxOutcome {
  TxStatus status = TxStatus::Success;
  unsigned transmissions = 0;
  std::uint64_t backoff_symbols = 0;
};

struct CsmaResult {
  bool ok = false;
  std::uint64_t symbols_elapsed = 0;
  unsigned nb = 0;            // number of failed backoff rounds
  unsigned cca_attempts = 0;
  std::uint64_t backoff_symbols = 0;
  std::vector<unsigned> be_sequence;  // BE used at each attempt
};

/// What the MAC engine asks of the medium. Implemented by the channel
/// simulator and by scripted test doubles; all times are on the shared
/// symbol clock.
class MacChannel {
 public:
  virtual ~MacChannel() = default;

  /// Energy detected above threshold anywhere in [start, start+duration)?
  virtual bool cca_busy(std::uint64_t start, std::uint64_t duration) = 0;

  /// Puts a PPDU on the air at `start`; airtime is octets * 2 symbols.
  virtual void transmit_ppdu(std::uint64_t start, const Bytes& ppdu) = 0;

  struct RxPpdu {
    Bytes ppdu;
    std::uint64_t arrival;  // symbol time reception completes
  };

  /// First PPDU whose reception completes in [from, until], if any.
  virtual std::optional<RxPpdu> receive(std::uint64_t from,
                                        std::uint64_t until) = 0;
};

struct RxDisposition {
  enum class Kind { Delivered, Ignored };
  Kind kind = Kind::Ignored;
  bool ack_sent = false;
  std::string reason;  // set on Ignored
  Bytes payload;
  std::optional<std::uint16_t> src;
  std::uint8_t seq = 0;
};

/// Point-to-point MAC engine: unslotted CSMA-CA, acknowledged data
/// transfer with retransmission, receive filtering, Ack generation and
/// duplicate rejection. Owns its position on the symbol clock.
class MacEngine {
 public:
  MacEngine(NodeIdentity self, MacConfig cfg, std::uint64_t seed);

  std::uint64_t now() const { return now_; }
  void advance_to(std::uint64_t t);

  const NodeIdentity& self() const { return self_; }
  const MacConfig& config() const { return cfg_; }

  /// Optional trace hookup; pointers must outlive the engine's use.
  void set_trace(StateTracker* tracker, EventLog* log,
                 std::string node_name);

  std::uint8_t next_seq();

  CsmaResult csma_ca(MacChannel& ch);

  TxOutcome mac_send(const Bytes& payload, const NodeIdentity& dest,
                     std::uint8_t seq, MacChannel& ch);

  RxDisposition mac_on_receive(const Bytes& ppdu_bytes, MacChannel& ch);

 private:
  void state(RadioState s);
  void log(const std::string& event, const std::string& detail = "");

  NodeIdentity self_;
  MacConfig cfg_;
  Rng backoff_rng_;
  std::uint8_t seq_counter_;
  std::uint64_t now_ = 0;
  std::optional<std::pair<std::uint64_t, std::uint8_t>> last_delivered_;
  StateTracker* tracker_ = nullptr;
  EventLog* log_ = nullptr;
  std::string node_name_ = "node";
};

/// Airtime of a PPDU in symbols.
inline std::uint64_t ppdu_airtime_symbols(std::size_t ppdu_octets) {
  return ppdu_octets * kSymbolsPerOctetAir;
}

}  // namespace wpan
