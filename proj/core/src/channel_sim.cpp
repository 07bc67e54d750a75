#include "wpan/channel_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "wpan/spreading.hpp"

namespace wpan {

namespace {

constexpr double kSecondsPerSymbol = 16e-6;

std::int16_t sat16(long long v) {
  return static_cast<std::int16_t>(std::clamp<long long>(v, -32768, 32767));
}

bool overlaps(const SymbolInterval& iv, std::uint64_t start,
              std::uint64_t end) {
  return iv.start < end && start < iv.end;
}

}  // namespace

const char* impairment_mode_name(ImpairmentMode m) {
  switch (m) {
    case ImpairmentMode::Lossless: return "lossless";
    case ImpairmentMode::ChipFlip: return "chip-flip";
    case ImpairmentMode::SampleAwgn: return "awgn";
  }
  return "?";
}

void ChannelConfig::validate() const {
  if (chip_flip_p < 0.0 || chip_flip_p > 1.0) {
    throw ConfigError("chip_flip_p outside [0, 1]");
  }
  if (awgn_sigma < 0.0) {
    throw ConfigError("awgn_sigma negative");
  }
  for (const auto& iv : busy_schedule) {
    if (iv.end <= iv.start) {
      throw ConfigError("busy interval end not after start");
    }
  }
}

double EnergyModel::current_ma(RadioState s) const {
  switch (s) {
    case RadioState::Tx: return tx_ma;
    case RadioState::Rx: return rx_ma;
    case RadioState::Cca: return cca_ma;
    case RadioState::Idle: return idle_ma;
  }
  return 0.0;
}

EnergyLedger::StateEntry& EnergyLedger::entry(RadioState s) {
  switch (s) {
    case RadioState::Tx: return tx;
    case RadioState::Rx: return rx;
    case RadioState::Cca: return cca;
    default: return idle;
  }
}

const EnergyLedger::StateEntry& EnergyLedger::entry(RadioState s) const {
  return const_cast<EnergyLedger*>(this)->entry(s);
}

std::vector<std::uint8_t> apply_chip_flips(
    const std::vector<std::uint8_t>& chips, double p, Rng& rng,
    std::uint64_t* flips) {
  std::vector<std::uint8_t> out = chips;
  for (auto& c : out) {
    if (rng.uniform_real() < p) {
      c ^= 1;
      if (flips) ++*flips;
    }
  }
  return out;
}

IqBuffer apply_awgn(const IqBuffer& buf, double sigma, Rng& rng) {
  IqBuffer out = buf;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out.i_samples[n] = sat16(
        std::llround(buf.i_samples[n] + sigma * rng.normal()));
    out.q_samples[n] = sat16(
        std::llround(buf.q_samples[n] + sigma * rng.normal()));
  }
  return out;
}

std::vector<std::uint8_t> apply_impairment(
    const std::vector<std::uint8_t>& chips, const ChannelConfig& chan,
    Rng& rng, std::uint64_t* flips) {
  if (chan.mode != ImpairmentMode::ChipFlip) {
    throw ModeMismatch("chip stream offered to a non-ChipFlip channel");
  }
  return apply_chip_flips(chips, chan.chip_flip_p, rng, flips);
}

IqBuffer apply_impairment(const IqBuffer& buf, const ChannelConfig& chan,
                          Rng& rng) {
  if (chan.mode != ImpairmentMode::SampleAwgn) {
    throw ModeMismatch("sample buffer offered to a non-AWGN channel");
  }
  return apply_awgn(buf, chan.awgn_sigma, rng);
}

bool cca_read(const ChannelConfig& chan, std::uint64_t symbol_time,
              double energy_threshold, bool peer_transmitting) {
  for (const auto& iv : chan.busy_schedule) {
    if (symbol_time >= iv.start && symbol_time < iv.end) return true;
  }
  // a transmitting peer radiates unit energy in this model
  if (peer_transmitting && 1.0 > energy_threshold) return true;
  return false;
}

EnergyLedger account_energy(const std::vector<StateInterval>& intervals,
                            const EnergyModel& energy) {
  EnergyLedger ledger;
  for (const auto& iv : intervals) {
    auto& e = ledger.entry(iv.state);
    std::uint64_t symbols = iv.end - iv.start;
    e.symbols += symbols;
    double seconds = symbols * kSecondsPerSymbol;
    e.seconds += seconds;
    e.charge_uc += energy.current_ma(iv.state) * seconds * 1000.0;
  }
  ledger.total_charge_uc = ledger.tx.charge_uc + ledger.rx.charge_uc +
                           ledger.cca.charge_uc + ledger.idle.charge_uc;
  ledger.total_energy_uj = ledger.total_charge_uc * energy.supply_voltage;
  return ledger;
}

namespace {

/// Shared state for one two-node session.
struct SessionState {
  const ChannelConfig& chan;
  ModemConfig modem;
  Rng flip_rng;
  Rng noise_rng;
  std::uint64_t chip_errors = 0;
  unsigned data_attempt = 0;  // global data transmission index
  std::vector<RxDisposition> deliveries;

  explicit SessionState(const ChannelConfig& c)
      : chan(c),
        flip_rng(c.seed, RngPurpose::ChipFlip),
        noise_rng(c.seed, RngPurpose::SampleNoise) {}

  Bytes through_pipeline(const Bytes& ppdu) {
    switch (chan.mode) {
      case ImpairmentMode::Lossless:
        return ppdu;
      case ImpairmentMode::ChipFlip: {
        auto chips = spread_all(octets_to_symbols(ppdu));
        chips = apply_chip_flips(chips, chan.chip_flip_p, flip_rng,
                                 &chip_errors);
        return symbols_to_octets(despread_all(chips));
      }
      case ImpairmentMode::SampleAwgn: {
        auto chips = spread_all(octets_to_symbols(ppdu));
        IqBuffer buf = modulate(chips, modem);
        buf = apply_awgn(buf, chan.awgn_sigma, noise_rng);
        auto rx_chips = demodulate(buf, chips.size(), modem);
        return symbols_to_octets(despread_all(rx_chips));
      }
    }
    return ppdu;
  }
};

/// The transmitter's view of the medium.
class TxChannel : public MacChannel {
 public:
  TxChannel(SessionState& s, MacEngine& rx_mac, MacChannel& rx_channel,
            EventLog& log)
      : s_(s), rx_mac_(rx_mac), rx_channel_(rx_channel), log_(log) {}

  bool cca_busy(std::uint64_t start, std::uint64_t duration) override {
    for (const auto& iv : s_.chan.busy_schedule) {
      if (overlaps(iv, start, start + duration)) return true;
    }
    return false;
  }

  void transmit_ppdu(std::uint64_t start, const Bytes& ppdu) override {
    current_attempt_ = s_.data_attempt++;
    Bytes delivered = s_.through_pipeline(ppdu);
    std::uint64_t rx_done =
        start + ppdu_airtime_symbols(ppdu.size()) + s_.chan.propagation_delay;
    rx_mac_.advance_to(rx_done);
    RxDisposition disp = rx_mac_.mac_on_receive(delivered, rx_channel_);
    if (disp.ack_sent) ++acks_sent_;
    if (disp.kind == RxDisposition::Kind::Delivered) {
      s_.deliveries.push_back(std::move(disp));
    }
  }

  std::optional<RxPpdu> receive(std::uint64_t from,
                                std::uint64_t until) override {
    if (pending_ack_ && pending_ack_->arrival >= from &&
        pending_ack_->arrival <= until) {
      auto ack = *pending_ack_;
      pending_ack_.reset();
      return ack;
    }
    return std::nullopt;
  }

  void deliver_ack(RxPpdu ack) { pending_ack_ = std::move(ack); }
  unsigned current_attempt() const { return current_attempt_; }
  std::uint64_t acks_sent() const { return acks_sent_; }

 private:
  SessionState& s_;
  MacEngine& rx_mac_;
  MacChannel& rx_channel_;
  EventLog& log_;
  std::optional<RxPpdu> pending_ack_;
  unsigned current_attempt_ = 0;
  std::uint64_t acks_sent_ = 0;
};

/// The receiver's view: only used to put Acks on the air.
class RxChannel : public MacChannel {
 public:
  RxChannel(SessionState& s, EventLog& log) : s_(s), log_(log) {}

  void bind_tx(TxChannel* tx) { tx_ = tx; }

  bool cca_busy(std::uint64_t, std::uint64_t) override { return false; }

  void transmit_ppdu(std::uint64_t start, const Bytes& ppdu) override {
    unsigned attempt = tx_->current_attempt();
    bool drop = std::find(s_.chan.ack_drop_pattern.begin(),
                          s_.chan.ack_drop_pattern.end(),
                          attempt) != s_.chan.ack_drop_pattern.end();
    if (drop) {
      log_.push_back({start, "channel", "ack_dropped",
                      "attempt=" + std::to_string(attempt)});
      return;
    }
    Bytes delivered = s_.through_pipeline(ppdu);
    tx_->deliver_ack({delivered, start + ppdu_airtime_symbols(ppdu.size()) +
                                     s_.chan.propagation_delay});
  }

  std::optional<RxPpdu> receive(std::uint64_t, std::uint64_t) override {
    return std::nullopt;
  }

 private:
  SessionState& s_;
  EventLog& log_;
  TxChannel* tx_ = nullptr;
};

}  // namespace

SessionResult run_session(NodeIdentity tx_node, NodeIdentity rx_node,
                          const std::vector<Bytes>& payloads,
                          const ChannelConfig& chan, const MacConfig& mac_cfg,
                          const EnergyModel& energy) {
  chan.validate();
  mac_cfg.validate();

  SessionResult result;
  SessionState state(chan);

  MacEngine tx_mac(tx_node, mac_cfg, chan.seed ^ 0x74780001);
  MacEngine rx_mac(rx_node, mac_cfg, chan.seed ^ 0x72780002);
  StateTracker tx_tracker(RadioState::Idle);
  StateTracker rx_tracker(RadioState::Rx);
  tx_mac.set_trace(&tx_tracker, &result.log, "tx");
  rx_mac.set_trace(&rx_tracker, &result.log, "rx");

  RxChannel rx_channel(state, result.log);
  TxChannel tx_channel(state, rx_mac, rx_channel, result.log);
  rx_channel.bind_tx(&tx_channel);

  result.stats.frames_sent = payloads.size();
  double airtime_total_s = 0.0;
  std::vector<std::pair<std::uint8_t, const Bytes*>> sent_by_seq;

  for (const Bytes& payload : payloads) {
    std::uint8_t seq = tx_mac.next_seq();
    sent_by_seq.emplace_back(seq, &payload);
    // airtime of the (uncorrupted) data PPDU for the stats report
    std::size_t addr_len = tx_node.pan_id == rx_node.pan_id ? 6 : 8;
    std::size_t mpdu_len = 3 + addr_len + payload.size() + 2;
    airtime_total_s +=
        ppdu_airtime_symbols(mpdu_len + 6) * kSecondsPerSymbol;
    TxOutcome outcome = tx_mac.mac_send(payload, rx_node, seq, tx_channel);
    result.outcomes.push_back(outcome);
    if (outcome.transmissions > 1) {
      result.stats.retransmissions += outcome.transmissions - 1;
    }
  }

  result.stats.frames_delivered = state.deliveries.size();
  result.stats.acks_sent = tx_channel.acks_sent();

  // payload bit errors over delivered frames (FCS-validated, so normally 0)
  std::uint64_t delivered_bit_errors = 0;
  std::uint64_t delivered_bits = 0;
  for (const RxDisposition& d : state.deliveries) {
    auto it = std::find_if(sent_by_seq.begin(), sent_by_seq.end(),
                           [&](const auto& p) { return p.first == d.seq; });
    if (it == sent_by_seq.end()) continue;
    const Bytes& sent = *it->second;
    delivered_bits += sent.size() * 8;
    for (std::size_t i = 0; i < std::min(sent.size(), d.payload.size());
         ++i) {
      delivered_bit_errors +=
          std::popcount(static_cast<unsigned>(sent[i] ^ d.payload[i]));
    }
    if (sent.size() != d.payload.size()) {
      delivered_bit_errors +=
          8 * (std::max(sent.size(), d.payload.size()) -
               std::min(sent.size(), d.payload.size()));
    }
  }

  std::uint64_t span = std::max(tx_mac.now(), rx_mac.now());
  tx_tracker.finish(span);
  rx_tracker.finish(span);
  result.span_symbols = span;
  result.tx_ledger = account_energy(tx_tracker.intervals(), energy);
  result.rx_ledger = account_energy(rx_tracker.intervals(), energy);

  result.stats.chip_errors_injected = state.chip_errors;
  result.stats.per =
      result.stats.frames_sent == 0
          ? 0.0
          : static_cast<double>(result.stats.frames_sent -
                                std::min(result.stats.frames_delivered,
                                         result.stats.frames_sent)) /
                static_cast<double>(result.stats.frames_sent);
  result.stats.ber = delivered_bits == 0
                         ? 0.0
                         : static_cast<double>(delivered_bit_errors) /
                               static_cast<double>(delivered_bits);
  result.stats.airtime_per_frame_s =
      payloads.empty() ? 0.0 : airtime_total_s / payloads.size();
  return result;
}

}  // namespace wpan
