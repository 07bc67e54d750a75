#include "wpan/mac.hpp"

#include <algorithm>
#include <stdexcept>

namespace wpan {

void MacConfig::validate() const {
  if (min_be > max_be) {
    throw std::invalid_argument("min_be exceeds max_be");
  }
  if (unit_backoff_period == 0 || turnaround_time == 0 ||
      ack_wait_duration == 0 || cca_duration == 0) {
    throw std::invalid_argument("MAC durations must be positive");
  }
  if (cca_mode != CcaMode::EnergyDetect) {
    throw std::invalid_argument(
        "only energy-detect CCA is implemented");
  }
}

const char* tx_status_name(TxStatus s) {
  switch (s) {
    case TxStatus::Success: return "Success";
    case TxStatus::ChannelAccessFailure: return "ChannelAccessFailure";
    case TxStatus::NoAck: return "NoAck";
  }
  return "?";
}

MacEngine::MacEngine(NodeIdentity self, MacConfig cfg, std::uint64_t seed)
    : self_(self),
      cfg_(cfg),
      backoff_rng_(seed, RngPurpose::Backoff) {
  cfg_.validate();
  Rng seq_rng(seed, RngPurpose::SeqInit);
  seq_counter_ = static_cast<std::uint8_t>(seq_rng.uniform(255));
}

void MacEngine::advance_to(std::uint64_t t) {
  if (t < now_) throw std::logic_error("MAC clock went backwards");
  now_ = t;
}

void MacEngine::set_trace(StateTracker* tracker, EventLog* log,
                          std::string node_name) {
  tracker_ = tracker;
  log_ = log;
  node_name_ = std::move(node_name);
}

void MacEngine::state(RadioState s) {
  if (tracker_) tracker_->set_state(now_, s);
}

void MacEngine::log(const std::string& event, const std::string& detail) {
  if (log_) log_->push_back({now_, node_name_, event, detail});
}

std::uint8_t MacEngine::next_seq() {
  return seq_counter_++;
}

CsmaResult MacEngine::csma_ca(MacChannel& ch) {
  CsmaResult result;
  std::uint64_t start = now_;
  unsigned nb = 0;
  unsigned be = cfg_.min_be;
  while (true) {
    result.be_sequence.push_back(be);
    std::uint64_t periods = backoff_rng_.uniform((1ull << be) - 1);
    std::uint64_t delay = periods * cfg_.unit_backoff_period;
    state(RadioState::Idle);
    log("backoff", "be=" + std::to_string(be) +
                       " periods=" + std::to_string(periods));
    now_ += delay;
    result.backoff_symbols += delay;
    state(RadioState::Cca);
    bool busy = ch.cca_busy(now_, cfg_.cca_duration);
    result.cca_attempts++;
    now_ += cfg_.cca_duration;
    log(busy ? "cca_busy" : "cca_idle");
    if (!busy) {
      result.ok = true;
      break;
    }
    ++nb;
    be = std::min(be + 1, cfg_.max_be);
    if (nb > cfg_.max_csma_backoffs) {
      result.ok = false;
      break;
    }
  }
  result.nb = nb;
  result.symbols_elapsed = now_ - start;
  state(RadioState::Idle);
  return result;
}

TxOutcome MacEngine::mac_send(const Bytes& payload, const NodeIdentity& dest,
                              std::uint8_t seq, MacChannel& ch) {
  FrameControl fcf;
  fcf.frame_type = FrameType::Data;
  fcf.ack_request = true;
  fcf.dest_addr_mode = AddrMode::Short;
  fcf.src_addr_mode = AddrMode::Short;
  fcf.intra_pan = dest.pan_id == self_.pan_id;
  AddressInfo addr;
  addr.dest_pan = dest.pan_id;
  addr.dest_addr = dest.short_addr;
  if (!fcf.intra_pan) addr.src_pan = self_.pan_id;
  addr.src_addr = self_.short_addr;
  Bytes ppdu = build_ppdu(build_frame(fcf, seq, addr, payload));
  std::uint64_t airtime = ppdu_airtime_symbols(ppdu.size());

  TxOutcome outcome;
  for (unsigned attempt = 0; attempt <= cfg_.max_frame_retries; ++attempt) {
    CsmaResult csma = csma_ca(ch);
    outcome.backoff_symbols += csma.backoff_symbols;
    if (!csma.ok) {
      outcome.status = TxStatus::ChannelAccessFailure;
      log("channel_access_failure",
          "cca_attempts=" + std::to_string(csma.cca_attempts));
      state(RadioState::Idle);
      return outcome;
    }
    state(RadioState::Tx);
    log("tx_start", "seq=" + std::to_string(seq) +
                        " octets=" + std::to_string(ppdu.size()));
    ch.transmit_ppdu(now_, ppdu);
    outcome.transmissions++;
    now_ += airtime;
    log("tx_end");
    state(RadioState::Rx);
    std::uint64_t deadline = now_ + cfg_.ack_wait_duration;
    auto rx = ch.receive(now_, deadline);
    bool acked = false;
    if (rx) {
      try {
        PpduLocation loc = find_ppdu(rx->ppdu);
        Bytes mpdu_bytes(rx->ppdu.begin() + loc.mpdu_offset,
                         rx->ppdu.begin() + loc.mpdu_offset +
                             loc.frame_length);
        Mpdu mpdu = parse_mpdu(mpdu_bytes);
        acked = mpdu.fcf.frame_type == FrameType::Ack && mpdu.seq == seq;
      } catch (const FrameError&) {
        // corrupted ack: treat as not received
      }
    }
    if (acked) {
      now_ = std::max(now_, rx->arrival);
      log("ack_rx", "seq=" + std::to_string(seq));
      state(RadioState::Idle);
      outcome.status = TxStatus::Success;
      return outcome;
    }
    now_ = deadline;
    log("ack_timeout", "attempt=" + std::to_string(attempt));
    state(RadioState::Idle);
  }
  outcome.status = TxStatus::NoAck;
  return outcome;
}

RxDisposition MacEngine::mac_on_receive(const Bytes& ppdu_bytes,
                                        MacChannel& ch) {
  RxDisposition disp;
  Mpdu mpdu;
  try {
    PpduLocation loc = find_ppdu(ppdu_bytes);
    Bytes mpdu_bytes(ppdu_bytes.begin() + loc.mpdu_offset,
                     ppdu_bytes.begin() + loc.mpdu_offset + loc.frame_length);
    mpdu = parse_mpdu(mpdu_bytes);
  } catch (const FrameError& e) {
    disp.reason = e.code() == FrameError::Code::FcsMismatch ? "fcs"
                                                            : "malformed";
    log("rx_ignored", disp.reason);
    return disp;
  }
  if (mpdu.fcf.frame_type != FrameType::Data) {
    disp.reason = "frame-type";
    log("rx_ignored", disp.reason);
    return disp;
  }
  bool broadcast = false;
  if (mpdu.fcf.dest_addr_mode != AddrMode::None) {
    std::uint16_t dpan = *mpdu.addr.dest_pan;
    std::uint64_t daddr = *mpdu.addr.dest_addr;
    broadcast = daddr == kBroadcastAddr;
    bool pan_ok = dpan == self_.pan_id || dpan == kBroadcastAddr;
    bool addr_ok = broadcast || (mpdu.fcf.dest_addr_mode == AddrMode::Short &&
                                 daddr == self_.short_addr);
    if (!pan_ok || !addr_ok) {
      disp.reason = "address";
      log("rx_ignored", disp.reason);
      return disp;
    }
  }
  std::uint64_t src = mpdu.addr.src_addr.value_or(0);
  if (mpdu.fcf.ack_request && !broadcast) {
    state(RadioState::Idle);  // rx-to-tx turnaround
    now_ += cfg_.turnaround_time;
    Bytes ack_ppdu = build_ppdu(build_ack_for(mpdu.seq));
    state(RadioState::Tx);
    log("ack_tx", "seq=" + std::to_string(mpdu.seq));
    ch.transmit_ppdu(now_, ack_ppdu);
    now_ += ppdu_airtime_symbols(ack_ppdu.size());
    state(RadioState::Rx);
    disp.ack_sent = true;
  }
  if (last_delivered_ && last_delivered_->first == src &&
      last_delivered_->second == mpdu.seq) {
    disp.reason = "duplicate";
    log("rx_ignored", disp.reason);
    return disp;
  }
  last_delivered_ = {src, mpdu.seq};
  disp.kind = RxDisposition::Kind::Delivered;
  disp.payload = mpdu.payload;
  if (mpdu.addr.src_addr) {
    disp.src = static_cast<std::uint16_t>(*mpdu.addr.src_addr);
  }
  disp.seq = mpdu.seq;
  log("rx_deliver", "seq=" + std::to_string(mpdu.seq) +
                        " octets=" + std::to_string(disp.payload.size()));
  return disp;
}

}  // namespace wpan
