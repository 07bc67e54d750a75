#include "wpan/frame_codec.hpp"

namespace wpan {

namespace {

constexpr std::uint16_t kFcsPoly = 0x8408;  // x^16 + x^12 + x^5 + 1, reflected

std::size_t addr_width(AddrMode mode) {
  switch (mode) {
    case AddrMode::None: return 0;
    case AddrMode::Short: return 2;
    case AddrMode::Extended: return 8;
  }
  return 0;
}

void put_le(Bytes& out, std::uint64_t value, std::size_t octets) {
  for (std::size_t i = 0; i < octets; ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

std::uint64_t get_le(const Bytes& in, std::size_t pos, std::size_t octets) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < octets; ++i) {
    value |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  }
  return value;
}

AddrMode decode_addr_mode(unsigned bits) {
  switch (bits & 0x3) {
    case 0: return AddrMode::None;
    case 2: return AddrMode::Short;
    case 3: return AddrMode::Extended;
    default:
      throw FrameError(FrameError::Code::ReservedAddrMode,
                       "reserved addressing mode 1");
  }
}

// src PAN is elided when intra_pan is set and both addresses are present
bool src_pan_present(const FrameControl& fcf) {
  if (fcf.src_addr_mode == AddrMode::None) return false;
  return !(fcf.intra_pan && fcf.dest_addr_mode != AddrMode::None);
}

void check_addressing(const FrameControl& fcf, const AddressInfo& addr) {
  auto fail = [](const std::string& what) {
    throw FrameError(FrameError::Code::InconsistentAddressing, what);
  };
  if (fcf.frame_type == FrameType::Ack &&
      (fcf.dest_addr_mode != AddrMode::None ||
       fcf.src_addr_mode != AddrMode::None)) {
    fail("Ack frames carry no addresses");
  }
  if (fcf.intra_pan && (fcf.dest_addr_mode == AddrMode::None ||
                        fcf.src_addr_mode == AddrMode::None)) {
    fail("intra_pan requires both addresses present");
  }
  bool want_dest = fcf.dest_addr_mode != AddrMode::None;
  if (want_dest != addr.dest_pan.has_value() ||
      want_dest != addr.dest_addr.has_value()) {
    fail("destination fields inconsistent with FCF dest mode");
  }
  bool want_src = fcf.src_addr_mode != AddrMode::None;
  if (want_src != addr.src_addr.has_value() ||
      src_pan_present(fcf) != addr.src_pan.has_value()) {
    fail("source fields inconsistent with FCF src mode");
  }
  if (fcf.dest_addr_mode == AddrMode::Short && *addr.dest_addr > 0xFFFF) {
    fail("short destination address exceeds 16 bits");
  }
  if (fcf.src_addr_mode == AddrMode::Short && *addr.src_addr > 0xFFFF) {
    fail("short source address exceeds 16 bits");
  }
}

}  // namespace

std::uint16_t FrameControl::to_u16() const {
  std::uint16_t raw = 0;
  raw |= static_cast<std::uint16_t>(frame_type) & 0x7;
  if (security_enabled) raw |= 1u << 3;
  if (frame_pending) raw |= 1u << 4;
  if (ack_request) raw |= 1u << 5;
  if (intra_pan) raw |= 1u << 6;
  raw |= static_cast<std::uint16_t>(dest_addr_mode) << 10;
  raw |= static_cast<std::uint16_t>(src_addr_mode) << 14;
  return raw;
}

FrameControl FrameControl::from_u16(std::uint16_t raw) {
  FrameControl fcf;
  fcf.frame_type = static_cast<FrameType>(raw & 0x3);  // bit 2 reserved here
  fcf.security_enabled = (raw >> 3) & 1;
  fcf.frame_pending = (raw >> 4) & 1;
  fcf.ack_request = (raw >> 5) & 1;
  fcf.intra_pan = (raw >> 6) & 1;
  fcf.dest_addr_mode = decode_addr_mode(raw >> 10);
  fcf.src_addr_mode = decode_addr_mode(raw >> 14);
  return fcf;
}

std::uint16_t compute_fcs(const Bytes& data) {
  FcsAccumulator acc;
  acc.update(data);
  return acc.value();
}

void FcsAccumulator::update(std::uint8_t octet) {
  for (int k = 0; k < 8; ++k) {
    bool bit = (octet >> k) & 1;
    bool lsb = rem_ & 1;
    rem_ >>= 1;
    if (lsb != bit) rem_ ^= kFcsPoly;
  }
}

void FcsAccumulator::update(const Bytes& data) {
  for (std::uint8_t b : data) update(b);
}

std::size_t address_length(const FrameControl& fcf) {
  std::size_t len = 0;
  if (fcf.dest_addr_mode != AddrMode::None) {
    len += 2 + addr_width(fcf.dest_addr_mode);
  }
  if (fcf.src_addr_mode != AddrMode::None) {
    len += (src_pan_present(fcf) ? 2 : 0) + addr_width(fcf.src_addr_mode);
  }
  return len;
}

Bytes build_frame(const FrameControl& fcf, std::uint8_t seq,
                  const AddressInfo& addr, const Bytes& payload) {
  check_addressing(fcf, addr);
  std::size_t total = 3 + address_length(fcf) + payload.size() + 2;
  if (total > kMaxMpduOctets) {
    throw FrameError(FrameError::Code::OversizeFrame,
                     "serialized MPDU exceeds 127 octets");
  }
  Bytes out;
  out.reserve(total);
  put_le(out, fcf.to_u16(), 2);
  out.push_back(seq);
  if (fcf.dest_addr_mode != AddrMode::None) {
    put_le(out, *addr.dest_pan, 2);
    put_le(out, *addr.dest_addr, addr_width(fcf.dest_addr_mode));
  }
  if (fcf.src_addr_mode != AddrMode::None) {
    if (src_pan_present(fcf)) put_le(out, *addr.src_pan, 2);
    put_le(out, *addr.src_addr, addr_width(fcf.src_addr_mode));
  }
  out.insert(out.end(), payload.begin(), payload.end());
  put_le(out, compute_fcs(out), 2);
  return out;
}

Bytes build_ack_for(std::uint8_t seq) {
  FrameControl fcf;
  fcf.frame_type = FrameType::Ack;
  return build_frame(fcf, seq, {}, {});
}

Mpdu parse_mpdu(const Bytes& bytes) {
  if (bytes.size() < kMinMpduOctets) {
    throw FrameError(FrameError::Code::TooShort,
                     "MPDU shorter than 5 octets");
  }
  Bytes body(bytes.begin(), bytes.end() - 2);
  std::uint16_t stored_fcs =
      static_cast<std::uint16_t>(get_le(bytes, bytes.size() - 2, 2));
  if (compute_fcs(body) != stored_fcs) {
    throw FrameError(FrameError::Code::FcsMismatch, "FCS mismatch");
  }
  Mpdu mpdu;
  mpdu.fcf = FrameControl::from_u16(
      static_cast<std::uint16_t>(get_le(bytes, 0, 2)));
  mpdu.seq = bytes[2];
  mpdu.fcs = stored_fcs;
  std::size_t pos = 3;
  std::size_t addr_len = address_length(mpdu.fcf);
  if (pos + addr_len + 2 > bytes.size()) {
    throw FrameError(FrameError::Code::TruncatedAddressing,
                     "frame too short for FCF addressing modes");
  }
  if (mpdu.fcf.dest_addr_mode != AddrMode::None) {
    mpdu.addr.dest_pan = static_cast<std::uint16_t>(get_le(bytes, pos, 2));
    pos += 2;
    std::size_t w = addr_width(mpdu.fcf.dest_addr_mode);
    mpdu.addr.dest_addr = get_le(bytes, pos, w);
    pos += w;
  }
  if (mpdu.fcf.src_addr_mode != AddrMode::None) {
    if (src_pan_present(mpdu.fcf)) {
      mpdu.addr.src_pan = static_cast<std::uint16_t>(get_le(bytes, pos, 2));
      pos += 2;
    }
    std::size_t w = addr_width(mpdu.fcf.src_addr_mode);
    mpdu.addr.src_addr = get_le(bytes, pos, w);
    pos += w;
  }
  mpdu.payload.assign(bytes.begin() + pos, bytes.end() - 2);
  return mpdu;
}

Bytes build_ppdu(const Bytes& mpdu_bytes) {
  if (mpdu_bytes.empty()) {
    throw FrameError(FrameError::Code::UndersizeFrame, "empty MPDU");
  }
  if (mpdu_bytes.size() > kMaxMpduOctets) {
    throw FrameError(FrameError::Code::OversizeFrame,
                     "MPDU exceeds 127 octets");
  }
  Bytes out;
  out.reserve(kPreambleOctets + 2 + mpdu_bytes.size());
  out.insert(out.end(), kPreambleOctets, 0x00);
  out.push_back(kSfd);
  out.push_back(static_cast<std::uint8_t>(mpdu_bytes.size()));
  out.insert(out.end(), mpdu_bytes.begin(), mpdu_bytes.end());
  return out;
}

PpduLocation find_ppdu(const Bytes& stream) {
  for (std::size_t i = 0; i + 2 < stream.size(); ++i) {
    if (stream[i] != 0x00 || stream[i + 1] != kSfd) continue;
    std::uint8_t len = stream[i + 2];
    if (len < 1 || len > kMaxMpduOctets) continue;
    if (i + 3 + len > stream.size()) continue;
    return PpduLocation{i + 3, len};
  }
  throw FrameError(FrameError::Code::NoFrameFound,
                   "no PPDU delimiter in stream");
}

}  // namespace wpan
