#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "wpan/bytes.hpp"

namespace wpan {

constexpr std::size_t kMinMpduOctets = 5;    // Ack: 2 FCF + 1 seq + 2 FCS
constexpr std::size_t kMaxMpduOctets = 127;
constexpr std::size_t kPreambleOctets = 4;
constexpr std::uint8_t kSfd = 0xA7;
constexpr std::uint16_t kBroadcastAddr = 0xFFFF;

enum class FrameType : std::uint8_t {
  Beacon = 0,
  Data = 1,
  Ack = 2,
  MacCommand = 3,
};

enum class AddrMode : std::uint8_t {
  None = 0,
  Short = 2,     // 16-bit
  Extended = 3,  // 64-bit
};

/// 2-octet frame control field. Bit layout: 0-2 frame type, 3 security,
/// 4 frame pending, 5 ack request, 6 intra-PAN, 10-11 dest addressing mode,
/// 14-15 src addressing mode. Reserved bits are zero on build and ignored
/// on parse.
struct FrameControl {
  FrameType frame_type = FrameType::Data;
  bool security_enabled = false;
  bool frame_pending = false;
  bool ack_request = false;
  bool intra_pan = false;
  AddrMode dest_addr_mode = AddrMode::None;
  AddrMode src_addr_mode = AddrMode::None;

  std::uint16_t to_u16() const;
  static FrameControl from_u16(std::uint16_t raw);  // throws on addr mode 1

  bool operator==(const FrameControl&) const = default;
};

/// Addressing fields. Presence of each field is fully determined by the FCF
/// addressing modes and the intra-PAN flag: a present destination carries
/// dest PAN + dest address; a present source carries src PAN + src address,
/// except that intra-PAN with both addresses present elides the src PAN.
struct AddressInfo {
  std::optional<std::uint16_t> dest_pan;
  std::optional<std::uint64_t> dest_addr;
  std::optional<std::uint16_t> src_pan;
  std::optional<std::uint64_t> src_addr;

  bool operator==(const AddressInfo&) const = default;
};

struct Mpdu {
  FrameControl fcf;
  std::uint8_t seq = 0;
  AddressInfo addr;
  Bytes payload;
  std::uint16_t fcs = 0;
};

class FrameError : public std::runtime_error {
 public:
  enum class Code {
    TooShort,
    FcsMismatch,
    TruncatedAddressing,
    ReservedAddrMode,
    OversizeFrame,
    UndersizeFrame,
    InconsistentAddressing,
    NoFrameFound,
  };

  FrameError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// 16-bit FCS: bit-serial division by x^16 + x^12 + x^5 + 1, initial
/// remainder 0x0000, octets in order, LSB of each octet first.
std::uint16_t compute_fcs(const Bytes& data);

/// Streaming form of compute_fcs; feeding octets one at a time gives the
/// same remainder as one-shot computation over the concatenation.
class FcsAccumulator {
 public:
  void update(std::uint8_t octet);
  void update(const Bytes& data);
  std::uint16_t value() const { return rem_; }

 private:
  std::uint16_t rem_ = 0;
};

/// Serialized octet count of the address fields implied by `fcf`.
std::size_t address_length(const FrameControl& fcf);

/// Serializes FCF (LSB first), seq, address fields (PAN then address, each
/// LSB first, destination before source), payload, FCS (LSB first).
Bytes build_frame(const FrameControl& fcf, std::uint8_t seq,
                  const AddressInfo& addr, const Bytes& payload);

/// 5-octet Ack MPDU echoing `seq`, frame_pending clear.
Bytes build_ack_for(std::uint8_t seq);

/// Exact inverse of build_frame; validates the trailing FCS.
Mpdu parse_mpdu(const Bytes& bytes);

/// Prepends 4 preamble octets 0x00, the SFD 0xA7 and the 7-bit length octet.
Bytes build_ppdu(const Bytes& mpdu_bytes);

struct PpduLocation {
  std::size_t mpdu_offset;  // position just after the length octet
  std::uint8_t frame_length;
};

/// Locates the first >=1 preamble octet followed by the SFD and a length
/// octet in [1,127] with enough remaining octets.
PpduLocation find_ppdu(const Bytes& stream);

}  // namespace wpan
