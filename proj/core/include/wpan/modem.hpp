#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpan {

constexpr std::size_t kSamplesPerChip = 2;       // two samples per chip period
constexpr std::size_t kSamplesPerHalfSine = 4;   // each half-sine spans 2 Tc
constexpr std::size_t kQDelaySamples = 2;        // O-QPSK offset = Tc
constexpr std::size_t kSamplesPerSymbol = 64;    // 32 chips * 2 samples

struct ModemConfig {
  std::uint32_t chip_rate = 2'000'000;  // chips/s
  std::int16_t amplitude = 23170;       // ~0.707 full scale
  double if_frequency = 0.0;            // 0 selects sample_rate/4

  std::uint32_t sample_rate() const { return 2 * chip_rate; }
  double if_freq() const {
    return if_frequency > 0.0 ? if_frequency : sample_rate() / 4.0;
  }
};

struct IqBuffer {
  std::vector<std::int16_t> i_samples;
  std::vector<std::int16_t> q_samples;
  std::uint32_t sample_rate = 4'000'000;
  bool odd_chip_padded = false;  // a trailing zero chip was appended

  std::size_t size() const { return i_samples.size(); }
};

class ModemError : public std::runtime_error {
 public:
  enum class Code { BufferTooShort, AcquisitionFailed };

  ModemError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// The 4-sample half-sine block for a chip of value 1 at the given peak:
/// round(A * sin(pi * (k + 0.5) / 4)) for k = 0..3.
std::array<std::int16_t, kSamplesPerHalfSine> half_sine_pulse(
    std::int16_t amplitude);

/// O-QPSK half-sine modulation. Even-indexed chips drive I, odd-indexed
/// chips drive Q; chip 1 maps to a positive half-sine, chip 0 to a negative
/// one; the Q stream lags I by exactly 2 samples. An odd chip count gets a
/// trailing zero chip (flagged in the result).
IqBuffer modulate(const std::vector<std::uint8_t>& chips,
                  const ModemConfig& cfg);

/// Quadrature up-conversion to a real passband stream:
/// out[n] = round((i[n]*C[n] - q[n]*S[n]) / 2^15) with 16-bit saturation,
/// where C/S are the carrier scaled by 2^15.
std::vector<std::int16_t> mix_up(const IqBuffer& buf, const ModemConfig& cfg);

/// Quadrature down-conversion: multiplies by the same carriers (gain 2) and
/// applies a 4-tap moving average. Chip decisions survive a round trip
/// through mix_up exactly; sample values are recovered only for content that
/// varies slowly against the carrier.
IqBuffer mix_down(const std::vector<std::int16_t>& passband,
                  const ModemConfig& cfg);

/// Per-chip matched filter with hard sign decision (ties resolve to 0).
/// The buffer must start chip-aligned; acquisition is acquire()'s job.
std::vector<std::uint8_t> demodulate(const IqBuffer& buf,
                                     std::size_t chip_count,
                                     const ModemConfig& cfg);

/// Slides a symbol-0 correlator over chip-aligned offsets and returns the
/// earliest sample offset where at least 4 consecutive symbol-0 detections
/// are followed by the SFD symbol pair [7, 10]. The offset points at the
/// first preamble sample.
std::size_t acquire(const IqBuffer& buf, const ModemConfig& cfg);

/// I/Q file: interleaved signed 16-bit little-endian pairs (I then Q), with
/// a key=value sidecar at <path>.meta (sample_rate, chip_rate, amplitude,
/// if_frequency).
void write_iq_file(const std::string& path, const IqBuffer& buf,
                   const ModemConfig& cfg);
IqBuffer read_iq_file(const std::string& path, ModemConfig& cfg_out);

/// Passband file: bare signed 16-bit little-endian samples, same sidecar.
void write_passband_file(const std::string& path,
                         const std::vector<std::int16_t>& samples,
                         const ModemConfig& cfg);
std::vector<std::int16_t> read_passband_file(const std::string& path,
                                             ModemConfig& cfg_out);

}  // namespace wpan
