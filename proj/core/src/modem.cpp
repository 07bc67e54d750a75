#include "wpan/modem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wpan/spreading.hpp"

namespace wpan {

namespace {

constexpr double kCarrierScale = 32768.0;  // carriers stored as Q1.15
constexpr int kPreambleScoreMin = 27;      // of 32 chips
constexpr std::size_t kMaxPreambleSymbols = 8;

std::int16_t sat16(long long v) {
  return static_cast<std::int16_t>(std::clamp<long long>(v, -32768, 32767));
}

std::size_t samples_needed(std::size_t chip_count) {
  // last Q chip ends 2 samples past the last I block
  return chip_count == 0 ? 0
                         : kSamplesPerChip * chip_count + kQDelaySamples;
}

// Matched-filter decision for one chip. Channel chip j sits at
// base + 4j on I, base + 4j + 2 on Q.
std::uint8_t decide_chip(const IqBuffer& buf, std::size_t base,
                         std::size_t chip_index,
                         const std::array<std::int16_t, 4>& pulse) {
  bool is_q = chip_index % 2 != 0;
  std::size_t j = chip_index / 2;
  std::size_t start = base + kSamplesPerHalfSine * j + (is_q ? kQDelaySamples : 0);
  const auto& channel = is_q ? buf.q_samples : buf.i_samples;
  long long corr = 0;
  for (std::size_t k = 0; k < kSamplesPerHalfSine; ++k) {
    corr += static_cast<long long>(channel[start + k]) * pulse[k];
  }
  return corr > 0 ? 1 : 0;
}

DespreadResult despread_at(const IqBuffer& buf, std::size_t offset,
                           const std::array<std::int16_t, 4>& pulse) {
  ChipSequence chips;
  for (std::size_t c = 0; c < kChipsPerSymbol; ++c) {
    chips[c] = decide_chip(buf, offset, c, pulse);
  }
  return despread(chips);
}

void write_sidecar(const std::string& path, std::uint32_t sample_rate,
                   const ModemConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sidecar: " + path);
  out << "sample_rate=" << sample_rate << "\n"
      << "chip_rate=" << cfg.chip_rate << "\n"
      << "amplitude=" << cfg.amplitude << "\n"
      << "if_frequency=" << cfg.if_freq() << "\n";
}

ModemConfig read_sidecar(const std::string& path, std::uint32_t& sample_rate) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read sidecar: " + path);
  ModemConfig cfg;
  sample_rate = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "sample_rate") sample_rate = std::stoul(val);
    else if (key == "chip_rate") cfg.chip_rate = std::stoul(val);
    else if (key == "amplitude") cfg.amplitude = static_cast<std::int16_t>(std::stoi(val));
    else if (key == "if_frequency") cfg.if_frequency = std::stod(val);
    else throw std::runtime_error("unknown sidecar key: " + key);
  }
  if (sample_rate == 0) sample_rate = cfg.sample_rate();
  return cfg;
}

std::vector<std::int16_t> read_i16_le(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  std::vector<std::int16_t> out(raw.size() / 2);
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = static_cast<std::int16_t>(
        static_cast<std::uint8_t>(raw[2 * n]) |
        (static_cast<std::uint8_t>(raw[2 * n + 1]) << 8));
  }
  return out;
}

void write_i16_le(std::ofstream& out, std::int16_t v) {
  char b[2] = {static_cast<char>(v & 0xFF),
               static_cast<char>((v >> 8) & 0xFF)};
  out.write(b, 2);
}

}  // namespace

std::array<std::int16_t, kSamplesPerHalfSine> half_sine_pulse(
    std::int16_t amplitude) {
  std::array<std::int16_t, kSamplesPerHalfSine> pulse;
  for (std::size_t k = 0; k < kSamplesPerHalfSine; ++k) {
    double phase = std::numbers::pi * (static_cast<double>(k) + 0.5) /
                   static_cast<double>(kSamplesPerHalfSine);
    pulse[k] = static_cast<std::int16_t>(
        std::lround(amplitude * std::sin(phase)));
  }
  return pulse;
}

IqBuffer modulate(const std::vector<std::uint8_t>& chips,
                  const ModemConfig& cfg) {
  std::vector<std::uint8_t> padded = chips;
  IqBuffer buf;
  buf.sample_rate = cfg.sample_rate();
  if (padded.size() % 2 != 0) {
    padded.push_back(0);
    buf.odd_chip_padded = true;
  }
  std::size_t pairs = padded.size() / 2;
  std::size_t len = kSamplesPerHalfSine * pairs + kQDelaySamples;
  buf.i_samples.assign(len, 0);
  buf.q_samples.assign(len, 0);
  auto pulse = half_sine_pulse(cfg.amplitude);
  for (std::size_t j = 0; j < pairs; ++j) {
    int i_sign = padded[2 * j] ? 1 : -1;
    int q_sign = padded[2 * j + 1] ? 1 : -1;
    for (std::size_t k = 0; k < kSamplesPerHalfSine; ++k) {
      buf.i_samples[kSamplesPerHalfSine * j + k] =
          static_cast<std::int16_t>(i_sign * pulse[k]);
      buf.q_samples[kSamplesPerHalfSine * j + kQDelaySamples + k] =
          static_cast<std::int16_t>(q_sign * pulse[k]);
    }
  }
  return buf;
}

std::vector<std::int16_t> mix_up(const IqBuffer& buf,
                                 const ModemConfig& cfg) {
  double omega = 2.0 * std::numbers::pi * cfg.if_freq() / buf.sample_rate;
  std::vector<std::int16_t> out(buf.size());
  for (std::size_t n = 0; n < buf.size(); ++n) {
    long long c = std::llround(kCarrierScale * std::cos(omega * n));
    long long s = std::llround(kCarrierScale * std::sin(omega * n));
    long long acc = static_cast<long long>(buf.i_samples[n]) * c -
                    static_cast<long long>(buf.q_samples[n]) * s;
    out[n] = sat16(std::llround(acc / kCarrierScale));
  }
  return out;
}

IqBuffer mix_down(const std::vector<std::int16_t>& passband,
                  const ModemConfig& cfg) {
  std::size_t len = passband.size();
  std::uint32_t fs = cfg.sample_rate();
  double omega = 2.0 * std::numbers::pi * cfg.if_freq() / fs;
  std::vector<double> yi(len), yq(len);
  for (std::size_t n = 0; n < len; ++n) {
    double c = std::cos(omega * n);
    double s = std::sin(omega * n);
    yi[n] = 2.0 * passband[n] * c;
    yq[n] = -2.0 * passband[n] * s;
  }
  // 4-tap moving average centered on [n-1, n+2]
  IqBuffer buf;
  buf.sample_rate = fs;
  buf.i_samples.resize(len);
  buf.q_samples.resize(len);
  auto avg = [len](const std::vector<double>& y, std::size_t n) {
    double sum = 0.0;
    for (long long k = static_cast<long long>(n) - 1;
         k <= static_cast<long long>(n) + 2; ++k) {
      if (k >= 0 && k < static_cast<long long>(len)) sum += y[k];
    }
    return sum / 4.0;
  };
  for (std::size_t n = 0; n < len; ++n) {
    buf.i_samples[n] = sat16(std::llround(avg(yi, n)));
    buf.q_samples[n] = sat16(std::llround(avg(yq, n)));
  }
  return buf;
}

std::vector<std::uint8_t> demodulate(const IqBuffer& buf,
                                     std::size_t chip_count,
                                     const ModemConfig& cfg) {
  if (buf.size() < samples_needed(chip_count)) {
    throw ModemError(ModemError::Code::BufferTooShort,
                     "buffer shorter than chip timing requires");
  }
  auto pulse = half_sine_pulse(cfg.amplitude);
  std::vector<std::uint8_t> chips(chip_count);
  for (std::size_t c = 0; c < chip_count; ++c) {
    chips[c] = decide_chip(buf, 0, c, pulse);
  }
  return chips;
}

std::size_t acquire(const IqBuffer& buf, const ModemConfig& cfg) {
  auto pulse = half_sine_pulse(cfg.amplitude);
  std::size_t len = buf.size();
  // 4 preamble symbols + the 2 SFD symbols is the minimum lock pattern
  std::size_t min_span = 6 * kSamplesPerSymbol + kQDelaySamples;
  for (std::size_t off = 0; min_span <= len && off + min_span <= len;
       off += kSamplesPerChip) {
    std::size_t zeros = 0;
    while (zeros < kMaxPreambleSymbols &&
           off + (zeros + 1) * kSamplesPerSymbol + kQDelaySamples <= len) {
      DespreadResult r =
          despread_at(buf, off + zeros * kSamplesPerSymbol, pulse);
      if (r.symbol != 0 || r.score < kPreambleScoreMin) break;
      ++zeros;
    }
    if (zeros < 4) continue;
    std::size_t sfd_off = off + zeros * kSamplesPerSymbol;
    if (sfd_off + 2 * kSamplesPerSymbol + kQDelaySamples > len) continue;
    if (despread_at(buf, sfd_off, pulse).symbol != 7) continue;
    if (despread_at(buf, sfd_off + kSamplesPerSymbol, pulse).symbol != 10) {
      continue;
    }
    return off;
  }
  throw ModemError(ModemError::Code::AcquisitionFailed,
                   "no preamble/SFD lock");
}

void write_iq_file(const std::string& path, const IqBuffer& buf,
                   const ModemConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write I/Q file: " + path);
  for (std::size_t n = 0; n < buf.size(); ++n) {
    write_i16_le(out, buf.i_samples[n]);
    write_i16_le(out, buf.q_samples[n]);
  }
  out.close();
  write_sidecar(path + ".meta", buf.sample_rate, cfg);
}

IqBuffer read_iq_file(const std::string& path, ModemConfig& cfg_out) {
  std::uint32_t sample_rate = 0;
  cfg_out = read_sidecar(path + ".meta", sample_rate);
  std::vector<std::int16_t> flat = read_i16_le(path);
  IqBuffer buf;
  buf.sample_rate = sample_rate;
  buf.i_samples.reserve(flat.size() / 2);
  buf.q_samples.reserve(flat.size() / 2);
  for (std::size_t n = 0; n + 1 < flat.size(); n += 2) {
    buf.i_samples.push_back(flat[n]);
    buf.q_samples.push_back(flat[n + 1]);
  }
  return buf;
}

void write_passband_file(const std::string& path,
                         const std::vector<std::int16_t>& samples,
                         const ModemConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write passband file: " + path);
  for (std::int16_t v : samples) write_i16_le(out, v);
  out.close();
  write_sidecar(path + ".meta", cfg.sample_rate(), cfg);
}

std::vector<std::int16_t> read_passband_file(const std::string& path,
                                             ModemConfig& cfg_out) {
  std::uint32_t sample_rate = 0;
  cfg_out = read_sidecar(path + ".meta", sample_rate);
  return read_i16_le(path);
}

}  // namespace wpan
