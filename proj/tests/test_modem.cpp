#include <doctest.h>

#include <cmath>
#include <random>

#include "wpan/channel_sim.hpp"
#include "wpan/modem.hpp"
#include "wpan/rng.hpp"
#include "wpan/spreading.hpp"

using namespace wpan;

namespace {

std::vector<std::uint8_t> random_chips(std::size_t n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<std::uint8_t> chips(n);
  for (auto& c : chips) c = gen() % 2;
  return chips;
}

}  // namespace

TEST_CASE("half-sine pulse golden samples") {
  // round(23170 * sin(pi * (k + 0.5) / 4)), pinned from high-precision
  // evaluation of the phase formula
  auto pulse = half_sine_pulse(23170);
  CHECK(pulse[0] == 8867);
  CHECK(pulse[1] == 21406);
  CHECK(pulse[2] == 21406);
  CHECK(pulse[3] == 8867);
}

TEST_CASE("modulate buffer length and structure") {
  ModemConfig cfg;
  auto chips = random_chips(32, 1);  // one symbol
  IqBuffer buf = modulate(chips, cfg);
  CHECK(buf.i_samples.size() == 66);  // 16 chips/channel * 4 + 2
  CHECK(buf.q_samples.size() == 66);
  CHECK(buf.sample_rate == 4'000'000);
  CHECK_FALSE(buf.odd_chip_padded);

  // single I chip of value 1: the golden pulse, then the Q pad
  IqBuffer one = modulate({1, 0}, cfg);
  auto pulse = half_sine_pulse(cfg.amplitude);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(one.i_samples[k] == pulse[k]);
    CHECK(one.q_samples[k + 2] == -pulse[k]);
  }
  // chip value 0 negates the block exactly
  IqBuffer zero = modulate({0, 1}, cfg);
  for (std::size_t k = 0; k < one.i_samples.size(); ++k) {
    CHECK(zero.i_samples[k] == -one.i_samples[k]);
    CHECK(zero.q_samples[k] == -one.q_samples[k]);
  }
}

TEST_CASE("odd chip count pads a trailing zero chip") {
  ModemConfig cfg;
  IqBuffer buf = modulate({1, 0, 1}, cfg);
  CHECK(buf.odd_chip_padded);
  CHECK(buf.i_samples.size() == 2 * 4 + 2);
}

TEST_CASE("complemented chips negate both channels") {
  ModemConfig cfg;
  auto chips = random_chips(128, 3);
  auto flipped = chips;
  for (auto& c : flipped) c ^= 1;
  IqBuffer a = modulate(chips, cfg);
  IqBuffer b = modulate(flipped, cfg);
  REQUIRE(a.i_samples.size() == b.i_samples.size());
  for (std::size_t n = 0; n < a.i_samples.size(); ++n) {
    CHECK(a.i_samples[n] == -b.i_samples[n]);
    CHECK(a.q_samples[n] == -b.q_samples[n]);
  }
}

TEST_CASE("Q channel lags I by exactly two samples") {
  ModemConfig cfg;
  // same chip pattern on both channels: q must equal i delayed by 2
  std::vector<std::uint8_t> chips;
  std::mt19937 gen(5);
  for (int j = 0; j < 64; ++j) {
    std::uint8_t v = gen() % 2;
    chips.push_back(v);
    chips.push_back(v);
  }
  IqBuffer buf = modulate(chips, cfg);
  long long best_lag = -1;
  double best = -1e18;
  for (long long lag = 0; lag <= 4; ++lag) {
    double corr = 0;
    for (std::size_t n = 0; n + lag < buf.q_samples.size(); ++n) {
      corr += static_cast<double>(buf.i_samples[n]) * buf.q_samples[n + lag];
    }
    if (corr > best) {
      best = corr;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 2);
}

TEST_CASE("noiseless demodulation is the identity") {
  ModemConfig cfg;
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    auto chips = random_chips(64 + seed * 32, seed);
    CHECK(demodulate(modulate(chips, cfg), chips.size(), cfg) == chips);
  }
}

TEST_CASE("demodulation survives AWGN at amplitude/20") {
  ModemConfig cfg;
  double sigma = cfg.amplitude / 20.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto chips = random_chips(256, static_cast<std::uint32_t>(seed) + 100);
    IqBuffer buf = modulate(chips, cfg);
    Rng rng(seed, RngPurpose::SampleNoise);
    IqBuffer noisy = apply_awgn(buf, sigma, rng);
    CHECK(demodulate(noisy, chips.size(), cfg) == chips);
  }
}

TEST_CASE("all-zero buffer demodulates to all-zero chips") {
  ModemConfig cfg;
  IqBuffer buf;
  buf.i_samples.assign(130, 0);
  buf.q_samples.assign(130, 0);
  auto chips = demodulate(buf, 64, cfg);
  for (auto c : chips) CHECK(c == 0);
}

TEST_CASE("demodulate rejects short buffers") {
  ModemConfig cfg;
  IqBuffer buf = modulate(random_chips(64, 9), cfg);
  buf.i_samples.resize(buf.i_samples.size() - 4);
  buf.q_samples.resize(buf.q_samples.size() - 4);
  CHECK_THROWS_AS(demodulate(buf, 64, cfg), ModemError);
}

TEST_CASE("mix_up quarter-rate carrier zeroes odd samples") {
  ModemConfig cfg;
  IqBuffer buf;
  buf.sample_rate = cfg.sample_rate();
  buf.i_samples = {1000, 2000, -3000, 4000, 5000, -6000, 7000, 8000};
  buf.q_samples.assign(8, 0);
  auto out = mix_up(buf, cfg);
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (n % 2 == 1) {
      CHECK(out[n] == 0);
    } else {
      int sign = (n % 4 == 0) ? 1 : -1;
      CHECK(out[n] == sign * buf.i_samples[n]);
    }
  }
}

TEST_CASE("mix_up of silence is silence") {
  ModemConfig cfg;
  IqBuffer buf;
  buf.i_samples.assign(32, 0);
  buf.q_samples.assign(32, 0);
  for (auto v : mix_up(buf, cfg)) CHECK(v == 0);
  for (auto v : mix_down(std::vector<std::int16_t>(32, 0), cfg).i_samples) {
    CHECK(v == 0);
  }
}

TEST_CASE("mix_up/mix_down round-trip recovers chips exactly") {
  ModemConfig cfg;
  for (std::uint32_t seed = 20; seed < 25; ++seed) {
    auto chips = random_chips(192, seed);
    IqBuffer buf = modulate(chips, cfg);
    auto passband = mix_up(buf, cfg);
    IqBuffer down = mix_down(passband, cfg);
    CHECK(demodulate(down, chips.size(), cfg) == chips);
  }
}

TEST_CASE("mix round-trip on slowly varying content is within 2 LSB") {
  ModemConfig cfg;
  IqBuffer buf;
  buf.sample_rate = cfg.sample_rate();
  buf.i_samples.assign(64, 9000);
  buf.q_samples.assign(64, -5000);
  IqBuffer down = mix_down(mix_up(buf, cfg), cfg);
  // skip the filter edges
  for (std::size_t n = 4; n + 4 < buf.i_samples.size(); ++n) {
    CHECK(std::abs(down.i_samples[n] - buf.i_samples[n]) <= 2);
    CHECK(std::abs(down.q_samples[n] - buf.q_samples[n]) <= 2);
  }
}

TEST_CASE("mix_down of a pure cosine gives constant positive I") {
  ModemConfig cfg;
  std::vector<std::int16_t> passband(128);
  double omega = 2.0 * 3.14159265358979 * cfg.if_freq() / cfg.sample_rate();
  for (std::size_t n = 0; n < passband.size(); ++n) {
    passband[n] = static_cast<std::int16_t>(
        std::lround(10000 * std::cos(omega * n)));
  }
  IqBuffer down = mix_down(passband, cfg);
  for (std::size_t n = 4; n + 4 < down.size(); ++n) {
    CHECK(down.i_samples[n] > 9000);
    CHECK(std::abs(down.q_samples[n]) < 200);
  }
}

TEST_CASE("acquire finds the PPDU start") {
  ModemConfig cfg;
  Bytes ppdu = build_ppdu(build_ack_for(0x42));
  auto chips = spread_all(octets_to_symbols(ppdu));
  IqBuffer clean = modulate(chips, cfg);

  SUBCASE("no prefix") { CHECK(acquire(clean, cfg) == 0); }

  SUBCASE("40 zero samples prepended") {
    IqBuffer shifted;
    shifted.sample_rate = clean.sample_rate;
    shifted.i_samples.assign(40, 0);
    shifted.q_samples.assign(40, 0);
    shifted.i_samples.insert(shifted.i_samples.end(),
                             clean.i_samples.begin(), clean.i_samples.end());
    shifted.q_samples.insert(shifted.q_samples.end(),
                             clean.q_samples.begin(), clean.q_samples.end());
    CHECK(acquire(shifted, cfg) == 40);
  }

  SUBCASE("pure noise never locks") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      IqBuffer noise;
      noise.sample_rate = cfg.sample_rate();
      noise.i_samples.assign(2000, 0);
      noise.q_samples.assign(2000, 0);
      Rng rng(seed, RngPurpose::SampleNoise);
      noise = apply_awgn(noise, cfg.amplitude / 2.0, rng);
      CHECK_THROWS_AS(acquire(noise, cfg), ModemError);
    }
  }
}

TEST_CASE("I/Q file round-trip with sidecar") {
  ModemConfig cfg;
  cfg.amplitude = 12345;
  auto chips = random_chips(64, 77);
  IqBuffer buf = modulate(chips, cfg);
  std::string path = "test_iq_roundtrip.iq";
  write_iq_file(path, buf, cfg);
  ModemConfig cfg2;
  IqBuffer loaded = read_iq_file(path, cfg2);
  CHECK(loaded.i_samples == buf.i_samples);
  CHECK(loaded.q_samples == buf.q_samples);
  CHECK(loaded.sample_rate == buf.sample_rate);
  CHECK(cfg2.amplitude == cfg.amplitude);
  CHECK(cfg2.chip_rate == cfg.chip_rate);
  std::remove(path.c_str());
  std::remove((path + ".meta").c_str());
}

TEST_CASE("end-to-end PHY identity across PSDU lengths") {
  // every length in [2, 127] once, random content
  ModemConfig cfg;
  std::mt19937 gen(99);
  for (std::size_t len = 2; len <= 127; ++len) {
    Bytes psdu(len);
    for (auto& b : psdu) b = static_cast<std::uint8_t>(gen());
    auto chips = spread_all(octets_to_symbols(psdu));
    auto rx_chips = demodulate(modulate(chips, cfg), chips.size(), cfg);
    Bytes out = symbols_to_octets(despread_all(rx_chips));
    CHECK(out == psdu);
  }
}
