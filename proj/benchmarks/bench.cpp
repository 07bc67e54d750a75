#include <benchmark/benchmark.h>

#include "wpan/channel_sim.hpp"
#include "wpan/frame_codec.hpp"
#include "wpan/modem.hpp"
#include "wpan/rng.hpp"
#include "wpan/spreading.hpp"

namespace {

wpan::Bytes random_bytes(std::size_t n, std::uint64_t seed) {
  wpan::Rng rng(seed, wpan::RngPurpose::Payload);
  wpan::Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.uniform(255));
  return out;
}

void BM_ComputeFcs(benchmark::State& state) {
  wpan::Bytes data = random_bytes(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::compute_fcs(data));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeFcs)->Arg(16)->Arg(127);

void BM_Spread(benchmark::State& state) {
  auto symbols = wpan::octets_to_symbols(random_bytes(127, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::spread_all(symbols));
  }
}
BENCHMARK(BM_Spread);

void BM_Despread(benchmark::State& state) {
  auto chips = wpan::spread_all(wpan::octets_to_symbols(random_bytes(127, 3)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::despread_all(chips));
  }
}
BENCHMARK(BM_Despread);

void BM_Modulate(benchmark::State& state) {
  auto chips = wpan::spread_all(wpan::octets_to_symbols(random_bytes(133, 4)));
  wpan::ModemConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::modulate(chips, cfg));
  }
}
BENCHMARK(BM_Modulate);

void BM_Demodulate(benchmark::State& state) {
  auto chips = wpan::spread_all(wpan::octets_to_symbols(random_bytes(133, 5)));
  wpan::ModemConfig cfg;
  wpan::IqBuffer buf = wpan::modulate(chips, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::demodulate(buf, chips.size(), cfg));
  }
}
BENCHMARK(BM_Demodulate);

void BM_Session(benchmark::State& state) {
  wpan::NodeIdentity tx{0x1234, 1}, rx{0x1234, 2};
  wpan::ChannelConfig chan;
  chan.seed = 6;
  chan.mode = wpan::ImpairmentMode::ChipFlip;
  chan.chip_flip_p = 0.01;
  std::vector<wpan::Bytes> payloads;
  for (int i = 0; i < 10; ++i) payloads.push_back(random_bytes(20, 100 + i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpan::run_session(tx, rx, payloads, chan,
                                               wpan::MacConfig{},
                                               wpan::EnergyModel{}));
  }
}
BENCHMARK(BM_Session);

}  // namespace

BENCHMARK_MAIN();
