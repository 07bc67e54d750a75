// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wpan/channel_sim.hpp"
#include "wpan/frame_codec.hpp"
#include "wpan/mac.hpp"
#include "wpan/modem.hpp"
#include "wpan/spreading.hpp"

using namespace wpan;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool ok, const std::string& note) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index,
              name, note.empty() ? "" : " -- ", note.c_str());
  if (!ok) ++g_failures;
}

Bytes random_psdu(Rng& rng, std::size_t len) {
  FrameControl fcf;
  fcf.frame_type = FrameType::Data;
  fcf.dest_addr_mode = AddrMode::Short;
  fcf.src_addr_mode = AddrMode::Short;
  fcf.intra_pan = true;
  AddressInfo addr;
  addr.dest_pan = 0x1234;
  addr.dest_addr = 0x0001;
  addr.src_addr = 0x0002;
  // overhead: fcf 2 + seq 1 + addressing 6 + fcs 2 = 11
  if (len >= 11 + 1) {
    Bytes payload(len - 11);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.uniform(255));
    return build_frame(fcf, static_cast<std::uint8_t>(rng.uniform(255)),
                       addr, payload);
  }
  Bytes raw(len);
  for (auto& b : raw) b = static_cast<std::uint8_t>(rng.uniform(255));
  return raw;
}

bool phy_roundtrip(const Bytes& psdu) {
  Bytes ppdu;
  try {
    ppdu = build_ppdu(psdu);
  } catch (const FrameError&) {
    // raw short PSDUs below the MPDU minimum: frame them by hand
    ppdu = Bytes{0, 0, 0, 0, kSfd, static_cast<std::uint8_t>(psdu.size())};
    ppdu.insert(ppdu.end(), psdu.begin(), psdu.end());
  }
  auto chips = spread_all(octets_to_symbols(ppdu));
  ModemConfig cfg;
  IqBuffer iq = modulate(chips, cfg);
  std::size_t offset = acquire(iq, cfg);
  if (offset != 0) return false;
  auto rx_chips = demodulate(iq, chips.size(), cfg);
  Bytes rx = symbols_to_octets(despread_all(rx_chips));
  if (rx.size() < 6 + psdu.size()) return false;
  return Bytes(rx.begin() + 6, rx.begin() + 6 + psdu.size()) == psdu;
}

void criterion1() {
  Rng rng(101, RngPurpose::Payload);
  int done = 0;
  bool ok = true;
  // cover every PSDU length 2..127, then random lengths up to 200 total
  for (std::size_t len = 2; len <= 127 && ok; ++len) {
    ok = phy_roundtrip(random_psdu(rng, len));
    ++done;
  }
  while (done < 200 && ok) {
    ok = phy_roundtrip(random_psdu(rng, 2 + rng.uniform(125)));
    ++done;
  }
  std::ostringstream note;
  note << done << " PSDUs, lengths 2..127 all covered";
  report(1, "noiseless PHY loopback is bit-exact", ok, note.str());
}

void criterion2() {
  const ChipTable& table = ChipTable::standard();
  bool ok = true;
  std::string note;
  try {
    table.verify();
  } catch (const std::exception& e) {
    ok = false;
    note = e.what();
  }
  int dmin = table.min_pairwise_distance();
  if (dmin <= 2) ok = false;
  if (note.empty()) note = "min pairwise distance " + std::to_string(dmin);
  report(2, "chip table structure holds and dmin exceeds 2", ok, note);
}

void criterion3() {
  const ChipTable& table = ChipTable::standard();
  bool ok = true;
  unsigned single = 0, dbl = 0;
  for (unsigned s = 0; s < kSymbolCount && ok; ++s) {
    ChipSequence base = table.row(static_cast<std::uint8_t>(s));
    for (unsigned i = 0; i < kChipsPerSymbol && ok; ++i) {
      ChipSequence c = base;
      c[i] ^= 1;
      DespreadResult r = despread(c);
      ok = r.symbol == s && r.score == static_cast<int>(kChipsPerSymbol) - 1;
      ++single;
      for (unsigned j = i + 1; j < kChipsPerSymbol && ok; ++j) {
        ChipSequence d = c;
        d[j] ^= 1;
        ok = despread(d).symbol == s;
        ++dbl;
      }
    }
  }
  std::ostringstream note;
  note << single << " single-flip and " << dbl << " double-flip cases";
  report(3, "despreading corrects one- and two-chip errors", ok, note.str());
}

void criterion4() {
  // all integer arithmetic, no floating point
  Bytes psdu(127, 0xA5);
  psdu[0] = 0x02;
  Bytes ppdu = build_ppdu(psdu);
  bool ok = ppdu.size() == 133;
  std::uint64_t symbols = ppdu.size() * kSymbolsPerOctetAir;
  ok = ok && symbols == 266;
  ok = ok && symbols * kSymbolMicros == 4256;
  ok = ok && kSamplesPerSymbol == 64;
  // modulated buffer: 64 samples per symbol plus the 2-sample Q tail
  auto chips = spread_all(octets_to_symbols(ppdu));
  IqBuffer iq = modulate(chips, ModemConfig{});
  ok = ok && iq.i_samples.size() == 266 * 64 + 2;
  ok = ok && iq.q_samples.size() == iq.i_samples.size();
  report(4, "maximum-length PPDU airtime is exactly 4256 us", ok,
         "266 symbols x 16 us; 64 samples/symbol + 2 tail samples");
}

void criterion5() {
  bool ok = compute_fcs({}) == 0x0000;
  ok = ok && compute_fcs({0x02, 0x00, 0x56}) == 0x820B;
  ok = ok && to_hex(build_ack_for(0x56)) == "0200560b82";
  // exhaustive single-bit-flip detection on short frames
  Rng rng(505, RngPurpose::Payload);
  unsigned cases = 0;
  for (int trial = 0; trial < 20 && ok; ++trial) {
    std::size_t body = 3 + rng.uniform(11);  // mpdu <= 16 octets
    Bytes msg(body);
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng.uniform(255));
    std::uint16_t fcs = compute_fcs(msg);
    Bytes frame = msg;
    frame.push_back(static_cast<std::uint8_t>(fcs & 0xFF));
    frame.push_back(static_cast<std::uint8_t>(fcs >> 8));
    for (std::size_t bit = 0; bit < frame.size() * 8 && ok; ++bit) {
      Bytes corrupt = frame;
      corrupt[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      Bytes head(corrupt.begin(), corrupt.end() - 2);
      std::uint16_t got = static_cast<std::uint16_t>(
          corrupt[corrupt.size() - 2] |
          (corrupt[corrupt.size() - 1] << 8));
      ok = compute_fcs(head) != got;  // every single-bit error detected
      ++cases;
    }
  }
  std::ostringstream note;
  note << "golden vectors plus " << cases << " single-bit corruptions";
  report(5, "FCS matches golden vectors and flags all single-bit errors",
         ok, note.str());
}

/// Minimal scripted medium for the MAC criterion.
class Script : public MacChannel {
 public:
  std::vector<bool> busy;
  bool drop_all_acks = false;
  unsigned transmissions = 0;
  unsigned cca_calls = 0;

  bool cca_busy(std::uint64_t, std::uint64_t) override {
    std::size_t i = cca_calls++;
    return i < busy.size() ? static_cast<bool>(busy[i]) : false;
  }
  void transmit_ppdu(std::uint64_t start, const Bytes& ppdu) override {
    ++transmissions;
    if (drop_all_acks) return;
    PpduLocation loc = find_ppdu(ppdu);
    Mpdu mpdu = parse_mpdu(Bytes(ppdu.begin() + loc.mpdu_offset,
                                 ppdu.begin() + loc.mpdu_offset +
                                     loc.frame_length));
    Bytes ack = build_ppdu(build_ack_for(mpdu.seq));
    pending_ = RxPpdu{ack, start + ppdu_airtime_symbols(ppdu.size()) + 12 +
                               ppdu_airtime_symbols(ack.size())};
  }
  std::optional<RxPpdu> receive(std::uint64_t from,
                                std::uint64_t until) override {
    if (pending_ && pending_->arrival >= from && pending_->arrival <= until) {
      auto a = *pending_;
      pending_.reset();
      return a;
    }
    return std::nullopt;
  }

 private:
  std::optional<RxPpdu> pending_;
};

void criterion6() {
  const NodeIdentity a{0x1234, 1}, b{0x1234, 2};
  bool ok = true;

  {  // lossless: exactly one transmission
    MacEngine mac(a, MacConfig{}, 61);
    Script ch;
    TxOutcome out = mac.mac_send({0x01, 0x02}, b, 10, ch);
    ok = ok && out.status == TxStatus::Success && out.transmissions == 1 &&
         ch.transmissions == 1;
  }
  {  // every ack dropped: max_frame_retries + 1 = 4 transmissions, NoAck
    MacEngine mac(a, MacConfig{}, 62);
    Script ch;
    ch.drop_all_acks = true;
    TxOutcome out = mac.mac_send({0x01}, b, 11, ch);
    ok = ok && out.status == TxStatus::NoAck && out.transmissions == 4 &&
         ch.transmissions == 4;
  }
  {  // always busy: max_csma_backoffs + 1 = 5 CCA attempts, access failure
    MacEngine mac(a, MacConfig{}, 63);
    Script ch;
    ch.busy.assign(64, true);
    TxOutcome out = mac.mac_send({0x01}, b, 12, ch);
    ok = ok && out.status == TxStatus::ChannelAccessFailure &&
         ch.cca_calls == 5 && ch.transmissions == 0;
  }
  // backoff bounds: 10^4 draws per BE in {3,4,5}, all within [0, 2^BE - 1]
  for (unsigned be = 3; be <= 5 && ok; ++be) {
    MacConfig cfg;
    cfg.min_be = be;
    cfg.max_be = be;
    MacEngine mac(a, cfg, 600 + be);
    Script ch;
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 10000 && ok; ++i) {
      CsmaResult r = mac.csma_ca(ch);
      std::uint64_t periods = r.backoff_symbols / cfg.unit_backoff_period;
      ok = r.backoff_symbols % cfg.unit_backoff_period == 0 &&
           periods <= (1ull << be) - 1;
      seen.insert(periods);
    }
    ok = ok && seen.size() == (1ull << be);
  }
  report(6, "MAC retry, access-failure and backoff behavior", ok,
         "scripted channel traces plus 3x10^4 backoff draws");
}

void criterion7() {
  const NodeIdentity a{0x1234, 1}, b{0x1234, 2};
  ChannelConfig chan;
  chan.seed = 70;
  chan.mode = ImpairmentMode::ChipFlip;
  chan.chip_flip_p = 0.01;
  Rng rng(70, RngPurpose::Payload);
  std::vector<Bytes> payloads;
  for (int i = 0; i < 5; ++i) {
    Bytes p(20);
    for (auto& v : p) v = static_cast<std::uint8_t>(rng.uniform(255));
    payloads.push_back(p);
  }
  EnergyModel base;
  SessionResult res = run_session(a, b, payloads, chan, MacConfig{}, base);
  bool ok = true;
  for (const EnergyLedger* led : {&res.tx_ledger, &res.rx_ledger}) {
    // states partition the session span exactly
    std::uint64_t sym = led->tx.symbols + led->rx.symbols +
                        led->cca.symbols + led->idle.symbols;
    ok = ok && sym == res.span_symbols;
    // charge equals sum of current x duration to 1e-9 relative
    double expect = base.tx_ma * led->tx.seconds +
                    base.rx_ma * led->rx.seconds +
                    base.cca_ma * led->cca.seconds +
                    base.idle_ma * led->idle.seconds;
    expect *= 1000.0;  // mA x s -> uC
    ok = ok && std::abs(led->total_charge_uc - expect) <=
                   1e-9 * std::max(1.0, expect);
    ok = ok && std::abs(led->total_energy_uj -
                        led->total_charge_uc * base.supply_voltage) <=
                   1e-9 * std::max(1.0, led->total_energy_uj);
  }
  // doubling all currents doubles the charge
  EnergyModel doubled = base;
  doubled.tx_ma *= 2;
  doubled.rx_ma *= 2;
  doubled.cca_ma *= 2;
  doubled.idle_ma *= 2;
  SessionResult res2 =
      run_session(a, b, payloads, chan, MacConfig{}, doubled);
  ok = ok && std::abs(res2.tx_ledger.total_charge_uc -
                      2 * res.tx_ledger.total_charge_uc) <= 1e-9;
  ok = ok && std::abs(res2.rx_ledger.total_charge_uc -
                      2 * res.rx_ledger.total_charge_uc) <= 1e-9;
  report(7, "energy ledger is exact, exhaustive and linear", ok,
         "both node ledgers partition the span");
}

void criterion8() {
  const NodeIdentity a{0x1234, 1}, b{0x1234, 2};
  bool ok = true;

  // determinism: identical seeds give byte-identical logs
  {
    ChannelConfig chan;
    chan.seed = 80;
    chan.mode = ImpairmentMode::ChipFlip;
    chan.chip_flip_p = 0.02;
    Rng rng(80, RngPurpose::Payload);
    std::vector<Bytes> payloads;
    for (int i = 0; i < 10; ++i) {
      Bytes p(16);
      for (auto& v : p) v = static_cast<std::uint8_t>(rng.uniform(255));
      payloads.push_back(p);
    }
    auto render = [](const EventLog& log) {
      std::ostringstream out;
      for (const auto& e : log) out << format_event(e) << "\n";
      return out.str();
    };
    SessionResult r1 =
        run_session(a, b, payloads, chan, MacConfig{}, EnergyModel{});
    SessionResult r2 =
        run_session(a, b, payloads, chan, MacConfig{}, EnergyModel{});
    ok = ok && render(r1.log) == render(r2.log) &&
         r1.stats.chip_errors_injected == r2.stats.chip_errors_injected;
  }

  // mean PER over seeds 0..9 is non-decreasing in chip-flip probability
  const double probs[] = {0.0, 0.01, 0.02, 0.05};
  double prev_mean = -1.0;
  std::ostringstream note;
  note.precision(4);
  for (double p : probs) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ChannelConfig chan;
      chan.seed = seed;
      chan.mode = ImpairmentMode::ChipFlip;
      chan.chip_flip_p = p;
      Rng rng(seed, RngPurpose::Payload);
      std::vector<Bytes> payloads;
      for (int i = 0; i < 20; ++i) {
        Bytes pl(20);
        for (auto& v : pl) v = static_cast<std::uint8_t>(rng.uniform(255));
        payloads.push_back(pl);
      }
      sum += run_session(a, b, payloads, chan, MacConfig{}, EnergyModel{})
                 .stats.per;
    }
    double mean = sum / 10.0;
    ok = ok && mean >= prev_mean;
    prev_mean = mean;
    note << (p == 0.0 ? "mean PER " : ", ") << mean;
  }
  report(8, "simulation is deterministic and PER grows with noise", ok,
         note.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (g_failures != 0) {
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
