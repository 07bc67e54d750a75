// Command-line front end for the 802.15.4 codec, modem and link simulator.
//
// Exit codes: 0 success, 1 usage/config, 2 codec, 3 PHY (acquisition/
// demodulation), 4 I/O.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpan/bytes.hpp"
#include "wpan/channel_sim.hpp"
#include "wpan/frame_codec.hpp"
#include "wpan/mac.hpp"
#include "wpan/modem.hpp"
#include "wpan/spreading.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCodec = 2;
constexpr int kExitPhy = 3;
constexpr int kExitIo = 4;

struct SimOptions {
  wpan::ChannelConfig chan;
  wpan::MacConfig mac;
  wpan::EnergyModel energy;
  wpan::NodeIdentity tx_node{0x1234, 0x0001};
  wpan::NodeIdentity rx_node{0x1234, 0x0002};
  std::size_t payload_count = 1;
  std::size_t payload_size = 10;
  bool seed_set = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

void apply_sim_key(SimOptions& opt, const std::string& key,
                   const std::string& val) {
  auto u64 = [&] { return std::stoull(val); };
  auto dbl = [&] { return std::stod(val); };
  if (key == "mode") {
    if (val == "lossless") opt.chan.mode = wpan::ImpairmentMode::Lossless;
    else if (val == "chip-flip") opt.chan.mode = wpan::ImpairmentMode::ChipFlip;
    else if (val == "awgn") opt.chan.mode = wpan::ImpairmentMode::SampleAwgn;
    else throw wpan::ConfigError("unknown mode: " + val);
  } else if (key == "chip_flip_p") {
    opt.chan.chip_flip_p = dbl();
  } else if (key == "awgn_sigma") {
    opt.chan.awgn_sigma = dbl();
  } else if (key == "seed") {
    opt.chan.seed = u64();
    opt.seed_set = true;
  } else if (key == "propagation_delay") {
    opt.chan.propagation_delay = u64();
  } else if (key == "ack_drop") {
    opt.chan.ack_drop_pattern.clear();
    if (!val.empty()) {
      for (const auto& p : split(val, ','))
        opt.chan.ack_drop_pattern.push_back(std::stoul(p));
    }
  } else if (key == "busy") {
    opt.chan.busy_schedule.clear();
    if (!val.empty()) {
      for (const auto& p : split(val, ',')) {
        auto range = split(p, ':');
        if (range.size() != 2)
          throw wpan::ConfigError("busy interval must be start:end");
        opt.chan.busy_schedule.push_back(
            {std::stoull(range[0]), std::stoull(range[1])});
      }
    }
  } else if (key == "payload_count") {
    opt.payload_count = u64();
  } else if (key == "payload_size") {
    opt.payload_size = u64();
  } else if (key == "min_be") {
    opt.mac.min_be = static_cast<unsigned>(u64());
  } else if (key == "max_be") {
    opt.mac.max_be = static_cast<unsigned>(u64());
  } else if (key == "max_csma_backoffs") {
    opt.mac.max_csma_backoffs = static_cast<unsigned>(u64());
  } else if (key == "max_frame_retries") {
    opt.mac.max_frame_retries = static_cast<unsigned>(u64());
  } else if (key == "unit_backoff_period") {
    opt.mac.unit_backoff_period = u64();
  } else if (key == "turnaround_time") {
    opt.mac.turnaround_time = u64();
  } else if (key == "ack_wait_duration") {
    opt.mac.ack_wait_duration = u64();
  } else if (key == "cca_duration") {
    opt.mac.cca_duration = u64();
  } else if (key == "cca_threshold") {
    opt.mac.cca_threshold = dbl();
  } else if (key == "cca_mode") {
    if (val == "energy") opt.mac.cca_mode = wpan::CcaMode::EnergyDetect;
    else if (val == "carrier") opt.mac.cca_mode = wpan::CcaMode::CarrierSense;
    else if (val == "carrier-and-energy")
      opt.mac.cca_mode = wpan::CcaMode::CarrierAndEnergy;
    else throw wpan::ConfigError("unknown cca_mode: " + val);
  } else if (key == "tx_ma") {
    opt.energy.tx_ma = dbl();
  } else if (key == "rx_ma") {
    opt.energy.rx_ma = dbl();
  } else if (key == "cca_ma") {
    opt.energy.cca_ma = dbl();
  } else if (key == "idle_ma") {
    opt.energy.idle_ma = dbl();
  } else if (key == "supply_voltage") {
    opt.energy.supply_voltage = dbl();
  } else if (key == "tx_pan") {
    opt.tx_node.pan_id = static_cast<std::uint16_t>(std::stoul(val, nullptr, 0));
  } else if (key == "tx_addr") {
    opt.tx_node.short_addr = static_cast<std::uint16_t>(std::stoul(val, nullptr, 0));
  } else if (key == "rx_pan") {
    opt.rx_node.pan_id = static_cast<std::uint16_t>(std::stoul(val, nullptr, 0));
  } else if (key == "rx_addr") {
    opt.rx_node.short_addr = static_cast<std::uint16_t>(std::stoul(val, nullptr, 0));
  } else {
    throw wpan::ConfigError("unknown config key: " + key);
  }
}

void load_config_file(SimOptions& opt, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw wpan::ConfigError("config line is not key=value: " + line);
    }
    apply_sim_key(opt, line.substr(0, eq), line.substr(eq + 1));
  }
}

const char* frame_type_name(wpan::FrameType t) {
  switch (t) {
    case wpan::FrameType::Beacon: return "beacon";
    case wpan::FrameType::Data: return "data";
    case wpan::FrameType::Ack: return "ack";
    case wpan::FrameType::MacCommand: return "command";
  }
  return "?";
}

const char* addr_mode_name(wpan::AddrMode m) {
  switch (m) {
    case wpan::AddrMode::None: return "none";
    case wpan::AddrMode::Short: return "short";
    case wpan::AddrMode::Extended: return "extended";
  }
  return "?";
}

int cmd_frame_build(const std::string& type, unsigned seq,
                    std::optional<unsigned> dest_pan,
                    std::optional<std::uint64_t> dest,
                    std::optional<unsigned> src_pan,
                    std::optional<std::uint64_t> src, bool extended_dest,
                    bool extended_src, bool ack_request, bool intra_pan,
                    bool frame_pending, const std::string& payload_hex) {
  wpan::FrameControl fcf;
  if (type == "beacon") fcf.frame_type = wpan::FrameType::Beacon;
  else if (type == "data") fcf.frame_type = wpan::FrameType::Data;
  else if (type == "ack") fcf.frame_type = wpan::FrameType::Ack;
  else if (type == "command") fcf.frame_type = wpan::FrameType::MacCommand;
  else {
    std::cerr << "unknown frame type: " << type << "\n";
    return kExitUsage;
  }
  fcf.ack_request = ack_request;
  fcf.intra_pan = intra_pan;
  fcf.frame_pending = frame_pending;
  wpan::AddressInfo addr;
  if (dest) {
    fcf.dest_addr_mode =
        extended_dest ? wpan::AddrMode::Extended : wpan::AddrMode::Short;
    addr.dest_addr = *dest;
    addr.dest_pan = static_cast<std::uint16_t>(dest_pan.value_or(0));
  }
  if (src) {
    fcf.src_addr_mode =
        extended_src ? wpan::AddrMode::Extended : wpan::AddrMode::Short;
    addr.src_addr = *src;
    if (!(intra_pan && dest)) {
      addr.src_pan = static_cast<std::uint16_t>(src_pan.value_or(0));
    }
  }
  wpan::Bytes mpdu = wpan::build_frame(fcf, static_cast<std::uint8_t>(seq),
                                       addr, wpan::from_hex(payload_hex));
  std::cout << wpan::to_hex(mpdu) << "\n";
  return kExitOk;
}

int cmd_frame_parse(const std::string& hex) {
  wpan::Bytes bytes = wpan::from_hex(hex);
  wpan::Mpdu mpdu;
  try {
    mpdu = wpan::parse_mpdu(bytes);
  } catch (const wpan::FrameError& e) {
    if (e.code() == wpan::FrameError::Code::FcsMismatch) {
      std::cout << "fcs=FAIL\n";
    }
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitCodec;
  }
  std::cout << "type=" << frame_type_name(mpdu.fcf.frame_type) << "\n";
  std::cout << "seq=" << static_cast<unsigned>(mpdu.seq) << "\n";
  std::cout << "security_enabled=" << mpdu.fcf.security_enabled << "\n";
  std::cout << "frame_pending=" << mpdu.fcf.frame_pending << "\n";
  std::cout << "ack_request=" << mpdu.fcf.ack_request << "\n";
  std::cout << "intra_pan=" << mpdu.fcf.intra_pan << "\n";
  std::cout << "dest_mode=" << addr_mode_name(mpdu.fcf.dest_addr_mode) << "\n";
  std::cout << "src_mode=" << addr_mode_name(mpdu.fcf.src_addr_mode) << "\n";
  char buf[32];
  if (mpdu.addr.dest_pan) {
    std::snprintf(buf, sizeof buf, "0x%04x", *mpdu.addr.dest_pan);
    std::cout << "dest_pan=" << buf << "\n";
  }
  if (mpdu.addr.dest_addr) {
    std::snprintf(buf, sizeof buf, "0x%" PRIx64, *mpdu.addr.dest_addr);
    std::cout << "dest_addr=" << buf << "\n";
  }
  if (mpdu.addr.src_pan) {
    std::snprintf(buf, sizeof buf, "0x%04x", *mpdu.addr.src_pan);
    std::cout << "src_pan=" << buf << "\n";
  }
  if (mpdu.addr.src_addr) {
    std::snprintf(buf, sizeof buf, "0x%" PRIx64, *mpdu.addr.src_addr);
    std::cout << "src_addr=" << buf << "\n";
  }
  std::cout << "payload=" << wpan::to_hex(mpdu.payload) << "\n";
  std::snprintf(buf, sizeof buf, "0x%04x", mpdu.fcs);
  std::cout << "fcs_value=" << buf << "\n";
  std::cout << "fcs=OK\n";
  return kExitOk;
}

int cmd_modulate(const std::string& ppdu_hex, const std::string& out_path,
                 const wpan::ModemConfig& cfg) {
  if (ppdu_hex.empty()) {
    std::cerr << "empty PPDU hex\n";
    return kExitUsage;
  }
  wpan::Bytes ppdu = wpan::from_hex(ppdu_hex);
  auto chips = wpan::spread_all(wpan::octets_to_symbols(ppdu));
  wpan::IqBuffer buf = wpan::modulate(chips, cfg);
  wpan::write_iq_file(out_path, buf, cfg);
  // airtime in exact integer microseconds: 8 bits/octet at 250 kb/s
  std::uint64_t airtime_us = static_cast<std::uint64_t>(ppdu.size()) * 32;
  std::cout << "samples_per_channel=" << buf.size() << "\n";
  std::cout << "airtime_us=" << airtime_us << "\n";
  return kExitOk;
}

int cmd_demodulate(const std::string& path) {
  wpan::ModemConfig cfg;
  wpan::IqBuffer buf = wpan::read_iq_file(path, cfg);
  std::size_t offset = wpan::acquire(buf, cfg);
  wpan::IqBuffer view;
  view.sample_rate = buf.sample_rate;
  view.i_samples.assign(buf.i_samples.begin() + offset, buf.i_samples.end());
  view.q_samples.assign(buf.q_samples.begin() + offset, buf.q_samples.end());
  std::size_t chip_count = 0;
  if (view.size() > wpan::kQDelaySamples) {
    chip_count = (view.size() - wpan::kQDelaySamples) / wpan::kSamplesPerChip;
  }
  chip_count -= chip_count % wpan::kChipsPerOctet;  // whole octets only
  auto chips = wpan::demodulate(view, chip_count, cfg);
  wpan::Bytes octets = wpan::symbols_to_octets(wpan::despread_all(chips));
  wpan::PpduLocation loc = wpan::find_ppdu(octets);
  wpan::Bytes mpdu_bytes(octets.begin() + loc.mpdu_offset,
                         octets.begin() + loc.mpdu_offset + loc.frame_length);
  wpan::Bytes ppdu = wpan::build_ppdu(mpdu_bytes);
  std::cout << "ppdu=" << wpan::to_hex(ppdu) << "\n";
  try {
    wpan::parse_mpdu(mpdu_bytes);
    std::cout << "fcs=OK\n";
  } catch (const wpan::FrameError&) {
    std::cout << "fcs=FAIL\n";
    return kExitCodec;
  }
  return kExitOk;
}

void print_ledger(const std::string& prefix, const wpan::EnergyLedger& led) {
  auto entry = [&](const char* name, const wpan::EnergyLedger::StateEntry& e) {
    std::printf("%s.%s.symbols=%" PRIu64 "\n", prefix.c_str(), name, e.symbols);
    std::printf("%s.%s.seconds=%.9g\n", prefix.c_str(), name, e.seconds);
    std::printf("%s.%s.charge_uc=%.9g\n", prefix.c_str(), name, e.charge_uc);
  };
  entry("tx", led.tx);
  entry("rx", led.rx);
  entry("cca", led.cca);
  entry("idle", led.idle);
  std::printf("%s.total_charge_uc=%.9g\n", prefix.c_str(),
              led.total_charge_uc);
  std::printf("%s.total_energy_uj=%.9g\n", prefix.c_str(),
              led.total_energy_uj);
}

int run_one_sim(const SimOptions& opt, const std::string& log_path) {
  std::vector<wpan::Bytes> payloads;
  wpan::Rng payload_rng(opt.chan.seed, wpan::RngPurpose::Payload);
  for (std::size_t i = 0; i < opt.payload_count; ++i) {
    wpan::Bytes p(opt.payload_size);
    for (auto& b : p) b = static_cast<std::uint8_t>(payload_rng.uniform(255));
    payloads.push_back(std::move(p));
  }
  wpan::SessionResult res = wpan::run_session(
      opt.tx_node, opt.rx_node, payloads, opt.chan, opt.mac, opt.energy);
  std::printf("mode=%s\n", wpan::impairment_mode_name(opt.chan.mode));
  std::printf("chip_flip_p=%.9g\n", opt.chan.chip_flip_p);
  std::printf("awgn_sigma=%.9g\n", opt.chan.awgn_sigma);
  std::printf("seed=%" PRIu64 "\n", opt.chan.seed);
  std::printf("frames_sent=%" PRIu64 "\n", res.stats.frames_sent);
  std::printf("frames_delivered=%" PRIu64 "\n", res.stats.frames_delivered);
  std::printf("acks_sent=%" PRIu64 "\n", res.stats.acks_sent);
  std::printf("retransmissions=%" PRIu64 "\n", res.stats.retransmissions);
  std::printf("chip_errors_injected=%" PRIu64 "\n",
              res.stats.chip_errors_injected);
  std::printf("per=%.9g\n", res.stats.per);
  std::printf("ber=%.9g\n", res.stats.ber);
  std::printf("airtime_per_frame_us=%.9g\n",
              res.stats.airtime_per_frame_s * 1e6);
  std::printf("span_symbols=%" PRIu64 "\n", res.span_symbols);
  print_ledger("node.tx", res.tx_ledger);
  print_ledger("node.rx", res.rx_ledger);
  if (!log_path.empty()) {
    std::ofstream out(log_path);
    if (!out) throw std::ios_base::failure("cannot write log: " + log_path);
    for (const auto& e : res.log) out << wpan::format_event(e) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(SimOptions opt, const std::string& chip_flip_list,
                 const std::string& log_path) {
  if (!opt.seed_set) {
    std::cerr << "simulate requires a seed (--seed or config)\n";
    return kExitUsage;
  }
  if (chip_flip_list.empty()) {
    return run_one_sim(opt, log_path);
  }
  bool first = true;
  for (const auto& p : split(chip_flip_list, ',')) {
    if (!first) std::printf("\n");
    first = false;
    SimOptions point = opt;
    point.chan.mode = wpan::ImpairmentMode::ChipFlip;
    point.chan.chip_flip_p = std::stod(p);
    int rc = run_one_sim(point, log_path);
    if (rc != kExitOk) return rc;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IEEE 802.15.4 PHY/MAC toolbox"};
  app.require_subcommand(1);

  // frame
  auto* frame = app.add_subcommand("frame", "Build or parse MPDUs");
  frame->require_subcommand(1);
  auto* build = frame->add_subcommand("build", "Serialize an MPDU");
  std::string type = "data", payload_hex;
  unsigned seq = 0;
  std::optional<unsigned> dest_pan, src_pan;
  std::optional<std::uint64_t> dest, src;
  bool extended_dest = false, extended_src = false;
  bool ack_request = false, intra_pan = false, frame_pending = false;
  build->add_option("--type", type, "beacon|data|ack|command");
  build->add_option("--seq", seq, "sequence number");
  build->add_option("--dest-pan", dest_pan);
  build->add_option("--dest", dest);
  build->add_option("--src-pan", src_pan);
  build->add_option("--src", src);
  build->add_flag("--extended-dest", extended_dest);
  build->add_flag("--extended-src", extended_src);
  build->add_flag("--ack-request", ack_request);
  build->add_flag("--intra-pan", intra_pan);
  build->add_flag("--frame-pending", frame_pending);
  build->add_option("--payload", payload_hex, "payload as hex");

  auto* parse = frame->add_subcommand("parse", "Parse and validate an MPDU");
  std::string parse_hex;
  parse->add_option("hex", parse_hex)->required();

  // modulate
  auto* mod = app.add_subcommand("modulate", "PPDU hex to I/Q sample file");
  std::string mod_hex, mod_out;
  wpan::ModemConfig modem_cfg;
  unsigned amplitude = 23170;
  mod->add_option("hex", mod_hex)->required();
  mod->add_option("-o,--output", mod_out)->required();
  mod->add_option("--chip-rate", modem_cfg.chip_rate);
  mod->add_option("--amplitude", amplitude);
  mod->add_option("--if-frequency", modem_cfg.if_frequency);

  // demodulate
  auto* demod = app.add_subcommand("demodulate", "I/Q file to PPDU hex");
  std::string demod_path;
  demod->add_option("file", demod_path)->required();

  // simulate / sweep
  SimOptions sim_opt;
  std::string config_path, chip_flip_list, log_path;
  std::vector<std::string> overrides;
  auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--seed", [&](const std::vector<std::string>& v) {
      sim_opt.chan.seed = std::stoull(v[0]);
      sim_opt.seed_set = true;
      return true;
    }, "RNG seed (required)");
    cmd->add_option("--chip-flip", chip_flip_list,
                    "comma-separated chip flip probabilities");
    cmd->add_option("--payloads", sim_opt.payload_count);
    cmd->add_option("--payload-size", sim_opt.payload_size);
    cmd->add_option("--set", overrides,
                    "config override key=value (repeatable)");
    cmd->add_option("--log", log_path, "write event log to file");
  };
  auto* sim = app.add_subcommand("simulate", "Run a two-node session");
  add_sim_options(sim);
  auto* sweep = app.add_subcommand("sweep",
                                   "Run one session per chip-flip point");
  add_sim_options(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      return cmd_frame_build(type, seq, dest_pan, dest, src_pan, src,
                             extended_dest, extended_src, ack_request,
                             intra_pan, frame_pending, payload_hex);
    }
    if (parse->parsed()) {
      return cmd_frame_parse(parse_hex);
    }
    if (mod->parsed()) {
      modem_cfg.amplitude = static_cast<std::int16_t>(amplitude);
      return cmd_modulate(mod_hex, mod_out, modem_cfg);
    }
    if (demod->parsed()) {
      return cmd_demodulate(demod_path);
    }
    if (sim->parsed() || sweep->parsed()) {
      if (!config_path.empty()) load_config_file(sim_opt, config_path);
      for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw wpan::ConfigError("override is not key=value: " + kv);
        }
        apply_sim_key(sim_opt, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (sweep->parsed() && chip_flip_list.empty()) {
        throw wpan::ConfigError("sweep requires --chip-flip");
      }
      return cmd_simulate(sim_opt, chip_flip_list, log_path);
    }
  } catch (const wpan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const wpan::FrameError& e) {
    std::cerr << "codec error: " << e.what() << "\n";
    return kExitCodec;
  } catch (const wpan::ModemError& e) {
    std::cerr << "phy error: " << e.what() << "\n";
    return kExitPhy;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
