#include "wpan/spreading.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "chip_table_data.inc"

namespace wpan {

namespace {

ChipSequence rotate_right(const ChipSequence& seq, std::size_t n) {
  ChipSequence out;
  for (std::size_t i = 0; i < kChipsPerSymbol; ++i) {
    out[(i + n) % kChipsPerSymbol] = seq[i];
  }
  return out;
}

int hamming(const ChipSequence& a, const ChipSequence& b) {
  int d = 0;
  for (std::size_t i = 0; i < kChipsPerSymbol; ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

const ChipTable& ChipTable::standard() {
  static const ChipTable table = [] {
    ChipTable t = ChipTable::parse(kChipTableText);
    t.verify();
    return t;
  }();
  return table;
}

ChipTable ChipTable::parse(const std::string& text) {
  ChipTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (row >= kSymbolCount) {
      throw std::logic_error("chip table: more than 16 rows");
    }
    if (line.size() != kChipsPerSymbol) {
      throw std::logic_error("chip table: row is not 32 chips");
    }
    for (std::size_t i = 0; i < kChipsPerSymbol; ++i) {
      if (line[i] != '0' && line[i] != '1') {
        throw std::logic_error("chip table: chip not '0' or '1'");
      }
      table.rows_[row][i] = line[i] - '0';
    }
    ++row;
  }
  if (row != kSymbolCount) {
    throw std::logic_error("chip table: expected 16 rows");
  }
  return table;
}

ChipTable ChipTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open chip table file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ChipTable::verify() const {
  for (std::size_t a = 0; a < kSymbolCount; ++a) {
    for (std::size_t b = a + 1; b < kSymbolCount; ++b) {
      if (rows_[a] == rows_[b]) {
        throw std::logic_error("chip table: duplicate rows");
      }
    }
  }
  // rows 1..7: a fixed cyclic rotation of the previous row
  std::size_t step = kChipsPerSymbol;
  for (std::size_t n = 1; n < kChipsPerSymbol; ++n) {
    if (rotate_right(rows_[0], n) == rows_[1]) {
      step = n;
      break;
    }
  }
  if (step == kChipsPerSymbol) {
    throw std::logic_error("chip table: rows 0 and 1 not rotation-related");
  }
  for (std::size_t s = 1; s < 8; ++s) {
    if (rows_[s] != rotate_right(rows_[s - 1], step)) {
      throw std::logic_error("chip table: rotation relation broken at row " +
                             std::to_string(s));
    }
  }
  // rows s and s+8: differ on exactly one index-parity class
  for (std::size_t s = 0; s < 8; ++s) {
    bool even_differ = false, odd_differ = false;
    bool even_same = false, odd_same = false;
    for (std::size_t i = 0; i < kChipsPerSymbol; ++i) {
      bool differ = rows_[s][i] != rows_[s + 8][i];
      if (i % 2 == 0) (differ ? even_differ : even_same) = true;
      else (differ ? odd_differ : odd_same) = true;
    }
    bool odd_class_flipped = odd_differ && !odd_same && !even_differ;
    bool even_class_flipped = even_differ && !even_same && !odd_differ;
    if (!odd_class_flipped && !even_class_flipped) {
      throw std::logic_error(
          "chip table: conjugation relation broken at row " +
          std::to_string(s));
    }
  }
  if (min_pairwise_distance() <= 2) {
    throw std::logic_error("chip table: minimum pairwise distance <= 2");
  }
}

int ChipTable::min_pairwise_distance() const {
  int best = kChipsPerSymbol;
  for (std::size_t a = 0; a < kSymbolCount; ++a) {
    for (std::size_t b = a + 1; b < kSymbolCount; ++b) {
      best = std::min(best, hamming(rows_[a], rows_[b]));
    }
  }
  return best;
}

std::vector<std::uint8_t> octets_to_symbols(const Bytes& data) {
  std::vector<std::uint8_t> symbols;
  symbols.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    symbols.push_back(b & 0xF);
    symbols.push_back(b >> 4);
  }
  return symbols;
}

Bytes symbols_to_octets(const std::vector<std::uint8_t>& symbols) {
  if (symbols.size() % 2 != 0) {
    throw std::invalid_argument("odd symbol count");
  }
  Bytes out;
  out.reserve(symbols.size() / 2);
  for (std::size_t i = 0; i < symbols.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>((symbols[i] & 0xF) |
                                            ((symbols[i + 1] & 0xF) << 4)));
  }
  return out;
}

const ChipSequence& spread(std::uint8_t symbol) {
  return ChipTable::standard().row(symbol);
}

DespreadResult despread(const ChipSequence& received) {
  const ChipTable& table = ChipTable::standard();
  DespreadResult best{0, -1};
  for (std::uint8_t s = 0; s < kSymbolCount; ++s) {
    int score = static_cast<int>(kChipsPerSymbol) -
                hamming(table.row(s), received);
    if (score > best.score) best = {s, score};
  }
  return best;
}

std::vector<std::uint8_t> spread_all(
    const std::vector<std::uint8_t>& symbols) {
  std::vector<std::uint8_t> chips;
  chips.reserve(symbols.size() * kChipsPerSymbol);
  for (std::uint8_t s : symbols) {
    const ChipSequence& row = spread(s);
    chips.insert(chips.end(), row.begin(), row.end());
  }
  return chips;
}

std::vector<std::uint8_t> despread_all(
    const std::vector<std::uint8_t>& chips) {
  std::vector<std::uint8_t> symbols;
  symbols.reserve(chips.size() / kChipsPerSymbol);
  for (std::size_t off = 0; off + kChipsPerSymbol <= chips.size();
       off += kChipsPerSymbol) {
    ChipSequence seq;
    std::copy(chips.begin() + off, chips.begin() + off + kChipsPerSymbol,
              seq.begin());
    symbols.push_back(despread(seq).symbol);
  }
  return symbols;
}

}  // namespace wpan
