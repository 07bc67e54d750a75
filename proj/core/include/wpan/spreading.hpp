#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wpan/bytes.hpp"

namespace wpan {

constexpr std::size_t kChipsPerSymbol = 32;
constexpr std::size_t kSymbolCount = 16;
constexpr std::size_t kSymbolsPerOctet = 2;
constexpr std::size_t kChipsPerOctet = 64;

/// One 32-chip PN sequence; chips stored as 0/1 octets, c0 first.
using ChipSequence = std::array<std::uint8_t, kChipsPerSymbol>;

/// The 16-row symbol-to-chip table for the 2.4 GHz band. Rows are loaded
/// from data transcribed out of the standard and structurally verified:
/// all rows distinct, rows 1-7 each a fixed cyclic rotation of the row
/// before, row s+8 differing from row s on exactly one index-parity class.
class ChipTable {
 public:
  /// The built-in table. Verified once on first access; throws
  /// std::logic_error if the embedded data violates the structure.
  static const ChipTable& standard();

  /// Loads from a file of 16 lines, 32 characters of '0'/'1' each,
  /// line n = symbol n. Blank lines and '#' comments are skipped.
  static ChipTable load(const std::string& path);

  /// Parses the 16-line text format from a string.
  static ChipTable parse(const std::string& text);

  const ChipSequence& row(std::uint8_t symbol) const {
    return rows_[symbol & 0xF];
  }

  /// Throws std::logic_error naming the first violated relation.
  void verify() const;

  /// Minimum pairwise Hamming distance over all row pairs.
  int min_pairwise_distance() const;

 private:
  std::array<ChipSequence, kSymbolCount> rows_{};
};

/// Splits each octet into low nibble then high nibble.
std::vector<std::uint8_t> octets_to_symbols(const Bytes& data);

/// Inverse of octets_to_symbols. Throws std::invalid_argument on an odd
/// symbol count.
Bytes symbols_to_octets(const std::vector<std::uint8_t>& symbols);

/// Row lookup in the standard table. symbol must be < 16.
const ChipSequence& spread(std::uint8_t symbol);

struct DespreadResult {
  std::uint8_t symbol;
  int score;  // chip agreement count in [0, 32]
};

/// Maximum-agreement (minimum Hamming distance) decision against the
/// standard table; ties break toward the lowest symbol index.
DespreadResult despread(const ChipSequence& received);

/// Symbol stream to concatenated chip stream.
std::vector<std::uint8_t> spread_all(const std::vector<std::uint8_t>& symbols);

/// Chip stream back to symbols; trailing chips short of a full symbol are
/// discarded.
std::vector<std::uint8_t> despread_all(const std::vector<std::uint8_t>& chips);

}  // namespace wpan
