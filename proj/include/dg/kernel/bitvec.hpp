#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dg/kernel/rat.hpp"

namespace dg {

// Fixed-width bit string. Bit 0 is the most significant (leftmost) bit, so
// the derived ordering is lexicographic and, for equal widths, agrees with
// the numeric order of to_uint().
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t width) : bits_(width, 0) {}
  explicit BitVec(std::vector<std::uint8_t> bits);

  static BitVec parse(std::string_view text);
  static BitVec from_uint(std::uint64_t value, std::size_t width);
  // Each coordinate must be exactly 0 or 1.
  static BitVec from_rats(std::span<const Rat> values);

  std::size_t width() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::uint64_t to_uint() const;
  std::string to_string() const;
  std::vector<Rat> to_rats() const;
  BitVec concat(const BitVec& tail) const;
  BitVec slice(std::size_t offset, std::size_t len) const;

  friend bool operator==(const BitVec&, const BitVec&) = default;
  friend std::strong_ordering operator<=>(const BitVec& a, const BitVec& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

// True iff every value is 0 or 1.
bool all_binary(std::span<const Rat> values);

}  // namespace dg
