#include "dg/kernel/bitvec.hpp"

#include "dg/kernel/errors.hpp"

namespace dg {

BitVec::BitVec(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw Error("bit value out of range");
  }
}

BitVec BitVec::parse(std::string_view text) {
  BitVec v(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw ParseError("malformed bit string '" + std::string(text) + "'");
    }
    v.bits_[i] = text[i] == '1';
  }
  return v;
}

BitVec BitVec::from_uint(std::uint64_t value, std::size_t width) {
  if (width > 64) throw WidthError("from_uint supports at most 64 bits");
  BitVec v(width);
  for (std::size_t i = 0; i < width; ++i) {
    v.bits_[width - 1 - i] = (value >> i) & 1u;
  }
  return v;
}

BitVec BitVec::from_rats(std::span<const Rat> values) {
  BitVec v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == Rat(1)) {
      v.bits_[i] = 1;
    } else if (!values[i].is_zero()) {
      throw WidthError("value " + values[i].to_string() + " is not a bit");
    }
  }
  return v;
}

std::uint64_t BitVec::to_uint() const {
  if (bits_.size() > 64) throw WidthError("to_uint supports at most 64 bits");
  std::uint64_t out = 0;
  for (auto b : bits_) out = (out << 1) | b;
  return out;
}

std::string BitVec::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

std::vector<Rat> BitVec::to_rats() const {
  std::vector<Rat> out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.emplace_back(static_cast<long>(b));
  return out;
}

BitVec BitVec::concat(const BitVec& tail) const {
  std::vector<std::uint8_t> bits = bits_;
  bits.insert(bits.end(), tail.bits_.begin(), tail.bits_.end());
  return BitVec(std::move(bits));
}

BitVec BitVec::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > bits_.size()) throw WidthError("bit slice out of range");
  return BitVec(std::vector<std::uint8_t>(bits_.begin() + offset, bits_.begin() + offset + len));
}

bool all_binary(std::span<const Rat> values) {
  for (const auto& v : values) {
    if (!v.is_zero() && v != Rat(1)) return false;
  }
  return true;
}

}  // namespace dg
