#pragma once

#include <cstdint>
#include <vector>

#include "dg/diagonal/micro.hpp"
#include "dg/kernel/bitvec.hpp"
#include "dg/kernel/judge.hpp"

namespace dg::diag {

// Byte image of a judge over bits, as seen by micro programs.
//
//   0..2   'J' 'T' version
//   3      L                 1..8
//   4      K                 1..4
//   5..6   N = 2^L           little endian
//   7..8   rows offset
//   9..10  accept offset
//   11     P = 2^K
//   12..   i- (L bytes), o- (K bytes), witness table (N*K bytes),
//          accept table (N*P bytes, row*P + output value), rows (N*L bytes)
//
// Every bit is stored as a whole byte 0 or 1. Row r holds the bits of r.
struct JudgeTable {
  std::size_t in_bits = 0;
  std::size_t out_bits = 0;
  BitVec neg_input;
  BitVec neg_output;
  std::vector<BitVec> witness;       // indexed by input value
  std::vector<std::uint8_t> accept;  // row * 2^K + output value

  std::size_t rows() const { return std::size_t{1} << in_bits; }
  bool accepts(const BitVec& input, const BitVec& output) const;
  friend bool operator==(const JudgeTable&, const JudgeTable&) = default;
};

inline constexpr std::uint8_t kJudgeTableVersion = 1;
inline constexpr std::size_t kJudgeTableHeader = 12;
inline constexpr std::size_t kJudgeTableMaxIn = 8;
inline constexpr std::size_t kJudgeTableMaxOut = 4;

// Tabulates a judge whose witness produces bits. Throws WidthError when the
// widths are outside the table limits or the witness/negative pair is not
// binary.
JudgeTable tabulate(const Judge& judge);

Bytes encode(const JudgeTable& t);
// Throws DecodeError.
JudgeTable decode_judge_table(const Bytes& bytes);

// Layout helpers shared with the bytecode that reads tables.
std::size_t witness_offset(std::size_t in_bits, std::size_t out_bits);

// Micro model I/O convention: one byte per bit. Returns nullopt unless the
// bytes are exactly `width` values in {0, 1}.
std::optional<BitVec> bits_from_bytes(const Bytes& bytes, std::size_t width);
Bytes bytes_from_bits(const BitVec& bits);

}  // namespace dg::diag
