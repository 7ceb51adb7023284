#include "dg/diagonal/judge_table.hpp"

#include "dg/ir/interpreter.hpp"

namespace dg::diag {

namespace {

void put_u16(Bytes& out, std::size_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

std::size_t get_u16(const Bytes& in, std::size_t at) {
  return static_cast<std::size_t>(in[at]) | (static_cast<std::size_t>(in[at + 1]) << 8);
}

BitVec binary(const Vector& v, const char* what) {
  if (!all_binary(v)) throw WidthError(std::string(what) + " is not a bit vector");
  return BitVec::from_rats(v);
}

}  // namespace

bool JudgeTable::accepts(const BitVec& input, const BitVec& output) const {
  if (input.width() != in_bits || output.width() != out_bits) throw WidthError("judge table width mismatch");
  return accept.at((input.to_uint() << out_bits) + output.to_uint()) != 0;
}

std::size_t witness_offset(std::size_t in_bits, std::size_t out_bits) {
  return kJudgeTableHeader + in_bits + out_bits;
}

JudgeTable tabulate(const Judge& judge) {
  const std::size_t L = judge.in_width(), K = judge.out_width();
  if (L < 1 || L > kJudgeTableMaxIn || K < 1 || K > kJudgeTableMaxOut) {
    throw WidthError("judge table needs 1 <= L <= 8 and 1 <= K <= 4");
  }
  JudgeTable t;
  t.in_bits = L;
  t.out_bits = K;
  t.neg_input = binary(judge.neg_input(), "negative input");
  t.neg_output = binary(judge.neg_output(), "negative output");
  const std::size_t P = std::size_t{1} << K;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    BitVec in = BitVec::from_uint(r, L);
    t.witness.push_back(binary(ir::eval_values(judge.witness(), in.to_rats()).output, "witness output"));
    for (std::size_t o = 0; o < P; ++o) {
      t.accept.push_back(static_cast<std::uint8_t>(eval_judge(judge, in, BitVec::from_uint(o, K))));
    }
  }
  return t;
}

Bytes encode(const JudgeTable& t) {
  const std::size_t L = t.in_bits, K = t.out_bits, N = t.rows(), P = std::size_t{1} << K;
  const std::size_t wit = witness_offset(L, K);
  const std::size_t acc = wit + N * K;
  const std::size_t rows = acc + N * P;
  Bytes out = {'J', 'T', kJudgeTableVersion, static_cast<std::uint8_t>(L), static_cast<std::uint8_t>(K)};
  put_u16(out, N);
  put_u16(out, rows);
  put_u16(out, acc);
  out.push_back(static_cast<std::uint8_t>(P));
  auto append = [&](const BitVec& b) { out.insert(out.end(), b.bits().begin(), b.bits().end()); };
  append(t.neg_input);
  append(t.neg_output);
  for (const auto& w : t.witness) append(w);
  out.insert(out.end(), t.accept.begin(), t.accept.end());
  for (std::size_t r = 0; r < N; ++r) append(BitVec::from_uint(r, L));
  return out;
}

JudgeTable decode_judge_table(const Bytes& in) {
  if (in.size() < kJudgeTableHeader || in[0] != 'J' || in[1] != 'T') throw DecodeError("missing JT magic", 0);
  if (in[2] != kJudgeTableVersion) throw DecodeError("unsupported judge table version", 2);
  JudgeTable t;
  t.in_bits = in[3];
  t.out_bits = in[4];
  const std::size_t L = t.in_bits, K = t.out_bits;
  if (L < 1 || L > kJudgeTableMaxIn || K < 1 || K > kJudgeTableMaxOut) throw DecodeError("widths out of range", 3);
  const std::size_t N = t.rows(), P = std::size_t{1} << K;
  const std::size_t wit = witness_offset(L, K), acc = wit + N * K, rows = acc + N * P;
  if (get_u16(in, 5) != N || get_u16(in, 7) != rows || get_u16(in, 9) != acc || in[11] != P) {
    throw DecodeError("inconsistent judge table header", 5);
  }
  if (in.size() != rows + N * L) throw DecodeError("judge table has wrong length", in.size());
  for (std::size_t k = kJudgeTableHeader; k < in.size(); ++k) {
    if (in[k] > 1) throw DecodeError("judge table byte is not 0 or 1", k);
  }
  auto bits = [&](std::size_t at, std::size_t n) {
    return BitVec(std::vector<std::uint8_t>(in.begin() + static_cast<std::ptrdiff_t>(at),
                                            in.begin() + static_cast<std::ptrdiff_t>(at + n)));
  };
  t.neg_input = bits(kJudgeTableHeader, L);
  t.neg_output = bits(kJudgeTableHeader + L, K);
  for (std::size_t r = 0; r < N; ++r) t.witness.push_back(bits(wit + r * K, K));
  t.accept.assign(in.begin() + static_cast<std::ptrdiff_t>(acc), in.begin() + static_cast<std::ptrdiff_t>(rows));
  for (std::size_t r = 0; r < N; ++r) {
    if (bits(rows + r * L, L) != BitVec::from_uint(r, L)) throw DecodeError("rows table out of order", rows + r * L);
  }
  return t;
}

std::optional<BitVec> bits_from_bytes(const Bytes& bytes, std::size_t width) {
  if (bytes.size() != width) return std::nullopt;
  for (auto b : bytes) {
    if (b > 1) return std::nullopt;
  }
  return BitVec(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

Bytes bytes_from_bits(const BitVec& bits) { return Bytes(bits.bits().begin(), bits.bits().end()); }

}  // namespace dg::diag
