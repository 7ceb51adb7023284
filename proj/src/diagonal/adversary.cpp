#include "dg/diagonal/adversary.hpp"

#include <algorithm>
#include <limits>

namespace dg::diag {

Bytes verifier_input(const Bytes& judge_bytes, const Bytes& model_code) {
  Bytes out;
  auto n = static_cast<std::uint32_t>(judge_bytes.size());
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(n >> (8 * k)));
  out.insert(out.end(), judge_bytes.begin(), judge_bytes.end());
  out.insert(out.end(), model_code.begin(), model_code.end());
  return out;
}

MicroProgram make_adversary(const MicroProgram& v, const Bytes& judge_bytes, std::uint64_t verifier_fuel) {
  const JudgeTable t = decode_judge_table(judge_bytes);
  if (verifier_fuel == 0 || verifier_fuel > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
    throw Error("verifier fuel must be in [1, 2^31)");
  }
  using L = Assembler::Label;
  Assembler a;
  Bytes prefix = verifier_input(judge_bytes, {});
  a.push_bytes(1, prefix, 0);
  a.self(1);
  a.push_bytes(0, v.code(), 0);
  L spin = a.label(), aligned = a.label(), witness = a.label();
  a.loadi(1, static_cast<std::int32_t>(verifier_fuel));
  a.callv(0, 1, 1, 2);
  a.jump_if_call_failed(1, 0, spin);
  // r2 = verdict - 1, zero iff v said aligned
  a.loadi(0, 0);
  a.bget(2, 2, 0);
  a.loadi(0, -1);
  a.add(2, 0);

  // r3 = input value, r4 = 1 iff input == i-
  a.loadi(3, 0);
  a.loadi(4, 1);
  a.loadi(7, 1);
  for (std::size_t k = 0; k < t.in_bits; ++k) {
    L zero = a.label(), next = a.label();
    a.read(5);
    a.add(3, 3);
    a.jz(5, zero);
    a.add(3, 7);
    if (!t.neg_input[k]) a.loadi(4, 0);
    a.jmp(next);
    a.bind(zero);
    if (t.neg_input[k]) a.loadi(4, 0);
    a.bind(next);
  }
  a.jz(2, aligned);
  a.jmp(witness);
  a.bind(aligned);
  a.jz(4, witness);
  for (std::size_t k = 0; k < t.out_bits; ++k) {
    a.loadi(5, t.neg_output[k] ? 1 : 0);
    a.write(5);
  }
  a.halt();

  a.bind(witness);
  a.loadi(6, static_cast<std::int32_t>(4 + witness_offset(t.in_bits, t.out_bits)));
  for (std::size_t k = 0; k < t.out_bits; ++k) a.add(6, 3);
  for (std::size_t k = 0; k < t.out_bits; ++k) {
    a.bget(5, 1, 6);
    a.write(5);
    a.add(6, 7);
  }
  a.halt();

  a.bind(spin);
  a.jmp(spin);
  return MicroProgram(a.finish());
}

std::uint64_t adversary_fuel(const MicroProgram& adversary, std::uint64_t verifier_fuel) {
  // Outside the spin loop every instruction runs at most once.
  return verifier_fuel + adversary.instructions().size() + 1;
}

std::vector<BitVec> all_inputs(const Judge& judge) {
  const std::size_t L = judge.in_width();
  if (L > kJudgeTableMaxIn) throw WidthError("judge too wide to enumerate");
  std::vector<BitVec> out;
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << L); ++r) out.push_back(BitVec::from_uint(r, L));
  return out;
}

Demonstration demonstrate_contradiction(const std::string& name, const MicroProgram& v, const Judge& judge,
                                        const std::vector<BitVec>& samples, std::uint64_t verifier_fuel) {
  const JudgeTable table = tabulate(judge);
  if (samples.empty()) throw Error("demonstration needs at least one sample input");
  if (std::find(samples.begin(), samples.end(), table.neg_input) == samples.end()) {
    throw Error("sample inputs must include the negative input " + table.neg_input.to_string());
  }
  const Bytes jb = encode(table);
  Demonstration d{name, make_adversary(v, jb, verifier_fuel), {}, false, {}, false, std::nullopt};
  d.verifier_run = run_micro(v, verifier_input(jb, d.adversary.code()), verifier_fuel);
  if (!d.verifier_run.halted()) throw VerifierDivergence(verifier_fuel);
  d.verdict_aligned = !d.verifier_run.output.empty() && d.verifier_run.output[0] == 1;

  const std::uint64_t fuel = adversary_fuel(d.adversary, verifier_fuel);
  bool all_accepted = true;
  for (const auto& x : samples) {
    if (x.width() != judge.in_width()) throw WidthError("sample input has the wrong width");
    SampleRun s{x, run_micro(d.adversary, bytes_from_bits(x), fuel), std::nullopt, 0};
    if (s.outcome.halted()) s.output = bits_from_bytes(s.outcome.output, judge.out_width());
    if (s.output) s.judge_value = eval_judge(judge, x, *s.output);
    if (s.judge_value == 0) {
      all_accepted = false;
      if (!d.contradicting_input) d.contradicting_input = x;
    }
    d.samples.push_back(std::move(s));
  }
  d.contradicted = d.verdict_aligned ? !all_accepted : all_accepted;
  if (!d.verdict_aligned) d.contradicting_input.reset();
  return d;
}

}  // namespace dg::diag
