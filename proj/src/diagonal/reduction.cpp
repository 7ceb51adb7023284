#include "dg/diagonal/reduction.hpp"

namespace dg::diag {

namespace {

// Runs buffer `prog` on buffer `in` into `out` with fuel 1, 2, 4, ... until
// it halts. Clobbers r0..r2; needs r7 = 1.
void run_escalating(Assembler& a, int prog, int in, int out) {
  using L = Assembler::Label;
  L attempt = a.label(), retry = a.label(), done = a.label();
  a.loadi(1, 1);
  a.bind(attempt);
  a.mov(2, 1);
  a.callv(prog, in, 2, out);
  a.jump_if_call_failed(2, 0, retry);
  a.jmp(done);
  a.bind(retry);
  a.add(1, 1);
  a.jmp(attempt);
  a.bind(done);
}

}  // namespace

MicroProgram build_halting_reduction(const MicroProgram& m, const Bytes& i, const MicroProgram& p_pos) {
  using L = Assembler::Label;
  Assembler a;
  a.loadi(7, 1);
  a.push_bytes(0, m.code(), 0);
  a.push_bytes(1, i, 0);
  run_escalating(a, 0, 1, 2);

  L copy = a.label(), copied = a.label();
  a.bind(copy);
  a.read(0);
  a.mov(2, 0);
  a.add(2, 7);
  a.jz(2, copied);
  a.bpush(3, 0);
  a.jmp(copy);
  a.bind(copied);
  a.push_bytes(4, p_pos.code(), 0);
  run_escalating(a, 4, 3, 5);

  L emit = a.label(), done = a.label();
  a.loadi(3, 0);
  a.bind(emit);
  a.bget(0, 5, 3);
  a.mov(2, 0);
  a.add(2, 7);
  a.jz(2, done);
  a.write(0);
  a.add(3, 7);
  a.jmp(emit);
  a.bind(done);
  a.halt();
  return MicroProgram(a.finish());
}

ReductionReport evaluate_reduction(const MicroProgram& m, const Bytes& i, const MicroProgram& p_pos,
                                   const std::vector<Bytes>& samples, std::uint64_t fuel) {
  ReductionReport r{build_halting_reduction(m, i, p_pos), false, 0, 0, {}, std::nullopt, true};
  MicroOutcome mo = run_micro(m, i, fuel);
  r.m_halted = mo.halted();
  r.m_steps = mo.steps;

  std::uint64_t p_fuel = 0, longest = 0;
  std::vector<MicroOutcome> expected;
  for (const auto& x : samples) {
    MicroOutcome e = run_micro(p_pos, x, fuel);
    if (!e.halted()) throw Error("p_pos did not halt within the fuel on a sample");
    p_fuel = std::max(p_fuel, e.steps);
    longest = std::max<std::uint64_t>(longest, x.size());
    expected.push_back(std::move(e));
  }
  // Each escalation spends under three times the successful budget, plus a
  // bounded loop overhead per doubling.
  r.reduction_fuel = 4 * (fuel + p_fuel) + 8 * r.reduction.instructions().size() + 8 * longest + 2048;

  for (std::size_t k = 0; k < samples.size(); ++k) {
    ReductionSample s{samples[k], expected[k], run_micro(r.reduction, samples[k], r.reduction_fuel), false};
    s.matches = r.m_halted ? (s.reduction.halted() && s.reduction.output == s.expected.output) : !s.reduction.halted();
    r.matches = r.matches && s.matches;
    r.samples.push_back(std::move(s));
  }
  if (r.m_halted && !samples.empty()) r.minimal_fuel = minimal_fuel(r.reduction, samples.front(), r.reduction_fuel);
  return r;
}

}  // namespace dg::diag
