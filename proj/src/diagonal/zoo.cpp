#include "dg/diagonal/zoo.hpp"

namespace dg::diag {

namespace {

using L = Assembler::Label;

// Leaves the judge bytes in b0 and the model bytes in b1; r7 = 1.
void split_input(Assembler& a) {
  a.loadi(7, 1);
  a.read(0);
  for (int shift = 8; shift <= 24; shift += 8) {
    a.read(1);
    for (int k = 0; k < shift; ++k) a.add(1, 1);
    a.add(0, 1);
  }
  L judge_loop = a.label(), judge_done = a.label(), model_loop = a.label(), model_done = a.label();
  a.bind(judge_loop);
  a.jz(0, judge_done);
  a.read(1);
  a.mov(2, 1);
  a.add(2, 7);
  a.jz(2, judge_done);
  a.bpush(0, 1);
  a.sub(0, 7);
  a.jmp(judge_loop);
  a.bind(judge_done);
  a.bind(model_loop);
  a.read(1);
  a.mov(2, 1);
  a.add(2, 7);
  a.jz(2, model_done);
  a.bpush(1, 1);
  a.jmp(model_loop);
  a.bind(model_done);
}

void answer(Assembler& a, L at, int verdict) {
  a.bind(at);
  a.loadi(3, verdict);
  a.write(3);
  a.halt();
}

MicroProgram build(const Assembler& a) { return MicroProgram(a.finish()); }

}  // namespace

MicroProgram constant_verifier(bool verdict) {
  Assembler a;
  a.loadi(0, verdict ? 1 : 0);
  a.write(0);
  a.halt();
  return build(a);
}

MicroProgram simulating_verifier(std::size_t rows, std::int32_t fuel_per_row) {
  Assembler a;
  split_input(a);
  // b7 = [L, K, P]
  for (int at : {3, 4, 11}) {
    a.loadi(5, at);
    a.bget(4, 0, 5);
    a.bpush(7, 4);
  }
  // r0 = rows offset, r1 = accept offset
  for (auto [reg, lo] : {std::pair{0, 7}, std::pair{1, 9}}) {
    a.loadi(5, lo + 1);
    a.bget(reg, 0, 5);
    for (int k = 0; k < 8; ++k) a.add(reg, reg);
    a.loadi(5, lo);
    a.bget(4, 0, 5);
    a.add(reg, 4);
  }
  a.loadi(2, static_cast<std::int32_t>(rows));

  L row_loop = a.label(), accept_all = a.label(), reject = a.label();
  a.bind(row_loop);
  a.jz(2, accept_all);
  a.bget(3, 0, 0);
  a.mov(4, 3);
  a.loadi(5, 1);
  a.add(4, 5);
  a.jz(4, accept_all);

  // b2 = this row's input bits
  a.loadi(4, -1);
  a.bpush(2, 4);
  a.loadi(4, 0);
  a.bget(5, 7, 4);
  a.mov(6, 0);
  L copy = a.label(), copied = a.label();
  a.bind(copy);
  a.jz(5, copied);
  a.bget(4, 0, 6);
  a.bpush(2, 4);
  a.loadi(4, 1);
  a.add(6, 4);
  a.sub(5, 4);
  a.jmp(copy);
  a.bind(copied);
  a.mov(0, 6);

  a.loadi(3, fuel_per_row);
  a.callv(1, 2, 3, 3);
  a.jump_if_call_failed(3, 4, reject);

  // r3 = output value; every byte must be 0 or 1 and there must be K of them
  a.loadi(3, 0);
  a.loadi(6, 0);
  a.loadi(4, 1);
  a.bget(5, 7, 4);
  L dec = a.label(), one = a.label(), decoded = a.label(), sized = a.label();
  a.bind(dec);
  a.jz(5, decoded);
  a.bget(4, 3, 6);
  a.add(3, 3);
  a.loadi(7, 1);
  a.add(6, 7);
  a.sub(5, 7);
  a.jz(4, dec);
  a.sub(4, 7);
  a.jz(4, one);
  a.jmp(reject);
  a.bind(one);
  a.add(3, 7);
  a.jmp(dec);
  a.bind(decoded);
  a.bget(4, 3, 6);
  a.loadi(7, 1);
  a.add(4, 7);
  a.jz(4, sized);
  a.jmp(reject);
  a.bind(sized);

  a.mov(4, 1);
  a.add(4, 3);
  a.bget(5, 0, 4);
  a.jz(5, reject);
  a.loadi(7, 2);
  a.bget(5, 7, 7);
  a.add(1, 5);
  a.loadi(7, 1);
  a.sub(2, 7);
  a.jmp(row_loop);

  answer(a, accept_all, 1);
  answer(a, reject, 0);
  return build(a);
}

MicroProgram bytes_hash_verifier() {
  Assembler a;
  split_input(a);
  a.loadi(3, 1);
  a.loadi(6, 0);
  L loop = a.label(), done = a.label(), next = a.label();
  a.bind(loop);
  a.bget(4, 1, 6);
  a.mov(5, 4);
  a.add(5, 7);
  a.jz(5, done);
  a.add(6, 7);
  a.jz(4, next);
  a.jmp(loop);
  a.bind(next);
  a.mov(5, 7);
  a.sub(5, 3);
  a.mov(3, 5);
  a.jmp(loop);
  a.bind(done);
  a.write(3);
  a.halt();
  return build(a);
}

MicroProgram self_reference_verifier() {
  Assembler a;
  split_input(a);
  a.loadi(6, 0);
  L loop = a.label(), clean = a.label(), found = a.label();
  a.bind(loop);
  a.bget(4, 1, 6);
  a.mov(5, 4);
  a.add(5, 7);
  a.jz(5, clean);
  a.add(6, 7);
  a.loadi(5, static_cast<std::int32_t>(Op::kSelf));
  a.sub(4, 5);
  a.jz(4, found);
  a.jmp(loop);
  answer(a, clean, 1);
  answer(a, found, 0);
  return build(a);
}

MicroProgram diverging_verifier() {
  Assembler a;
  L top = a.label();
  a.bind(top);
  a.jmp(top);
  return build(a);
}

std::vector<Candidate> verifier_zoo() {
  return {
      {"constant_true", constant_verifier(true)},
      {"constant_false", constant_verifier(false)},
      {"fuel_bounded_simulator", simulating_verifier()},
      {"bytes_hash", bytes_hash_verifier()},
      {"self_reference", self_reference_verifier()},
  };
}

}  // namespace dg::diag
