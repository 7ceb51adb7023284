#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dg/kernel/errors.hpp"

namespace dg::diag {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kIsaVersion = 1;
inline constexpr std::size_t kRegisters = 8;
inline constexpr std::size_t kBuffers = 8;
// Nested CALLV deeper than this fails with status -3.
inline constexpr std::size_t kMaxCallDepth = 256;

enum class Op : std::uint8_t {
  kHalt = 0x00,
  kLoadi = 0x01,  // r, imm32            r := imm
  kMov = 0x02,    // rd, rs              rd := rs
  kAdd = 0x03,    // rd, rs              rd := rd + rs
  kSub = 0x04,    // rd, rs              rd := rd - rs
  kJmp = 0x05,    // addr32
  kJz = 0x06,     // r, addr32           jump if r == 0
  kRead = 0x07,   // r                   next input byte, -1 at end
  kWrite = 0x08,  // r                   append r mod 256 to the output
  kSelf = 0x09,   // b                   append own code bytes to buffer b
  kCallv = 0x0A,  // bp, bi, rf, bo      run buffer bp on input bi with fuel rf
  kBpush = 0x0B,  // b, r                append r mod 256; r < 0 clears b
  kBget = 0x0C,   // rd, b, ri           rd := b[ri], -1 when out of range
};

struct Instr {
  Op op = Op::kHalt;
  std::uint8_t a = 0, b = 0, c = 0, d = 0;  // register / buffer operands
  std::int32_t imm = 0;                      // LOADI immediate
  std::uint32_t target = 0;                  // JMP / JZ byte offset
  std::uint32_t offset = 0;                  // where this instruction starts
  std::uint32_t size = 0;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error("decode error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

std::size_t instruction_size(Op op);
const char* mnemonic(Op op);

// A decoded instruction stream. Jump targets must be instruction starts or
// the end of the code; running off the end halts.
class MicroProgram {
 public:
  // Throws DecodeError.
  explicit MicroProgram(Bytes code);

  const Bytes& code() const { return code_; }
  const std::vector<Instr>& instructions() const { return instrs_; }
  // Index into instructions() of the instruction starting at `offset`.
  std::size_t index_of(std::uint32_t offset) const;

  friend bool operator==(const MicroProgram& a, const MicroProgram& b) { return a.code_ == b.code_; }

 private:
  Bytes code_;
  std::vector<Instr> instrs_;
  std::vector<std::uint32_t> index_;  // byte offset -> instruction index (or npos)
};

struct MicroOutcome {
  enum class Status { kHalted, kStillRunning };
  Status status = Status::kStillRunning;
  Bytes output;          // meaningful when halted
  std::uint64_t steps = 0;

  bool halted() const { return status == Status::kHalted; }
  friend bool operator==(const MicroOutcome&, const MicroOutcome&) = default;
};

// Every instruction costs one step; CALLV additionally charges the steps of
// the nested run. A nested run whose requested fuel exceeds what the caller
// has left is cut at the caller's remaining fuel, and if it has not halted by
// then the caller is out of fuel too. Hence a run that halts with fuel f
// behaves identically with any larger fuel.
MicroOutcome run_micro(const MicroProgram& p, const Bytes& input, std::uint64_t fuel);

// Smallest fuel at which `p` halts on `input`, searched up to `max_fuel`.
std::optional<std::uint64_t> minimal_fuel(const MicroProgram& p, const Bytes& input, std::uint64_t max_fuel);

// Binary file: "DGMP", ISA version byte, instruction stream.
Bytes to_binary(const MicroProgram& p);
MicroProgram from_binary(const Bytes& file);

// Assembly text, one instruction per line:
//   loop:            label
//   LOADI r0, 5      ; comment
//   JZ r0, loop
MicroProgram assemble(std::string_view text);
std::string disassemble(const MicroProgram& p);

// Programmatic assembler with forward labels.
class Assembler {
 public:
  using Label = std::size_t;

  Label label();
  void bind(Label l);

  void halt();
  void loadi(int r, std::int32_t imm);
  void mov(int rd, int rs);
  void add(int rd, int rs);
  void sub(int rd, int rs);
  void jmp(Label l);
  void jz(int r, Label l);
  void read(int r);
  void write(int r);
  void self(int b);
  void callv(int bp, int bi, int rf, int bo);
  void bpush(int b, int r);
  void bget(int rd, int b, int ri);

  // Pushes `bytes` onto buffer b using `scratch` as the value register.
  void push_bytes(int b, const Bytes& bytes, int scratch);
  // Jumps to `l` if r is -1, -2 or -3 (the CALLV failure codes); clobbers scratch.
  void jump_if_call_failed(int r, int scratch, Label l);

  Bytes finish() const;

 private:
  void emit(std::uint8_t v) { code_.push_back(v); }
  void emit_reg(int r);
  void emit_buf(int b);
  void emit_u32(std::uint32_t v);
  void emit_target(Label l);

  Bytes code_;
  std::vector<std::int64_t> bound_;
  std::vector<std::pair<std::size_t, Label>> fixups_;
};

}  // namespace dg::diag
