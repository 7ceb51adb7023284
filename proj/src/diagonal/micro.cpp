#include "dg/diagonal/micro.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>

#include "dg/util/strings.hpp"

namespace dg::diag {

namespace {

constexpr std::uint32_t kNoInstr = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint8_t kMagic[4] = {'D', 'G', 'M', 'P'};

struct OpInfo {
  Op op;
  const char* name;
  std::size_t size;
};

constexpr std::array<OpInfo, 13> kOps = {{
    {Op::kHalt, "HALT", 1},
    {Op::kLoadi, "LOADI", 6},
    {Op::kMov, "MOV", 3},
    {Op::kAdd, "ADD", 3},
    {Op::kSub, "SUB", 3},
    {Op::kJmp, "JMP", 5},
    {Op::kJz, "JZ", 6},
    {Op::kRead, "READ", 2},
    {Op::kWrite, "WRITE", 2},
    {Op::kSelf, "SELF", 2},
    {Op::kCallv, "CALLV", 5},
    {Op::kBpush, "BPUSH", 3},
    {Op::kBget, "BGET", 4},
}};

std::uint32_t read_u32(const Bytes& code, std::size_t at) {
  return static_cast<std::uint32_t>(code[at]) | (static_cast<std::uint32_t>(code[at + 1]) << 8) |
         (static_cast<std::uint32_t>(code[at + 2]) << 16) | (static_cast<std::uint32_t>(code[at + 3]) << 24);
}

std::uint8_t low_byte(const mpz_class& v) { return static_cast<std::uint8_t>(mpz_fdiv_ui(v.get_mpz_t(), 256)); }

class Machine {
 public:
  Machine(const MicroProgram& p, const Bytes& input, std::uint64_t fuel, std::size_t depth)
      : p_(p), input_(input), fuel_(fuel), depth_(depth) {}

  MicroOutcome run() {
    const auto& ins = p_.instructions();
    std::size_t pc = 0;
    while (true) {
      if (pc == ins.size()) return halted();
      if (steps_ >= fuel_) return out_of_fuel();
      const Instr& I = ins[pc];
      ++steps_;
      ++pc;
      switch (I.op) {
        case Op::kHalt:
          return halted();
        case Op::kLoadi:
          regs_[I.a] = static_cast<long>(I.imm);
          break;
        case Op::kMov:
          regs_[I.a] = regs_[I.b];
          break;
        case Op::kAdd:
          regs_[I.a] += regs_[I.b];
          break;
        case Op::kSub:
          regs_[I.a] -= regs_[I.b];
          break;
        case Op::kJmp:
          pc = p_.index_of(I.target);
          break;
        case Op::kJz:
          if (sgn(regs_[I.a]) == 0) pc = p_.index_of(I.target);
          break;
        case Op::kRead:
          regs_[I.a] = in_pos_ < input_.size() ? static_cast<long>(input_[in_pos_++]) : -1L;
          break;
        case Op::kWrite:
          output_.push_back(low_byte(regs_[I.a]));
          break;
        case Op::kSelf:
          bufs_[I.a].insert(bufs_[I.a].end(), p_.code().begin(), p_.code().end());
          break;
        case Op::kCallv:
          if (!call(I)) return out_of_fuel();
          break;
        case Op::kBpush:
          if (sgn(regs_[I.b]) < 0) {
            bufs_[I.a].clear();
          } else {
            bufs_[I.a].push_back(low_byte(regs_[I.b]));
          }
          break;
        case Op::kBget: {
          const mpz_class& idx = regs_[I.c];
          const Bytes& buf = bufs_[I.b];
          if (sgn(idx) >= 0 && idx < buf.size()) {
            regs_[I.a] = static_cast<long>(buf[idx.get_ui()]);
          } else {
            regs_[I.a] = -1L;
          }
          break;
        }
      }
    }
  }

 private:
  // Returns false when this machine itself runs out of fuel.
  bool call(const Instr& I) {
    mpz_class& status = regs_[I.c];
    auto fail = [&](long code) {
      status = code;
      bufs_[I.d].clear();
      return true;
    };
    if (depth_ + 1 > kMaxCallDepth) return fail(-3);
    std::optional<MicroProgram> sub;
    try {
      sub.emplace(bufs_[I.a]);
    } catch (const DecodeError&) {
      return fail(-2);
    }
    const std::uint64_t remaining = fuel_ - steps_;
    std::uint64_t requested = 0;
    bool capped = false;
    if (sgn(status) > 0) {
      if (status.fits_ulong_p() && status.get_ui() <= remaining) {
        requested = status.get_ui();
      } else {
        requested = remaining;
        capped = true;
      }
    }
    Bytes in = bufs_[I.b];
    MicroOutcome r = Machine(*sub, in, requested, depth_ + 1).run();
    if (r.halted()) {
      steps_ += r.steps;
      status = static_cast<unsigned long>(r.steps);
      bufs_[I.d] = std::move(r.output);
      return true;
    }
    if (capped) return false;
    steps_ += requested;
    return fail(-1);
  }

  MicroOutcome halted() { return {MicroOutcome::Status::kHalted, std::move(output_), steps_}; }
  MicroOutcome out_of_fuel() { return {MicroOutcome::Status::kStillRunning, {}, fuel_}; }

  const MicroProgram& p_;
  const Bytes& input_;
  std::uint64_t fuel_;
  std::size_t depth_;
  std::uint64_t steps_ = 0;
  std::size_t in_pos_ = 0;
  std::array<mpz_class, kRegisters> regs_;
  std::array<Bytes, kBuffers> bufs_;
  Bytes output_;
};

const OpInfo* find_op(std::string_view name) {
  for (const auto& o : kOps) {
    if (name == o.name) return &o;
  }
  return nullptr;
}

}  // namespace

std::size_t instruction_size(Op op) { return kOps.at(static_cast<std::size_t>(op)).size; }
const char* mnemonic(Op op) { return kOps.at(static_cast<std::size_t>(op)).name; }

MicroProgram::MicroProgram(Bytes code) : code_(std::move(code)), index_(code_.size() + 1, kNoInstr) {
  std::size_t at = 0;
  while (at < code_.size()) {
    std::uint8_t raw = code_[at];
    if (raw >= kOps.size()) throw DecodeError("unknown opcode " + std::to_string(raw), at);
    Instr I;
    I.op = static_cast<Op>(raw);
    I.offset = static_cast<std::uint32_t>(at);
    I.size = static_cast<std::uint32_t>(kOps[raw].size);
    if (at + I.size > code_.size()) throw DecodeError("truncated instruction", at);
    auto reg = [&](std::size_t k, std::size_t limit) {
      std::uint8_t v = code_[at + k];
      if (v >= limit) throw DecodeError("operand " + std::to_string(v) + " out of range", at);
      return v;
    };
    switch (I.op) {
      case Op::kHalt:
        break;
      case Op::kLoadi:
        I.a = reg(1, kRegisters);
        I.imm = static_cast<std::int32_t>(read_u32(code_, at + 2));
        break;
      case Op::kMov:
      case Op::kAdd:
      case Op::kSub:
        I.a = reg(1, kRegisters);
        I.b = reg(2, kRegisters);
        break;
      case Op::kJmp:
        I.target = read_u32(code_, at + 1);
        break;
      case Op::kJz:
        I.a = reg(1, kRegisters);
        I.target = read_u32(code_, at + 2);
        break;
      case Op::kRead:
      case Op::kWrite:
        I.a = reg(1, kRegisters);
        break;
      case Op::kSelf:
        I.a = reg(1, kBuffers);
        break;
      case Op::kCallv:
        I.a = reg(1, kBuffers);
        I.b = reg(2, kBuffers);
        I.c = reg(3, kRegisters);
        I.d = reg(4, kBuffers);
        break;
      case Op::kBpush:
        I.a = reg(1, kBuffers);
        I.b = reg(2, kRegisters);
        break;
      case Op::kBget:
        I.a = reg(1, kRegisters);
        I.b = reg(2, kBuffers);
        I.c = reg(3, kRegisters);
        break;
    }
    index_[at] = static_cast<std::uint32_t>(instrs_.size());
    instrs_.push_back(I);
    at += I.size;
  }
  index_[code_.size()] = static_cast<std::uint32_t>(instrs_.size());
  for (const auto& I : instrs_) {
    if (I.op != Op::kJmp && I.op != Op::kJz) continue;
    if (I.target > code_.size() || index_[I.target] == kNoInstr) {
      throw DecodeError("jump target " + std::to_string(I.target) + " is not an instruction boundary", I.offset);
    }
  }
}

std::size_t MicroProgram::index_of(std::uint32_t offset) const { return index_[offset]; }

MicroOutcome run_micro(const MicroProgram& p, const Bytes& input, std::uint64_t fuel) {
  if (fuel == 0) throw Error("run_micro needs fuel >= 1");
  return Machine(p, input, fuel, 0).run();
}

std::optional<std::uint64_t> minimal_fuel(const MicroProgram& p, const Bytes& input, std::uint64_t max_fuel) {
  if (!run_micro(p, input, max_fuel).halted()) return std::nullopt;
  std::uint64_t lo = 1, hi = max_fuel;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (run_micro(p, input, mid).halted()) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

Bytes to_binary(const MicroProgram& p) {
  Bytes out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kIsaVersion);
  out.insert(out.end(), p.code().begin(), p.code().end());
  return out;
}

MicroProgram from_binary(const Bytes& file) {
  if (file.size() < 5 || !std::equal(std::begin(kMagic), std::end(kMagic), file.begin())) {
    throw DecodeError("missing DGMP magic", 0);
  }
  if (file[4] != kIsaVersion) throw DecodeError("unsupported ISA version " + std::to_string(file[4]), 4);
  return MicroProgram(Bytes(file.begin() + 5, file.end()));
}

// ---------------------------------------------------------------------------
// Assembler

Assembler::Label Assembler::label() {
  bound_.push_back(-1);
  return bound_.size() - 1;
}

void Assembler::bind(Label l) { bound_.at(l) = static_cast<std::int64_t>(code_.size()); }

void Assembler::emit_reg(int r) {
  if (r < 0 || r >= static_cast<int>(kRegisters)) throw Error("register out of range");
  emit(static_cast<std::uint8_t>(r));
}

void Assembler::emit_buf(int b) {
  if (b < 0 || b >= static_cast<int>(kBuffers)) throw Error("buffer out of range");
  emit(static_cast<std::uint8_t>(b));
}

void Assembler::emit_u32(std::uint32_t v) {
  for (int k = 0; k < 4; ++k) emit(static_cast<std::uint8_t>(v >> (8 * k)));
}

void Assembler::emit_target(Label l) {
  fixups_.emplace_back(code_.size(), l);
  emit_u32(0);
}

void Assembler::halt() { emit(0x00); }
void Assembler::loadi(int r, std::int32_t imm) {
  emit(0x01);
  emit_reg(r);
  emit_u32(static_cast<std::uint32_t>(imm));
}
void Assembler::mov(int rd, int rs) {
  emit(0x02);
  emit_reg(rd);
  emit_reg(rs);
}
void Assembler::add(int rd, int rs) {
  emit(0x03);
  emit_reg(rd);
  emit_reg(rs);
}
void Assembler::sub(int rd, int rs) {
  emit(0x04);
  emit_reg(rd);
  emit_reg(rs);
}
void Assembler::jmp(Label l) {
  emit(0x05);
  emit_target(l);
}
void Assembler::jz(int r, Label l) {
  emit(0x06);
  emit_reg(r);
  emit_target(l);
}
void Assembler::read(int r) {
  emit(0x07);
  emit_reg(r);
}
void Assembler::write(int r) {
  emit(0x08);
  emit_reg(r);
}
void Assembler::self(int b) {
  emit(0x09);
  emit_buf(b);
}
void Assembler::callv(int bp, int bi, int rf, int bo) {
  emit(0x0A);
  emit_buf(bp);
  emit_buf(bi);
  emit_reg(rf);
  emit_buf(bo);
}
void Assembler::bpush(int b, int r) {
  emit(0x0B);
  emit_buf(b);
  emit_reg(r);
}
void Assembler::bget(int rd, int b, int ri) {
  emit(0x0C);
  emit_reg(rd);
  emit_buf(b);
  emit_reg(ri);
}

void Assembler::push_bytes(int b, const Bytes& bytes, int scratch) {
  for (auto v : bytes) {
    loadi(scratch, v);
    bpush(b, scratch);
  }
}

void Assembler::jump_if_call_failed(int r, int scratch, Label l) {
  for (int code = 1; code <= 3; ++code) {
    loadi(scratch, code);
    add(scratch, r);
    jz(scratch, l);
  }
}

Bytes Assembler::finish() const {
  Bytes out = code_;
  for (auto [at, l] : fixups_) {
    if (bound_.at(l) < 0) throw Error("unbound assembler label");
    auto v = static_cast<std::uint32_t>(bound_[l]);
    for (int k = 0; k < 4; ++k) out[at + k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text assembly

namespace {

struct Operand {
  enum class Kind { kReg, kBuf, kNumber, kLabel } kind;
  long long value = 0;
  std::string label;
};

Operand parse_operand(const std::string& tok, std::size_t line) {
  auto is_digits = [](std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (tok.size() >= 2 && (tok[0] == 'r' || tok[0] == 'b') && is_digits(tok.substr(1)) && tok[1] != '-') {
    long long v = std::stoll(tok.substr(1));
    return {tok[0] == 'r' ? Operand::Kind::kReg : Operand::Kind::kBuf, v, {}};
  }
  if (is_digits(tok)) {
    try {
      return {Operand::Kind::kNumber, std::stoll(tok), {}};
    } catch (const std::exception&) {
      throw ParseError("number out of range: " + tok, line);
    }
  }
  if (tok.empty()) throw ParseError("empty operand", line);
  return {Operand::Kind::kLabel, 0, tok};
}

}  // namespace

MicroProgram assemble(std::string_view text) {
  struct Line {
    const OpInfo* op;
    std::vector<Operand> operands;
    std::size_t line;
  };
  std::vector<Line> body;
  std::map<std::string, std::uint32_t> labels;
  std::uint32_t at = 0;
  auto lines = util::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string s = lines[n];
    if (auto c = s.find(';'); c != std::string::npos) s.resize(c);
    s = util::trim(s);
    while (!s.empty()) {
      auto colon = s.find(':');
      auto space = s.find_first_of(" \t");
      if (colon == std::string::npos || (space != std::string::npos && space < colon)) break;
      std::string name = util::trim(s.substr(0, colon));
      if (name.empty() || !labels.emplace(name, at).second) throw ParseError("bad or duplicate label", n + 1);
      s = util::trim(s.substr(colon + 1));
    }
    if (s.empty()) continue;
    auto sp = s.find_first_of(" \t");
    std::string name = s.substr(0, sp);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
    const OpInfo* op = find_op(name);
    if (!op) throw ParseError("unknown mnemonic '" + name + "'", n + 1);
    Line L{op, {}, n + 1};
    if (sp != std::string::npos) {
      for (const auto& part : util::split(s.substr(sp), ',')) L.operands.push_back(parse_operand(util::trim(part), n + 1));
    }
    body.push_back(std::move(L));
    at += static_cast<std::uint32_t>(op->size);
  }

  Bytes code;
  for (const auto& L : body) {
    auto want = [&](std::initializer_list<Operand::Kind> kinds) {
      if (L.operands.size() != kinds.size()) {
        throw ParseError(std::string(L.op->name) + " expects " + std::to_string(kinds.size()) + " operands", L.line);
      }
      std::size_t k = 0;
      for (auto kind : kinds) {
        const Operand& o = L.operands[k++];
        bool ok = o.kind == kind || (kind == Operand::Kind::kLabel && o.kind == Operand::Kind::kNumber);
        if (!ok) throw ParseError("operand " + std::to_string(k) + " of " + L.op->name + " has the wrong kind", L.line);
        if ((o.kind == Operand::Kind::kReg && (o.value < 0 || o.value >= static_cast<long long>(kRegisters))) ||
            (o.kind == Operand::Kind::kBuf && (o.value < 0 || o.value >= static_cast<long long>(kBuffers)))) {
          throw ParseError("register/buffer index out of range", L.line);
        }
      }
    };
    auto u32 = [&](std::uint32_t v) {
      for (int k = 0; k < 4; ++k) code.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
    };
    auto target = [&](const Operand& o) -> std::uint32_t {
      if (o.kind == Operand::Kind::kNumber) {
        if (o.value < 0 || o.value > std::numeric_limits<std::uint32_t>::max()) throw ParseError("bad jump target", L.line);
        return static_cast<std::uint32_t>(o.value);
      }
      auto it = labels.find(o.label);
      if (it == labels.end()) throw ParseError("undefined label '" + o.label + "'", L.line);
      return it->second;
    };
    using K = Operand::Kind;
    auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(L.operands[k].value); };
    code.push_back(static_cast<std::uint8_t>(L.op->op));
    switch (L.op->op) {
      case Op::kHalt:
        want({});
        break;
      case Op::kLoadi:
        want({K::kReg, K::kNumber});
        if (L.operands[1].value < std::numeric_limits<std::int32_t>::min() ||
            L.operands[1].value > std::numeric_limits<std::int32_t>::max()) {
          throw ParseError("LOADI immediate out of 32-bit range", L.line);
        }
        code.push_back(byte(0));
        u32(static_cast<std::uint32_t>(static_cast<std::int32_t>(L.operands[1].value)));
        break;
      case Op::kMov:
      case Op::kAdd:
      case Op::kSub:
        want({K::kReg, K::kReg});
        code.push_back(byte(0));
        code.push_back(byte(1));
        break;
      case Op::kJmp:
        want({K::kLabel});
        u32(target(L.operands[0]));
        break;
      case Op::kJz:
        want({K::kReg, K::kLabel});
        code.push_back(byte(0));
        u32(target(L.operands[1]));
        break;
      case Op::kRead:
      case Op::kWrite:
        want({K::kReg});
        code.push_back(byte(0));
        break;
      case Op::kSelf:
        want({K::kBuf});
        code.push_back(byte(0));
        break;
      case Op::kCallv:
        want({K::kBuf, K::kBuf, K::kReg, K::kBuf});
        for (std::size_t k = 0; k < 4; ++k) code.push_back(byte(k));
        break;
      case Op::kBpush:
        want({K::kBuf, K::kReg});
        code.push_back(byte(0));
        code.push_back(byte(1));
        break;
      case Op::kBget:
        want({K::kReg, K::kBuf, K::kReg});
        for (std::size_t k = 0; k < 3; ++k) code.push_back(byte(k));
        break;
    }
  }
  try {
    return MicroProgram(std::move(code));
  } catch (const DecodeError& e) {
    throw ParseError(e.what());
  }
}

std::string disassemble(const MicroProgram& p) {
  std::map<std::uint32_t, std::string> names;
  for (const auto& I : p.instructions()) {
    if (I.op == Op::kJmp || I.op == Op::kJz) names.emplace(I.target, "L" + std::to_string(I.target));
  }
  std::ostringstream os;
  auto label_at = [&](std::uint32_t off) {
    if (auto it = names.find(off); it != names.end()) os << it->second << ":\n";
  };
  auto r = [](int v) { return "r" + std::to_string(v); };
  auto b = [](int v) { return "b" + std::to_string(v); };
  for (const auto& I : p.instructions()) {
    label_at(I.offset);
    os << "  " << mnemonic(I.op);
    switch (I.op) {
      case Op::kHalt: break;
      case Op::kLoadi: os << ' ' << r(I.a) << ", " << I.imm; break;
      case Op::kMov:
      case Op::kAdd:
      case Op::kSub: os << ' ' << r(I.a) << ", " << r(I.b); break;
      case Op::kJmp: os << ' ' << names.at(I.target); break;
      case Op::kJz: os << ' ' << r(I.a) << ", " << names.at(I.target); break;
      case Op::kRead:
      case Op::kWrite: os << ' ' << r(I.a); break;
      case Op::kSelf: os << ' ' << b(I.a); break;
      case Op::kCallv: os << ' ' << b(I.a) << ", " << b(I.b) << ", " << r(I.c) << ", " << b(I.d); break;
      case Op::kBpush: os << ' ' << b(I.a) << ", " << r(I.b); break;
      case Op::kBget: os << ' ' << r(I.a) << ", " << b(I.b) << ", " << r(I.c); break;
    }
    os << '\n';
  }
  label_at(static_cast<std::uint32_t>(p.code().size()));
  return os.str();
}

}  // namespace dg::diag
