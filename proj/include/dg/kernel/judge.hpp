#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dg/ir/program.hpp"
#include "dg/kernel/bitvec.hpp"
#include "dg/kernel/rat.hpp"

namespace dg {

using ir::Vector;

// constant + sum_k coeffs[k] * x_{k+1} >= 0
struct LinearIneq {
  Rat constant;
  Vector coeffs;

  Rat lhs(std::span<const Rat> x) const;
  friend bool operator==(const LinearIneq&, const LinearIneq&) = default;
};

// Boolean combination of linear inequalities.
struct Formula {
  enum class Op { kAtom, kAll, kAny };
  Op op = Op::kAtom;
  LinearIneq atom;
  std::vector<Formula> children;

  static Formula leaf(LinearIneq ineq);
  static Formula all(std::vector<Formula> children);
  static Formula any(std::vector<Formula> children);

  bool holds(std::span<const Rat> x) const;
  // Atoms have depth 0.
  std::size_t depth() const;
  friend bool operator==(const Formula&, const Formula&) = default;
};

inline constexpr std::size_t kMaxFormulaDepth = 8;

enum class JudgeKind { kPredicate, kLinear };

// J(i, o) in {0, 1} over an input of in_width values and an output of
// out_width values, with a positive witness program and a recorded negative
// pair. Immutable after construction.
class Judge {
 public:
  static Judge predicate(std::string name, std::size_t in_width, std::size_t out_width, ir::TotalProgram body,
                         ir::TotalProgram witness, Vector neg_input, Vector neg_output);
  static Judge linear(std::string name, std::size_t in_width, std::size_t out_width, Formula formula,
                      ir::TotalProgram witness, Vector neg_input, Vector neg_output);

  const std::string& name() const { return name_; }
  JudgeKind kind() const { return kind_; }
  std::size_t in_width() const { return in_width_; }
  std::size_t out_width() const { return out_width_; }
  // For linear judges this is the formula compiled to the IR (affine + step).
  const ir::TotalProgram& body() const { return body_; }
  const ir::TotalProgram& witness() const { return witness_; }
  const std::optional<Formula>& formula() const { return formula_; }
  const Vector& neg_input() const { return neg_input_; }
  const Vector& neg_output() const { return neg_output_; }

  // Throws WidthError on mismatched widths.
  bool eval(std::span<const Rat> input, std::span<const Rat> output) const;

  friend bool operator==(const Judge& a, const Judge& b);

 private:
  Judge(std::string name, JudgeKind kind, std::size_t in_width, std::size_t out_width, ir::TotalProgram body,
        std::optional<Formula> formula, ir::TotalProgram witness, Vector neg_input, Vector neg_output);

  std::string name_;
  JudgeKind kind_;
  std::size_t in_width_;
  std::size_t out_width_;
  ir::TotalProgram body_;
  std::optional<Formula> formula_;
  ir::TotalProgram witness_;
  Vector neg_input_;
  Vector neg_output_;
};

// Compiles a formula over `arity` variables into a program returning 0 or 1.
ir::TotalProgram compile_formula(const Formula& f, std::size_t arity);

int eval_judge(const Judge& judge, const BitVec& input, const BitVec& output);

struct NontrivialCheck {
  enum class Status { kOk, kTrivialJudge, kResourceExceeded };
  Status status = Status::kOk;
  std::string reason;

  bool ok() const { return status == Status::kOk; }
};

inline constexpr std::size_t kDefaultMaxInputBits = 24;

// Exhaustive over the 2^L bit inputs.
NontrivialCheck check_nontrivial(const Judge& judge, std::size_t input_width,
                                 std::size_t max_input_bits = kDefaultMaxInputBits);

// Judge text format; see docs/judge-format.md.
Judge parse_judge(std::string_view text);
std::string print_judge(const Judge& judge);

LinearIneq parse_ineq(std::string_view text, std::size_t arity);
std::string print_ineq(const LinearIneq& ineq);
Formula parse_formula(std::string_view text, std::size_t arity);
std::string print_formula(const Formula& f);

// "0101" for 0/1 vectors, otherwise "[a,b,...]".
std::string print_point(const Vector& v);
Vector parse_point(std::string_view text);

}  // namespace dg
