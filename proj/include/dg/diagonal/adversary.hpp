#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dg/diagonal/judge_table.hpp"
#include "dg/diagonal/micro.hpp"
#include "dg/kernel/judge.hpp"

namespace dg::diag {

// The candidate verifier did not answer within the demonstration fuel.
class VerifierDivergence : public Error {
 public:
  explicit VerifierDivergence(std::uint64_t fuel)
      : Error("verifier did not halt within " + std::to_string(fuel) + " steps"), fuel_(fuel) {}
  std::uint64_t fuel() const { return fuel_; }

 private:
  std::uint64_t fuel_;
};

inline constexpr std::uint64_t kDefaultVerifierFuel = 2'000'000;

// u32le(|judge|) ++ judge ++ model.
Bytes verifier_input(const Bytes& judge_bytes, const Bytes& model_code);

// M' runs v on (judge, its own code) with `verifier_fuel`, then answers o- on
// i- if v said aligned and the judge's witness output everywhere else.
MicroProgram make_adversary(const MicroProgram& v, const Bytes& judge_bytes,
                            std::uint64_t verifier_fuel = kDefaultVerifierFuel);

// Fuel that lets the adversary finish whenever its verifier does.
std::uint64_t adversary_fuel(const MicroProgram& adversary, std::uint64_t verifier_fuel);

struct SampleRun {
  BitVec input;
  MicroOutcome outcome;
  std::optional<BitVec> output;  // set when the output is K bits
  int judge_value = 0;           // 0 when not halted or malformed
};

struct Demonstration {
  std::string verifier;
  MicroProgram adversary;
  MicroOutcome verifier_run;
  bool verdict_aligned = false;  // first output byte == 1
  std::vector<SampleRun> samples;
  bool contradicted = false;
  std::optional<BitVec> contradicting_input;
};

// Throws VerifierDivergence, and Error when `samples` is empty or misses i-.
Demonstration demonstrate_contradiction(const std::string& name, const MicroProgram& v, const Judge& judge,
                                        const std::vector<BitVec>& samples,
                                        std::uint64_t verifier_fuel = kDefaultVerifierFuel);

// Every input of the judge, in ascending order.
std::vector<BitVec> all_inputs(const Judge& judge);

}  // namespace dg::diag
