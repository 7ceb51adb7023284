#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dg/kernel/rat.hpp"

namespace dg {

struct Counterexample {
  std::vector<Rat> input;
  std::vector<Rat> output;  // the model's actual output on `input`

  friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

struct Verdict {
  enum class Outcome { kAligned, kMisaligned, kTrivialJudge, kResourceExceeded };

  Outcome outcome = Outcome::kAligned;
  std::optional<Counterexample> counterexample;  // kMisaligned only
  std::string reason;                            // kTrivialJudge only
  std::string budget;                            // kResourceExceeded only
  std::uint64_t limit = 0;
  // Per-phase counters (evaluations, interpreter steps, regions, ...), in
  // the order they were recorded.
  std::vector<std::pair<std::string, std::uint64_t>> stats;

  static Verdict aligned() { return {}; }
  static Verdict misaligned(Counterexample cex) {
    Verdict v;
    v.outcome = Outcome::kMisaligned;
    v.counterexample = std::move(cex);
    return v;
  }
  static Verdict trivial_judge(std::string reason) {
    Verdict v;
    v.outcome = Outcome::kTrivialJudge;
    v.reason = std::move(reason);
    return v;
  }
  static Verdict resource_exceeded(std::string budget, std::uint64_t limit) {
    Verdict v;
    v.outcome = Outcome::kResourceExceeded;
    v.budget = std::move(budget);
    v.limit = limit;
    return v;
  }

  bool is_aligned() const { return outcome == Outcome::kAligned; }
  bool is_misaligned() const { return outcome == Outcome::kMisaligned; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

const char* to_string(Verdict::Outcome o);

}  // namespace dg
