#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dg/ir/agent.hpp"

namespace dg::verify {

struct HaltingOptions {
  std::size_t memory_bound = 20;      // bits of state the caller admits to
  std::size_t max_memory_bits = 20;   // hard limit on memory_bound
  std::uint64_t step_budget = (std::uint64_t{1} << 20) + 1;
  // Fixed loop input and initial state; all zeros when absent.
  std::optional<BitVec> input;
  std::optional<BitVec> initial_state;
};

struct HaltingResult {
  enum class Status { kHalts, kDiverges, kResourceExceeded };
  Status status = Status::kHalts;
  std::uint64_t steps = 0;         // kHalts: steps until a final state
  std::uint64_t cycle_start = 0;   // kDiverges: index of the first repeated state
  std::uint64_t cycle_length = 0;  // kDiverges
  std::string budget;              // kResourceExceeded
  std::uint64_t limit = 0;

  friend bool operator==(const HaltingResult&, const HaltingResult&) = default;
};

// Runs the agent's step model with no theta bound, recording every visited
// state. A final state means it halts; a repeated state means it never will.
HaltingResult verify_halting(const ir::AgentLoop& agent, const HaltingOptions& options = {});

struct ClosureOptions {
  std::size_t max_state_bits = 16;
  std::size_t max_input_bits = 16;
  unsigned workers = 1;
};

struct ClosureResult {
  enum class Status { kOk, kViolation, kResourceExceeded };
  Status status = Status::kOk;
  BitVec state;  // kViolation: final state that leaves the set
  BitVec input;
  BitVec successor;
  std::string budget;
  std::uint64_t limit = 0;
  std::uint64_t transitions_checked = 0;

  friend bool operator==(const ClosureResult&, const ClosureResult&) = default;
};

// Checks that no (final state, input) transition leaves the final-state set;
// the first violation in (state, input) lexicographic order is reported.
ClosureResult check_final_closure(const ir::AgentLoop& agent, const ClosureOptions& options = {});

const char* to_string(HaltingResult::Status s);
const char* to_string(ClosureResult::Status s);

}  // namespace dg::verify
