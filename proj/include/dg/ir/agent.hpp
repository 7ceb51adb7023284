#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dg/ir/program.hpp"

namespace dg::ir {

inline constexpr std::size_t kDefaultFinalStateBound = 32;  // 2^5

// An agent: step_model maps (state ++ input) to (state ++ output) and is
// iterated at most theta times on a fixed input.
class AgentLoop {
 public:
  AgentLoop(TotalProgram step_model, std::size_t state_width, std::size_t input_width, std::uint64_t theta,
            std::vector<BitVec> final_states, BitVec terminal_output = {},
            std::size_t final_state_bound = kDefaultFinalStateBound);

  const TotalProgram& step_model() const { return step_model_; }
  std::size_t state_width() const { return state_width_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return output_width_; }
  std::uint64_t theta() const { return theta_; }
  // Sorted, duplicate-free.
  const std::vector<BitVec>& final_states() const { return final_states_; }
  const BitVec& terminal_output() const { return terminal_output_; }

  bool is_final(const BitVec& state) const;

  struct Step {
    BitVec state;
    BitVec output;
  };
  // One application of the step model.
  Step step(const BitVec& state, const BitVec& input) const;

  friend bool operator==(const AgentLoop&, const AgentLoop&) = default;

 private:
  TotalProgram step_model_;
  std::size_t state_width_;
  std::size_t input_width_;
  std::size_t output_width_ = 0;
  std::uint64_t theta_;
  std::vector<BitVec> final_states_;
  BitVec terminal_output_;
};

enum class HaltReason { kTerminalState, kThetaExhausted };

struct Trace {
  std::vector<AgentLoop::Step> steps;
  HaltReason halted_by = HaltReason::kThetaExhausted;
  // The constant output forced on the caller when theta runs out.
  std::optional<BitVec> forced_output;

  friend bool operator==(const Trace& a, const Trace& b) {
    if (a.steps.size() != b.steps.size() || a.halted_by != b.halted_by || a.forced_output != b.forced_output) {
      return false;
    }
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      if (a.steps[i].state != b.steps[i].state || a.steps[i].output != b.steps[i].output) return false;
    }
    return true;
  }
};

Trace run_agent(const AgentLoop& agent, const BitVec& input, const BitVec& initial_state);

// Line-oriented agent file:
//   agent state=<S> in=<I> theta=<T>
//   final <bits> <bits> ...
//   terminal <bits>            (optional, defaults to all zeros)
//   step <ir-expression>       (may continue over following lines)
AgentLoop parse_agent(std::string_view text, std::size_t final_state_bound = kDefaultFinalStateBound);
std::string print_agent(const AgentLoop& agent);

}  // namespace dg::ir
