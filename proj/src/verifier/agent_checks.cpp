#include "dg/verifier/agent_checks.hpp"

#include <unordered_map>

#include "dg/kernel/errors.hpp"
#include "dg/util/parallel.hpp"

namespace dg::verify {

namespace {

struct BitVecHash {
  std::size_t operator()(const BitVec& b) const {
    std::size_t h = 1469598103934665603ULL;
    for (auto bit : b.bits()) h = (h ^ bit) * 1099511628211ULL;
    return h;
  }
};

}  // namespace

HaltingResult verify_halting(const ir::AgentLoop& agent, const HaltingOptions& options) {
  HaltingResult res;
  if (options.memory_bound > options.max_memory_bits || agent.state_width() > options.memory_bound) {
    res.status = HaltingResult::Status::kResourceExceeded;
    res.budget = "max-state-bits";
    res.limit = std::min(options.memory_bound, options.max_memory_bits);
    return res;
  }
  BitVec input = options.input.value_or(BitVec(agent.input_width()));
  BitVec state = options.initial_state.value_or(BitVec(agent.state_width()));
  if (state.width() != agent.state_width()) throw WidthError("initial state width mismatch");

  std::unordered_map<BitVec, std::uint64_t, BitVecHash> seen{{state, 0}};
  for (std::uint64_t t = 1;; ++t) {
    if (t > options.step_budget) {
      res.status = HaltingResult::Status::kResourceExceeded;
      res.budget = "step-budget";
      res.limit = options.step_budget;
      return res;
    }
    state = agent.step(state, input).state;
    if (agent.is_final(state)) {
      res.status = HaltingResult::Status::kHalts;
      res.steps = t;
      return res;
    }
    auto [it, fresh] = seen.emplace(state, t);
    if (!fresh) {
      res.status = HaltingResult::Status::kDiverges;
      res.cycle_start = it->second;
      res.cycle_length = t - it->second;
      return res;
    }
  }
}

ClosureResult check_final_closure(const ir::AgentLoop& agent, const ClosureOptions& options) {
  ClosureResult res;
  if (agent.state_width() > options.max_state_bits) {
    res.status = ClosureResult::Status::kResourceExceeded;
    res.budget = "max-state-bits";
    res.limit = options.max_state_bits;
    return res;
  }
  if (agent.input_width() > options.max_input_bits) {
    res.status = ClosureResult::Status::kResourceExceeded;
    res.budget = "max-input-bits";
    res.limit = options.max_input_bits;
    return res;
  }
  const auto& finals = agent.final_states();
  const std::uint64_t inputs = std::uint64_t{1} << agent.input_width();
  auto scan = util::ordered_scan(finals.size() * inputs, options.workers, [&](std::uint64_t idx, std::uint64_t& cost) {
    ++cost;
    const BitVec& s = finals[idx / inputs];
    auto next = agent.step(s, BitVec::from_uint(idx % inputs, agent.input_width())).state;
    return agent.is_final(next);
  });
  res.transitions_checked = scan.cost;
  if (scan.first_failure) {
    std::uint64_t idx = *scan.first_failure;
    res.status = ClosureResult::Status::kViolation;
    res.state = finals[idx / inputs];
    res.input = BitVec::from_uint(idx % inputs, agent.input_width());
    res.successor = agent.step(res.state, res.input).state;
  }
  return res;
}

const char* to_string(HaltingResult::Status s) {
  switch (s) {
    case HaltingResult::Status::kHalts: return "halts";
    case HaltingResult::Status::kDiverges: return "diverges";
    case HaltingResult::Status::kResourceExceeded: return "resource_exceeded";
  }
  return "unknown";
}

const char* to_string(ClosureResult::Status s) {
  switch (s) {
    case ClosureResult::Status::kOk: return "ok";
    case ClosureResult::Status::kViolation: return "violation";
    case ClosureResult::Status::kResourceExceeded: return "resource_exceeded";
  }
  return "unknown";
}

}  // namespace dg::verify
