#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dg/diagonal/micro.hpp"

namespace dg::diag {

// M'(x): simulate m on i under a doubling fuel schedule, then answer p_pos(x).
// M' computes p_pos exactly when m halts on i and diverges otherwise.
MicroProgram build_halting_reduction(const MicroProgram& m, const Bytes& i, const MicroProgram& p_pos);

struct ReductionSample {
  Bytes input;
  MicroOutcome expected;   // p_pos on input
  MicroOutcome reduction;  // M' on input
  bool matches = false;
};

struct ReductionReport {
  MicroProgram reduction;
  bool m_halted = false;  // within `fuel`; otherwise bounded evidence only
  std::uint64_t m_steps = 0;
  std::uint64_t reduction_fuel = 0;
  std::vector<ReductionSample> samples;
  // Smallest fuel at which M' answers the first sample, when m halted.
  std::optional<std::uint64_t> minimal_fuel;
  bool matches = false;
};

// Runs m on i with `fuel`. If it halts, M' must reproduce p_pos on every
// sample; if not, M' must still be running at the same budget scaled for its
// overhead. Throws Error when p_pos does not halt on a sample within `fuel`.
ReductionReport evaluate_reduction(const MicroProgram& m, const Bytes& i, const MicroProgram& p_pos,
                                   const std::vector<Bytes>& samples, std::uint64_t fuel);

}  // namespace dg::diag
