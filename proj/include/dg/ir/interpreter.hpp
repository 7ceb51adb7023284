#pragma once

#include <cstdint>
#include <span>

#include "dg/ir/program.hpp"

namespace dg::ir {

struct ValueResult {
  Vector output;
  std::uint64_t steps_used = 0;
};

struct BitResult {
  BitVec output;
  std::uint64_t steps_used = 0;
};

// Exact evaluation. steps_used never exceeds p.fuel_bound(): every node
// charges exactly its static cost except Repeat and Select, which charge only
// for the iterations and branch actually taken.
ValueResult eval_values(const TotalProgram& p, std::span<const Rat> input);

// Bits in, bits out. Throws WidthError if the input width is wrong or the
// program produces a non-binary coordinate.
BitResult eval(const TotalProgram& p, const BitVec& input);

}  // namespace dg::ir
