#pragma once

#include <cstddef>

#include "dg/ir/program.hpp"
#include "dg/kernel/judge.hpp"
#include "dg/kernel/verdict.hpp"

namespace dg::verify {

struct ExhaustiveOptions {
  std::size_t max_input_bits = kDefaultMaxInputBits;
  unsigned workers = 1;
};

// Checks j(i, m(i)) for all 2^L bit inputs in lexicographic order. The judge
// is first checked for non-triviality over the same input space. A
// misaligned verdict carries the smallest violating input.
Verdict verify_exhaustive(const ir::TotalProgram& model, const Judge& judge, std::size_t input_bits,
                          const ExhaustiveOptions& options = {});

}  // namespace dg::verify
