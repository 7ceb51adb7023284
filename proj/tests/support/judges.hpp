#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dg/kernel/judge.hpp"
#include "dg/verifier/pwl.hpp"
#include "support/gen.hpp"

namespace dg::test {

// A judge paired with a plain integer restatement of the same condition.
struct JudgeCase {
  Judge judge;
  std::function<bool(const std::vector<int>& in, const std::vector<int>& out)> oracle;
};

// Five judges over 8 input bits and 2 output bits.
std::vector<JudgeCase> matrix_judges();

// o == i over `width` bits.
Judge equality_judge(std::size_t width);

LinearIneq ineq(long constant, std::vector<long> coeffs);

// One hidden layer of axis-aligned ReLUs with integer breakpoints in [0, 3],
// so a 2-bit grid on [0, 3]^d puts every breakpoint on a grid point.
verify::PwlNetwork grid_aligned_net(Rng& rng, std::size_t d);

// Conjunctive linear judge on (x, y) whose negative input is the origin.
Judge grid_judge(Rng& rng, std::size_t d);

}  // namespace dg::test
