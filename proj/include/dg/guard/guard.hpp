#pragma once

#include "dg/ir/program.hpp"
#include "dg/kernel/judge.hpp"

namespace dg::guard {

// m'(i) = m(i) if judge(i, m(i)) = 1, else witness(i). The judge body and
// witness are inlined as IR subtrees under a select node, so the result is
// aligned by construction and its fuel bound grows by at most
// bound(body) + bound(witness) + 4.
// Throws TrivialJudgeError / BudgetError if the judge fails check_nontrivial.
ir::TotalProgram filter(const ir::TotalProgram& model, const Judge& judge,
                        std::size_t max_input_bits = kDefaultMaxInputBits);

// m''(i-) = o-, m''(i) = m(i) elsewhere.
ir::TotalProgram misalign(const ir::TotalProgram& model, const Judge& judge,
                          std::size_t max_input_bits = kDefaultMaxInputBits);

// Clamps every pre-encode output coordinate to [lo, hi]. IntervalError if
// lo > hi.
ir::TotalProgram clip_guard(const ir::TotalProgram& model, const Rat& lo, const Rat& hi);

// 1 iff the input equals `point` exactly (any rational values).
ir::NodePtr equality_test(const Vector& point);

}  // namespace dg::guard
