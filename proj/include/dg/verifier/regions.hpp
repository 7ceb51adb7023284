#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dg/kernel/judge.hpp"
#include "dg/kernel/verdict.hpp"
#include "dg/verifier/pwl.hpp"

namespace dg::verify {

struct RegionOptions {
  std::size_t max_neurons = 20;
  std::size_t max_input_dim = 4;
  std::size_t max_violation_terms = 4096;
  unsigned workers = 1;
};

struct RegionStats {
  std::uint64_t feasibility_checks = 0;
  std::uint64_t regions = 0;
};

// Full-dimensional activation regions of `net` inside `domain`, sorted by
// pattern. Each hidden layer is explored by flipping one hyperplane (or one
// group of coincident hyperplanes) at a time, starting from the pattern at a
// known interior point of the parent region, with exact feasibility checks.
// Throws BudgetError when the network exceeds max_neurons / max_input_dim.
std::vector<Region> enumerate_regions(const PwlNetwork& net, const Box& domain, const RegionOptions& options = {},
                                      RegionStats* stats = nullptr);

// DNF of the negation of `f`: the judge is violated iff some term holds.
// Atoms of the result are strict.
std::vector<std::vector<Constraint>> violation_terms(const Formula& f, std::size_t max_terms);

// Linear judges only (JudgeKindError otherwise). Substitutes the region's
// affine map for the output in every violation term and looks for a point
// of (closed region) AND (box) AND (term). The first region in pattern order
// that admits one yields the counterexample.
Verdict verify_regions(const PwlNetwork& net, const Judge& judge, const Box& domain,
                       const RegionOptions& options = {});

}  // namespace dg::verify
