#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dg/kernel/rat.hpp"

namespace dg::verify {

// coeffs . x + constant >= 0, or > 0 when strict.
struct Constraint {
  std::vector<Rat> coeffs;
  Rat constant;
  bool strict = false;

  bool satisfied_by(const std::vector<Rat>& x) const;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct FmStats {
  std::size_t eliminations = 0;
  std::size_t peak_constraints = 0;
};

// Exact feasibility by Fourier-Motzkin elimination over `dim` variables.
// Returns a rational point satisfying every constraint, or nullopt when the
// system is infeasible. The point is built by back-substitution, taking the
// midpoint of each surviving interval (bound +/- 1 when one side is open).
std::optional<std::vector<Rat>> find_point(const std::vector<Constraint>& constraints, std::size_t dim,
                                           FmStats* stats = nullptr);

}  // namespace dg::verify
