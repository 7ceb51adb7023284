#pragma once

#include <optional>

#include "dg/kernel/errors.hpp"
#include "dg/kernel/judge.hpp"
#include "dg/verifier/pwl.hpp"

namespace dg::verify {

// A box sampled on a uniform grid of 2^q points per dimension, endpoints
// included. Dimension k uses bits [k*q, (k+1)*q), most significant first.
struct Grid {
  Box box;
  std::size_t bits_per_dim = 1;

  std::size_t input_bits() const { return box.dim() * bits_per_dim; }
  Vector point(const BitVec& bits) const;
  // nullopt unless x lies exactly on the grid.
  std::optional<BitVec> bits(const Vector& x) const;
  // Affine map from the bit vector to the grid point.
  ir::NodePtr dequantizer() const;
};

// decode, dequantize, then the network.
ir::TotalProgram quantize_model(const PwlNetwork& net, const Grid& grid);

// The same judge read over (grid bits, output). Throws WidthError when the
// judge's negative input is not a grid point; JudgeKindError unless linear.
Judge quantize_judge(const Judge& judge, const Grid& grid);

}  // namespace dg::verify
