#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dg/ir/program.hpp"
#include "dg/verifier/fourier_motzkin.hpp"

namespace dg::verify {

using ir::Matrix;
using ir::Vector;

struct AffineLayer {
  Matrix weights;  // rows = outputs
  Vector bias;

  Vector apply(std::span<const Rat> x) const;
  friend bool operator==(const AffineLayer&, const AffineLayer&) = default;
};

// relu(hidden[0]) -> relu(hidden[1]) -> ... -> output. No hidden layers is
// allowed (a single affine map).
class PwlNetwork {
 public:
  PwlNetwork(std::vector<AffineLayer> hidden, AffineLayer output);

  // Accepts (seq (affine ..) (act relu) ... (affine ..)), with an optional
  // leading (decode N), a trailing (act clip a b) and a bare (affine ..).
  static PwlNetwork from_program(const ir::TotalProgram& p);
  ir::TotalProgram to_program() const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output.weights.size(); }
  std::size_t hidden_count() const;

  Vector eval(std::span<const Rat> x) const;
  // One entry per hidden neuron; active iff pre-activation >= 0.
  std::vector<std::uint8_t> pattern(std::span<const Rat> x) const;

  // Appends clip(lo, hi) to every output as lo + relu(y - lo) - relu(y - hi).
  PwlNetwork with_clip(const Rat& lo, const Rat& hi) const;

  std::vector<AffineLayer> hidden;
  AffineLayer output;

  friend bool operator==(const PwlNetwork&, const PwlNetwork&) = default;

 private:
  std::size_t input_dim_ = 0;
};

struct Box {
  std::vector<Rat> lo;
  std::vector<Rat> hi;

  // "lo,hi;lo,hi;..." one interval per dimension.
  static Box parse(std::string_view text);
  std::string to_string() const;
  std::size_t dim() const { return lo.size(); }
  Vector center() const;
  bool contains(std::span<const Rat> x) const;
  // Closed (lo <= x <= hi) or open (lo < x < hi) bounds.
  std::vector<Constraint> constraints(bool strict) const;
};

// One linear region: where the activation pattern holds (closed constraints
// over the input) and the affine map the network reduces to there.
struct Region {
  std::vector<std::uint8_t> pattern;
  std::vector<Constraint> constraints;
  Matrix map_weights;
  Vector map_bias;
  Vector interior_point;

  bool contains(std::span<const Rat> x) const;
  Vector apply(std::span<const Rat> x) const;
};

}  // namespace dg::verify
