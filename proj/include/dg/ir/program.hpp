#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "dg/kernel/bitvec.hpp"
#include "dg/kernel/rat.hpp"

namespace dg::ir {

using Vector = std::vector<Rat>;
using Matrix = std::vector<Vector>;  // row-major, rows = output dimension

enum class ActKind { kRelu, kSign, kStep, kClip };

struct Activation {
  ActKind kind = ActKind::kRelu;
  Rat lo;  // clip only
  Rat hi;  // clip only

  Rat apply(const Rat& x) const;
  friend bool operator==(const Activation&, const Activation&) = default;
};

class Node;
using NodePtr = std::shared_ptr<const Node>;

struct Affine {
  Matrix weights;
  Vector bias;
};
struct Act {
  Activation act;
};
struct Seq {
  std::vector<NodePtr> children;
};
// Every child sees the same input; outputs are concatenated in order.
struct Parallel {
  std::vector<NodePtr> children;
};
// Bits enter the program as 0/1 rationals; Decode checks the width.
struct Decode {
  std::size_t width;
};
// Threshold at 1/2 per coordinate, ties map to 1.
struct Encode {
  std::size_t width;
};
// x <- body(x) up to theta times, returning early once terminal_pred(x) is 1;
// otherwise the constant terminal_output.
struct Repeat {
  NodePtr body;
  std::uint64_t theta;
  NodePtr terminal_pred;
  BitVec terminal_output;
};
// cond, then_branch and else_branch all read the same input.
struct Select {
  NodePtr cond;
  NodePtr then_branch;
  NodePtr else_branch;
};
struct Slice {
  std::size_t offset;
  std::size_t length;
};
struct Const {
  Vector values;
};

class Node {
 public:
  using Variant = std::variant<Affine, Act, Seq, Parallel, Decode, Encode, Repeat, Select, Slice, Const>;

  explicit Node(Variant v) : v_(std::move(v)) {}
  const Variant& get() const { return v_; }

 private:
  Variant v_;
};

bool structurally_equal(const Node& a, const Node& b);

// Builders.
NodePtr affine(Matrix weights, Vector bias);
NodePtr act(Activation a);
NodePtr relu();
NodePtr step();
NodePtr sign();
NodePtr clip(Rat lo, Rat hi);
NodePtr seq(std::vector<NodePtr> children);
NodePtr parallel(std::vector<NodePtr> children);
NodePtr decode(std::size_t width);
NodePtr encode(std::size_t width);
NodePtr repeat(NodePtr body, std::uint64_t theta, NodePtr terminal_pred, BitVec terminal_output);
NodePtr select(NodePtr cond, NodePtr then_branch, NodePtr else_branch);
NodePtr slice(std::size_t offset, std::size_t length);
NodePtr constant(Vector values);
NodePtr constant(const BitVec& bits);
NodePtr identity(std::size_t width);

struct Shape {
  std::size_t output_dim;
  std::uint64_t fuel;
};

// Output dimension and static fuel bound of `node` when fed `input_dim`
// values. Throws StructureError on a malformed tree.
Shape infer_shape(const Node& node, std::size_t input_dim);

// Input dimension fixed by the node itself (Affine columns, Decode width, ...),
// if any.
std::optional<std::size_t> natural_input_dim(const Node& node);

// A well-formed tree together with its input dimension. Construction
// validates the tree and caches the output dimension and fuel bound, so any
// TotalProgram value is known to halt within fuel_bound() steps.
class TotalProgram {
 public:
  TotalProgram(NodePtr root, std::size_t input_dim);
  // Input dimension taken from natural_input_dim(root).
  explicit TotalProgram(NodePtr root);

  const NodePtr& root() const { return root_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::uint64_t fuel_bound() const { return fuel_bound_; }

  friend bool operator==(const TotalProgram& a, const TotalProgram& b) {
    return a.input_dim_ == b.input_dim_ && structurally_equal(*a.root_, *b.root_);
  }

 private:
  NodePtr root_;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::uint64_t fuel_bound_ = 0;
};

inline std::uint64_t static_fuel_bound(const TotalProgram& p) { return p.fuel_bound(); }

}  // namespace dg::ir
