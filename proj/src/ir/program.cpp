#include "dg/ir/program.hpp"

#include <limits>
#include <string>

#include "dg/kernel/errors.hpp"

namespace dg::ir {

namespace {

constexpr std::uint64_t kMaxFuel = std::numeric_limits<std::uint64_t>::max();

std::uint64_t add_fuel(std::uint64_t a, std::uint64_t b) {
  if (a > kMaxFuel - b) throw StructureError("static fuel bound overflows 64 bits");
  return a + b;
}

std::uint64_t mul_fuel(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kMaxFuel / a) throw StructureError("static fuel bound overflows 64 bits");
  return a * b;
}

std::string dims(std::size_t got, std::size_t want) {
  return "got " + std::to_string(got) + ", expected " + std::to_string(want);
}

bool equal_ptr(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  return structurally_equal(*a, *b);
}

bool equal_list(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal_ptr(a[i], b[i])) return false;
  }
  return true;
}

void require_child(const NodePtr& p, const char* what) {
  if (!p) throw StructureError(std::string("missing ") + what);
}

}  // namespace

Rat Activation::apply(const Rat& x) const {
  switch (kind) {
    case ActKind::kRelu:
      return x.sign() < 0 ? Rat(0) : x;
    case ActKind::kSign:
      return Rat(x.sign());
    case ActKind::kStep:
      return Rat(x.sign() >= 0 ? 1 : 0);
    case ActKind::kClip:
      if (x < lo) return lo;
      if (hi < x) return hi;
      return x;
  }
  return x;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.get().index() != b.get().index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.get());
        if constexpr (std::is_same_v<T, Affine>) {
          return x.weights == y.weights && x.bias == y.bias;
        } else if constexpr (std::is_same_v<T, Act>) {
          return x.act == y.act;
        } else if constexpr (std::is_same_v<T, Seq> || std::is_same_v<T, Parallel>) {
          return equal_list(x.children, y.children);
        } else if constexpr (std::is_same_v<T, Decode> || std::is_same_v<T, Encode>) {
          return x.width == y.width;
        } else if constexpr (std::is_same_v<T, Repeat>) {
          return x.theta == y.theta && x.terminal_output == y.terminal_output &&
                 equal_ptr(x.body, y.body) && equal_ptr(x.terminal_pred, y.terminal_pred);
        } else if constexpr (std::is_same_v<T, Select>) {
          return equal_ptr(x.cond, y.cond) && equal_ptr(x.then_branch, y.then_branch) &&
                 equal_ptr(x.else_branch, y.else_branch);
        } else if constexpr (std::is_same_v<T, Slice>) {
          return x.offset == y.offset && x.length == y.length;
        } else {
          return x.values == y.values;
        }
      },
      a.get());
}

NodePtr affine(Matrix weights, Vector bias) {
  return std::make_shared<Node>(Affine{std::move(weights), std::move(bias)});
}
NodePtr act(Activation a) {
  if (a.kind == ActKind::kClip && a.hi < a.lo) {
    throw IntervalError("clip bounds out of order: " + a.lo.to_string() + " > " + a.hi.to_string());
  }
  return std::make_shared<Node>(Act{std::move(a)});
}
NodePtr relu() { return act({ActKind::kRelu, {}, {}}); }
NodePtr step() { return act({ActKind::kStep, {}, {}}); }
NodePtr sign() { return act({ActKind::kSign, {}, {}}); }
NodePtr clip(Rat lo, Rat hi) { return act({ActKind::kClip, std::move(lo), std::move(hi)}); }
NodePtr seq(std::vector<NodePtr> children) { return std::make_shared<Node>(Seq{std::move(children)}); }
NodePtr parallel(std::vector<NodePtr> children) {
  return std::make_shared<Node>(Parallel{std::move(children)});
}
NodePtr decode(std::size_t width) { return std::make_shared<Node>(Decode{width}); }
NodePtr encode(std::size_t width) { return std::make_shared<Node>(Encode{width}); }
NodePtr repeat(NodePtr body, std::uint64_t theta, NodePtr terminal_pred, BitVec terminal_output) {
  return std::make_shared<Node>(
      Repeat{std::move(body), theta, std::move(terminal_pred), std::move(terminal_output)});
}
NodePtr select(NodePtr cond, NodePtr then_branch, NodePtr else_branch) {
  return std::make_shared<Node>(Select{std::move(cond), std::move(then_branch), std::move(else_branch)});
}
NodePtr slice(std::size_t offset, std::size_t length) {
  return std::make_shared<Node>(Slice{offset, length});
}
NodePtr constant(Vector values) { return std::make_shared<Node>(Const{std::move(values)}); }
NodePtr constant(const BitVec& bits) { return constant(bits.to_rats()); }
NodePtr identity(std::size_t width) { return slice(0, width); }

Shape infer_shape(const Node& node, std::size_t in) {
  return std::visit(
      [in](const auto& x) -> Shape {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Affine>) {
          if (x.weights.size() != x.bias.size()) {
            throw StructureError("affine bias length " + dims(x.bias.size(), x.weights.size()));
          }
          for (const auto& row : x.weights) {
            if (row.size() != in) throw StructureError("affine input " + dims(in, row.size()));
          }
          if (x.weights.empty()) throw StructureError("affine with no rows");
          return {x.weights.size(), mul_fuel(x.weights.size(), add_fuel(in, 1))};
        } else if constexpr (std::is_same_v<T, Act>) {
          return {in, in};
        } else if constexpr (std::is_same_v<T, Seq>) {
          if (x.children.empty()) throw StructureError("empty seq");
          Shape s{in, 0};
          for (const auto& c : x.children) {
            require_child(c, "seq child");
            Shape cs = infer_shape(*c, s.output_dim);
            s = {cs.output_dim, add_fuel(s.fuel, cs.fuel)};
          }
          return s;
        } else if constexpr (std::is_same_v<T, Parallel>) {
          if (x.children.empty()) throw StructureError("empty par");
          Shape s{0, 0};
          for (const auto& c : x.children) {
            require_child(c, "par child");
            Shape cs = infer_shape(*c, in);
            s = {s.output_dim + cs.output_dim, add_fuel(s.fuel, cs.fuel)};
          }
          return s;
        } else if constexpr (std::is_same_v<T, Decode> || std::is_same_v<T, Encode>) {
          if (in != x.width) throw StructureError("decode/encode width " + dims(in, x.width));
          return {x.width, x.width};
        } else if constexpr (std::is_same_v<T, Repeat>) {
          require_child(x.body, "repeat body");
          require_child(x.terminal_pred, "repeat terminal predicate");
          if (x.theta == 0) throw StructureError("repeat theta must be at least 1");
          Shape body = infer_shape(*x.body, in);
          if (body.output_dim != in) throw StructureError("repeat body must preserve dimension");
          Shape pred = infer_shape(*x.terminal_pred, in);
          if (pred.output_dim != 1) throw StructureError("repeat terminal predicate must return one value");
          if (x.terminal_output.width() != in) {
            throw StructureError("repeat terminal output width " + dims(x.terminal_output.width(), in));
          }
          return {in, add_fuel(mul_fuel(x.theta, add_fuel(body.fuel, pred.fuel)), 1)};
        } else if constexpr (std::is_same_v<T, Select>) {
          require_child(x.cond, "select condition");
          require_child(x.then_branch, "select then-branch");
          require_child(x.else_branch, "select else-branch");
          Shape c = infer_shape(*x.cond, in);
          if (c.output_dim != 1) throw StructureError("select condition must return one value");
          Shape t = infer_shape(*x.then_branch, in);
          Shape e = infer_shape(*x.else_branch, in);
          if (t.output_dim != e.output_dim) {
            throw StructureError("select branches disagree: " + dims(e.output_dim, t.output_dim));
          }
          return {t.output_dim, add_fuel(add_fuel(1, c.fuel), std::max(t.fuel, e.fuel))};
        } else if constexpr (std::is_same_v<T, Slice>) {
          if (x.offset + x.length > in) throw StructureError("slice past end of input");
          return {x.length, 1};
        } else {
          return {x.values.size(), x.values.size()};
        }
      },
      node.get());
}

std::optional<std::size_t> natural_input_dim(const Node& node) {
  return std::visit(
      [](const auto& x) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Affine>) {
          if (x.weights.empty()) return std::nullopt;
          return x.weights.front().size();
        } else if constexpr (std::is_same_v<T, Seq>) {
          if (x.children.empty() || !x.children.front()) return std::nullopt;
          return natural_input_dim(*x.children.front());
        } else if constexpr (std::is_same_v<T, Parallel>) {
          for (const auto& c : x.children) {
            if (!c) continue;
            if (auto d = natural_input_dim(*c)) return d;
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Decode> || std::is_same_v<T, Encode>) {
          return x.width;
        } else if constexpr (std::is_same_v<T, Repeat>) {
          return x.terminal_output.width();
        } else if constexpr (std::is_same_v<T, Select>) {
          for (const auto* c : {&x.cond, &x.then_branch, &x.else_branch}) {
            if (!*c) continue;
            if (auto d = natural_input_dim(**c)) return d;
          }
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      node.get());
}

TotalProgram::TotalProgram(NodePtr root, std::size_t input_dim)
    : root_(std::move(root)), input_dim_(input_dim) {
  if (!root_) throw StructureError("empty program");
  Shape s = infer_shape(*root_, input_dim_);
  output_dim_ = s.output_dim;
  fuel_bound_ = s.fuel;
}

namespace {
std::size_t require_natural(const NodePtr& root) {
  if (!root) throw StructureError("empty program");
  auto d = natural_input_dim(*root);
  if (!d) throw StructureError("program input dimension cannot be inferred; declare it explicitly");
  return *d;
}
}  // namespace

TotalProgram::TotalProgram(NodePtr root) : TotalProgram(root, require_natural(root)) {}

}  // namespace dg::ir
