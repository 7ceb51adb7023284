#include "dg/ir/interpreter.hpp"

#include <string>

#include "dg/kernel/errors.hpp"

namespace dg::ir {

namespace {

// All mutable evaluation state lives in this frame.
class Frame {
 public:
  std::uint64_t steps = 0;

  Vector run(const Node& node, Vector in) {
    return std::visit([&](const auto& x) { return apply(x, std::move(in)); }, node.get());
  }

 private:
  Vector apply(const Affine& a, Vector in) {
    Vector out(a.weights.size());
    for (std::size_t r = 0; r < a.weights.size(); ++r) {
      Rat acc = a.bias[r];
      const auto& row = a.weights[r];
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (!row[c].is_zero() && !in[c].is_zero()) acc += row[c] * in[c];
      }
      out[r] = std::move(acc);
    }
    steps += a.weights.size() * (in.size() + 1);
    return out;
  }

  Vector apply(const Act& a, Vector in) {
    for (auto& v : in) v = a.act.apply(v);
    steps += in.size();
    return in;
  }

  Vector apply(const Seq& s, Vector in) {
    for (const auto& c : s.children) in = run(*c, std::move(in));
    return in;
  }

  Vector apply(const Parallel& p, Vector in) {
    Vector out;
    for (const auto& c : p.children) {
      Vector part = run(*c, in);
      out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
  }

  Vector apply(const Decode& d, Vector in) {
    steps += d.width;
    return in;
  }

  Vector apply(const Encode& e, Vector in) {
    static const Rat kHalf(1, 2);
    for (auto& v : in) v = Rat(v >= kHalf ? 1 : 0);
    steps += e.width;
    return in;
  }

  Vector apply(const Repeat& r, Vector in) {
    for (std::uint64_t t = 0; t < r.theta; ++t) {
      in = run(*r.body, std::move(in));
      Vector flag = run(*r.terminal_pred, in);
      if (flag.front() >= Rat(1, 2)) {
        steps += 1;
        return in;
      }
    }
    steps += 1;
    return r.terminal_output.to_rats();
  }

  Vector apply(const Select& s, Vector in) {
    Vector flag = run(*s.cond, in);
    steps += 1;
    return flag.front() >= Rat(1, 2) ? run(*s.then_branch, std::move(in))
                                     : run(*s.else_branch, std::move(in));
  }

  Vector apply(const Slice& s, Vector in) {
    steps += 1;
    if (s.offset == 0 && s.length == in.size()) return in;
    return Vector(std::make_move_iterator(in.begin() + s.offset),
                  std::make_move_iterator(in.begin() + s.offset + s.length));
  }

  Vector apply(const Const& c, Vector) {
    steps += c.values.size();
    return c.values;
  }
};

}  // namespace

ValueResult eval_values(const TotalProgram& p, std::span<const Rat> input) {
  if (input.size() != p.input_dim()) {
    throw WidthError("program input width: got " + std::to_string(input.size()) + ", expected " +
                     std::to_string(p.input_dim()));
  }
  Frame frame;
  Vector out = frame.run(*p.root(), Vector(input.begin(), input.end()));
  return {std::move(out), frame.steps};
}

BitResult eval(const TotalProgram& p, const BitVec& input) {
  auto in = input.to_rats();
  ValueResult r = eval_values(p, in);
  return {BitVec::from_rats(r.output), r.steps_used};
}

}  // namespace dg::ir
