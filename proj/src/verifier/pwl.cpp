#include "dg/verifier/pwl.hpp"

#include <functional>
#include <optional>

#include "dg/ir/interpreter.hpp"
#include "dg/kernel/errors.hpp"
#include "dg/util/strings.hpp"

namespace dg::verify {

Vector AffineLayer::apply(std::span<const Rat> x) const {
  Vector out(weights.size());
  for (std::size_t r = 0; r < weights.size(); ++r) {
    Rat acc = bias[r];
    for (std::size_t c = 0; c < x.size(); ++c) {
      if (!weights[r][c].is_zero()) acc += weights[r][c] * x[c];
    }
    out[r] = std::move(acc);
  }
  return out;
}

PwlNetwork::PwlNetwork(std::vector<AffineLayer> hidden_layers, AffineLayer out)
    : hidden(std::move(hidden_layers)), output(std::move(out)) {
  const AffineLayer& first = hidden.empty() ? output : hidden.front();
  if (first.weights.empty()) throw StructureError("network layer with no rows");
  input_dim_ = first.weights.front().size();
  std::size_t width = input_dim_;
  auto check = [&](const AffineLayer& l) {
    if (l.weights.empty() || l.weights.size() != l.bias.size()) throw StructureError("malformed network layer");
    for (const auto& row : l.weights) {
      if (row.size() != width) throw StructureError("network layer dimensions do not chain");
    }
    width = l.weights.size();
  };
  for (const auto& l : hidden) check(l);
  check(output);
}

std::size_t PwlNetwork::hidden_count() const {
  std::size_t n = 0;
  for (const auto& l : hidden) n += l.weights.size();
  return n;
}

Vector PwlNetwork::eval(std::span<const Rat> x) const {
  if (x.size() != input_dim_) throw WidthError("network input width mismatch");
  Vector h(x.begin(), x.end());
  for (const auto& l : hidden) {
    h = l.apply(h);
    for (auto& v : h) {
      if (v.sign() < 0) v = Rat(0);
    }
  }
  return output.apply(h);
}

std::vector<std::uint8_t> PwlNetwork::pattern(std::span<const Rat> x) const {
  if (x.size() != input_dim_) throw WidthError("network input width mismatch");
  std::vector<std::uint8_t> pat;
  Vector h(x.begin(), x.end());
  for (const auto& l : hidden) {
    h = l.apply(h);
    for (auto& v : h) {
      pat.push_back(v.sign() >= 0);
      if (v.sign() < 0) v = Rat(0);
    }
  }
  return pat;
}

PwlNetwork PwlNetwork::with_clip(const Rat& lo, const Rat& hi) const {
  if (hi < lo) throw IntervalError("clip bounds out of order");
  std::size_t k = output_dim();
  std::vector<AffineLayer> layers = hidden;
  // y and y again, shifted by -lo and -hi.
  AffineLayer shifted;
  for (std::size_t r = 0; r < k; ++r) {
    shifted.weights.push_back(output.weights[r]);
    shifted.bias.push_back(output.bias[r] - lo);
  }
  for (std::size_t r = 0; r < k; ++r) {
    shifted.weights.push_back(output.weights[r]);
    shifted.bias.push_back(output.bias[r] - hi);
  }
  layers.push_back(std::move(shifted));
  AffineLayer combine{Matrix(k, Vector(2 * k, Rat(0))), Vector(k, lo)};
  for (std::size_t r = 0; r < k; ++r) {
    combine.weights[r][r] = Rat(1);
    combine.weights[r][k + r] = Rat(-1);
  }
  return PwlNetwork(std::move(layers), std::move(combine));
}

ir::TotalProgram PwlNetwork::to_program() const {
  std::vector<ir::NodePtr> nodes;
  for (const auto& l : hidden) {
    nodes.push_back(ir::affine(l.weights, l.bias));
    nodes.push_back(ir::relu());
  }
  nodes.push_back(ir::affine(output.weights, output.bias));
  return ir::TotalProgram(ir::seq(std::move(nodes)), input_dim_);
}

PwlNetwork PwlNetwork::from_program(const ir::TotalProgram& p) {
  std::vector<ir::NodePtr> nodes;
  std::function<void(const ir::NodePtr&)> flatten = [&](const ir::NodePtr& n) {
    if (const auto* s = std::get_if<ir::Seq>(&n->get())) {
      for (const auto& c : s->children) flatten(c);
    } else {
      nodes.push_back(n);
    }
  };
  flatten(p.root());
  std::size_t i = 0;
  if (!nodes.empty() && std::holds_alternative<ir::Decode>(nodes[0]->get())) ++i;
  std::optional<ir::Activation> tail_clip;
  if (nodes.size() > i + 1) {
    const auto* act = std::get_if<ir::Act>(&nodes.back()->get());
    if (act && act->act.kind == ir::ActKind::kClip) {
      tail_clip = act->act;
      nodes.pop_back();
    }
  }
  std::vector<AffineLayer> layers;
  bool expect_affine = true;
  for (; i < nodes.size(); ++i) {
    const auto& v = nodes[i]->get();
    if (expect_affine) {
      const auto* a = std::get_if<ir::Affine>(&v);
      if (!a) throw StructureError("network must alternate affine and relu layers");
      layers.push_back({a->weights, a->bias});
    } else {
      const auto* act = std::get_if<ir::Act>(&v);
      if (!act || act->act.kind != ir::ActKind::kRelu) {
        throw StructureError("network must alternate affine and relu layers");
      }
    }
    expect_affine = !expect_affine;
  }
  if (layers.empty() || expect_affine) throw StructureError("network must end with an affine layer");
  AffineLayer out = std::move(layers.back());
  layers.pop_back();
  PwlNetwork net(std::move(layers), std::move(out));
  return tail_clip ? net.with_clip(tail_clip->lo, tail_clip->hi) : net;
}

Box Box::parse(std::string_view text) {
  Box b;
  for (const auto& part : util::split(text, ';')) {
    auto ends = util::split(util::trim(part), ',');
    if (ends.size() != 2) throw ParseError("box dimension must be 'lo,hi', got '" + part + "'");
    b.lo.push_back(Rat::parse(util::trim(ends[0])));
    b.hi.push_back(Rat::parse(util::trim(ends[1])));
    if (b.hi.back() < b.lo.back()) throw IntervalError("box interval with lo > hi: '" + part + "'");
  }
  return b;
}

std::string Box::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (k) s += ';';
    s += lo[k].to_string() + ',' + hi[k].to_string();
  }
  return s;
}

Vector Box::center() const {
  Vector c(lo.size());
  for (std::size_t k = 0; k < lo.size(); ++k) c[k] = (lo[k] + hi[k]) / Rat(2);
  return c;
}

bool Box::contains(std::span<const Rat> x) const {
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (x[k] < lo[k] || hi[k] < x[k]) return false;
  }
  return true;
}

std::vector<Constraint> Box::constraints(bool strict) const {
  std::vector<Constraint> out;
  const std::size_t d = lo.size();
  for (std::size_t k = 0; k < d; ++k) {
    Constraint lower{Vector(d, Rat(0)), -lo[k], strict};
    lower.coeffs[k] = Rat(1);
    Constraint upper{Vector(d, Rat(0)), hi[k], strict};
    upper.coeffs[k] = Rat(-1);
    out.push_back(std::move(lower));
    out.push_back(std::move(upper));
  }
  return out;
}

bool Region::contains(std::span<const Rat> x) const {
  std::vector<Rat> v(x.begin(), x.end());
  for (const auto& c : constraints) {
    if (!c.satisfied_by(v)) return false;
  }
  return true;
}

Vector Region::apply(std::span<const Rat> x) const { return AffineLayer{map_weights, map_bias}.apply(x); }

}  // namespace dg::verify
