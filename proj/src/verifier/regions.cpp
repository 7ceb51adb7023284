#include "dg/verifier/regions.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "dg/kernel/errors.hpp"
#include "dg/util/parallel.hpp"

namespace dg::verify {

namespace {

// Input-space description of a region explored so far: its open (strict)
// constraints, the closed version, and the affine map from the input to the
// current layer's activations.
struct Partial {
  std::vector<std::uint8_t> pattern;
  std::vector<Constraint> open;
  std::vector<Constraint> closed;
  Matrix map;  // rows = current width, cols = input dim
  Vector offset;
  Vector point;  // strictly inside `open`
};

struct Plane {
  Vector coeffs;
  Rat constant;
  bool degenerate;
};

Rat dot(const Vector& a, const Vector& b) {
  Rat acc(0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_zero() && !b[k].is_zero()) acc += a[k] * b[k];
  }
  return acc;
}

Constraint side(const Plane& p, bool active, bool strict) {
  Constraint c{p.coeffs, p.constant, strict};
  if (!active) {
    for (auto& v : c.coeffs) v = -v;
    c.constant = -c.constant;
  }
  return c;
}

struct CoeffKey {
  Vector coeffs;
  Rat constant;
  bool operator<(const CoeffKey& o) const {
    if (coeffs != o.coeffs) {
      return std::lexicographical_compare(coeffs.begin(), coeffs.end(), o.coeffs.begin(), o.coeffs.end());
    }
    return constant < o.constant;
  }
};

// Generic direction for breaking ties at a point lying on some hyperplanes:
// (1, t, t^2, ...) is orthogonal to a fixed non-zero vector for fewer than
// dim values of t.
Vector tie_break_direction(const std::vector<const Plane*>& tied, std::size_t dim) {
  for (long t = 2;; ++t) {
    Vector u(dim);
    Rat p(1);
    for (std::size_t k = 0; k < dim; ++k) {
      u[k] = p;
      p *= Rat(t);
    }
    if (std::all_of(tied.begin(), tied.end(), [&](const Plane* pl) { return !dot(pl->coeffs, u).is_zero(); })) {
      return u;
    }
  }
}

class LayerExplorer {
 public:
  LayerExplorer(const Partial& parent, const AffineLayer& layer, std::size_t dim)
      : parent_(parent), dim_(dim) {
    for (std::size_t n = 0; n < layer.weights.size(); ++n) {
      Plane p{Vector(dim, Rat(0)), layer.bias[n], true};
      for (std::size_t r = 0; r < parent.map.size(); ++r) {
        const Rat& w = layer.weights[n][r];
        if (w.is_zero()) continue;
        for (std::size_t k = 0; k < dim; ++k) p.coeffs[k] += w * parent.map[r][k];
        p.constant += w * parent.offset[r];
      }
      p.degenerate = std::all_of(p.coeffs.begin(), p.coeffs.end(), [](const Rat& c) { return c.is_zero(); });
      planes_.push_back(std::move(p));
    }
    // Group coincident hyperplanes: flipping across one flips them all.
    std::map<CoeffKey, std::size_t> index;
    for (std::size_t n = 0; n < planes_.size(); ++n) {
      if (planes_[n].degenerate) continue;
      const Plane& p = planes_[n];
      Rat lead = *std::find_if(p.coeffs.begin(), p.coeffs.end(), [](const Rat& c) { return !c.is_zero(); });
      CoeffKey key{p.coeffs, p.constant / lead};
      for (auto& c : key.coeffs) c /= lead;
      auto [it, fresh] = index.emplace(std::move(key), groups_.size());
      if (fresh) groups_.emplace_back();
      groups_[it->second].push_back(n);
    }
  }

  std::vector<Partial> explore(std::uint64_t& checks) {
    std::vector<std::uint8_t> seed(planes_.size());
    std::vector<const Plane*> tied;
    std::vector<std::size_t> tied_idx;
    for (std::size_t n = 0; n < planes_.size(); ++n) {
      const Plane& p = planes_[n];
      Rat v = dot(p.coeffs, parent_.point) + p.constant;
      seed[n] = v.sign() >= 0;
      if (!p.degenerate && v.is_zero()) {
        tied.push_back(&p);
        tied_idx.push_back(n);
      }
    }
    if (!tied.empty()) {
      Vector u = tie_break_direction(tied, dim_);
      for (std::size_t i = 0; i < tied.size(); ++i) seed[tied_idx[i]] = dot(tied[i]->coeffs, u).sign() > 0;
    }

    std::vector<Partial> out;
    std::set<std::vector<std::uint8_t>> seen{seed};
    std::deque<std::vector<std::uint8_t>> queue;
    if (auto child = realize(seed, checks)) {
      out.push_back(std::move(*child));
      queue.push_back(seed);
    }
    while (!queue.empty()) {
      auto cur = std::move(queue.front());
      queue.pop_front();
      for (const auto& group : groups_) {
        auto next = cur;
        for (auto n : group) next[n] ^= 1;
        if (!seen.insert(next).second) continue;
        if (auto child = realize(next, checks)) {
          out.push_back(std::move(*child));
          queue.push_back(std::move(next));
        }
      }
    }
    return out;
  }

 private:
  std::optional<Partial> realize(const std::vector<std::uint8_t>& pat, std::uint64_t& checks) {
    std::vector<Constraint> open = parent_.open;
    for (std::size_t n = 0; n < planes_.size(); ++n) {
      const Plane& p = planes_[n];
      if (p.degenerate) {
        // Constant pre-activation: the tie rule fixes the status.
        if (static_cast<bool>(pat[n]) != (p.constant.sign() >= 0)) return std::nullopt;
        continue;
      }
      open.push_back(side(p, pat[n], true));
    }
    ++checks;
    auto point = find_point(open, dim_);
    if (!point) return std::nullopt;
    Partial child;
    child.pattern = parent_.pattern;
    child.pattern.insert(child.pattern.end(), pat.begin(), pat.end());
    child.open = std::move(open);
    child.closed = parent_.closed;
    for (std::size_t n = 0; n < planes_.size(); ++n) {
      const Plane& p = planes_[n];
      if (!p.degenerate) child.closed.push_back(side(p, pat[n], false));
      if (pat[n]) {
        child.map.push_back(p.coeffs);
        child.offset.push_back(p.constant);
      } else {
        child.map.emplace_back(dim_, Rat(0));
        child.offset.emplace_back(0);
      }
    }
    child.point = std::move(*point);
    return child;
  }

  const Partial& parent_;
  std::size_t dim_;
  std::vector<Plane> planes_;
  std::vector<std::vector<std::size_t>> groups_;
};

}  // namespace

std::vector<Region> enumerate_regions(const PwlNetwork& net, const Box& domain, const RegionOptions& options,
                                      RegionStats* stats) {
  const std::size_t d = net.input_dim();
  if (domain.dim() != d) throw WidthError("box dimension does not match network input");
  if (net.hidden_count() > options.max_neurons) throw BudgetError("max-neurons", options.max_neurons);
  if (d > options.max_input_dim) throw BudgetError("max-input-dim", options.max_input_dim);
  for (std::size_t k = 0; k < d; ++k) {
    if (!(domain.lo[k] < domain.hi[k])) throw IntervalError("degenerate domain in dimension " + std::to_string(k));
  }

  Partial root;
  root.open = domain.constraints(true);
  root.map.assign(d, Vector(d, Rat(0)));
  for (std::size_t k = 0; k < d; ++k) root.map[k][k] = Rat(1);
  root.offset.assign(d, Rat(0));
  root.point = domain.center();

  std::uint64_t checks = 0;
  std::vector<Partial> frontier{std::move(root)};
  for (const auto& layer : net.hidden) {
    std::vector<std::vector<Partial>> children(frontier.size());
    std::vector<std::uint64_t> child_checks(frontier.size(), 0);
    util::parallel_for(frontier.size(), options.workers, [&](std::uint64_t i) {
      children[i] = LayerExplorer(frontier[i], layer, d).explore(child_checks[i]);
    });
    std::vector<Partial> next;
    for (std::size_t i = 0; i < children.size(); ++i) {
      checks += child_checks[i];
      for (auto& c : children[i]) next.push_back(std::move(c));
    }
    frontier = std::move(next);
  }

  std::vector<Region> regions;
  regions.reserve(frontier.size());
  for (auto& p : frontier) {
    Region r;
    r.pattern = std::move(p.pattern);
    r.constraints = std::move(p.closed);
    const auto& out = net.output;
    for (std::size_t o = 0; o < out.weights.size(); ++o) {
      Vector row(d, Rat(0));
      Rat b = out.bias[o];
      for (std::size_t h = 0; h < p.map.size(); ++h) {
        const Rat& w = out.weights[o][h];
        if (w.is_zero()) continue;
        for (std::size_t k = 0; k < d; ++k) row[k] += w * p.map[h][k];
        b += w * p.offset[h];
      }
      r.map_weights.push_back(std::move(row));
      r.map_bias.push_back(std::move(b));
    }
    r.interior_point = std::move(p.point);
    regions.push_back(std::move(r));
  }
  std::sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) { return a.pattern < b.pattern; });
  if (stats) {
    stats->feasibility_checks += checks;
    stats->regions += regions.size();
  }
  return regions;
}

std::vector<std::vector<Constraint>> violation_terms(const Formula& f, std::size_t max_terms) {
  using Terms = std::vector<std::vector<Constraint>>;
  switch (f.op) {
    case Formula::Op::kAtom: {
      Constraint c{f.atom.coeffs, -f.atom.constant, true};
      for (auto& v : c.coeffs) v = -v;
      return {{std::move(c)}};
    }
    case Formula::Op::kAll: {
      Terms out;
      for (const auto& child : f.children) {
        for (auto& t : violation_terms(child, max_terms)) out.push_back(std::move(t));
        if (out.size() > max_terms) throw BudgetError("max-violation-terms", max_terms);
      }
      return out;
    }
    case Formula::Op::kAny: {
      Terms out{{}};
      for (const auto& child : f.children) {
        Terms sub = violation_terms(child, max_terms);
        Terms next;
        for (const auto& a : out) {
          for (const auto& b : sub) {
            auto t = a;
            t.insert(t.end(), b.begin(), b.end());
            next.push_back(std::move(t));
            if (next.size() > max_terms) throw BudgetError("max-violation-terms", max_terms);
          }
        }
        out = std::move(next);
      }
      return out;
    }
  }
  return {};
}

Verdict verify_regions(const PwlNetwork& net, const Judge& judge, const Box& domain, const RegionOptions& options) {
  if (judge.kind() != JudgeKind::kLinear) throw JudgeKindError("region verification needs a linear judge");
  const std::size_t d = net.input_dim();
  const std::size_t k = net.output_dim();
  if (judge.in_width() != d || judge.out_width() != k) {
    throw WidthError("linear judge widths must match the network (in=" + std::to_string(d) +
                     " out=" + std::to_string(k) + ")");
  }
  RegionStats stats;
  std::vector<Region> regions;
  std::vector<std::vector<Constraint>> terms;
  try {
    regions = enumerate_regions(net, domain, options, &stats);
    terms = violation_terms(*judge.formula(), options.max_violation_terms);
  } catch (const BudgetError& e) {
    return Verdict::resource_exceeded(e.budget(), e.limit());
  }
  auto box = domain.constraints(false);

  std::vector<std::optional<Vector>> witness(regions.size());
  auto scan = util::ordered_scan(
      regions.size(), options.workers,
      [&](std::uint64_t idx, std::uint64_t& cost) {
        const Region& r = regions[idx];
        for (const auto& term : terms) {
          std::vector<Constraint> cs = r.constraints;
          cs.insert(cs.end(), box.begin(), box.end());
          for (const auto& c : term) {
            // c ranges over (x, o); substitute o = A x + b.
            Constraint sub{Vector(c.coeffs.begin(), c.coeffs.begin() + d), c.constant, c.strict};
            for (std::size_t o = 0; o < k; ++o) {
              const Rat& w = c.coeffs[d + o];
              if (w.is_zero()) continue;
              for (std::size_t j = 0; j < d; ++j) sub.coeffs[j] += w * r.map_weights[o][j];
              sub.constant += w * r.map_bias[o];
            }
            cs.push_back(std::move(sub));
          }
          ++cost;
          if (auto x = find_point(cs, d)) {
            witness[idx] = std::move(x);
            return false;
          }
        }
        return true;
      },
      1);

  Verdict v = Verdict::aligned();
  if (scan.first_failure) {
    Vector x = *witness[*scan.first_failure];
    Vector o = net.eval(x);
    v = Verdict::misaligned({std::move(x), std::move(o)});
  }
  v.stats = {{"regions", regions.size()},
             {"enumeration_feasibility_checks", stats.feasibility_checks},
             {"violation_terms", terms.size()},
             {"regions_checked", scan.items},
             {"violation_feasibility_checks", scan.cost}};
  return v;
}

}  // namespace dg::verify
