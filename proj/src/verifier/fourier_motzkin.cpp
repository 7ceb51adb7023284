#include "dg/verifier/fourier_motzkin.hpp"

#include <algorithm>
#include <map>

#include "dg/kernel/errors.hpp"

namespace dg::verify {

bool Constraint::satisfied_by(const std::vector<Rat>& x) const {
  Rat acc = constant;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!coeffs[k].is_zero()) acc += coeffs[k] * x[k];
  }
  return strict ? acc.sign() > 0 : acc.sign() >= 0;
}

namespace {

// Coefficients of a constraint restricted to the first `vars` variables.
struct Row {
  std::vector<Rat> coeffs;
  Rat constant;
  bool strict;
};

bool is_constant(const Row& r) {
  return std::all_of(r.coeffs.begin(), r.coeffs.end(), [](const Rat& c) { return c.is_zero(); });
}

bool constant_holds(const Row& r) { return r.strict ? r.constant.sign() > 0 : r.constant.sign() >= 0; }

// Scales by a positive factor so the first non-zero coefficient is +/-1.
void normalize(Row& r) {
  for (const auto& c : r.coeffs) {
    if (c.is_zero()) continue;
    Rat s = abs(c);
    if (s == Rat(1)) return;
    for (auto& v : r.coeffs) v /= s;
    r.constant /= s;
    return;
  }
}

struct CoeffLess {
  bool operator()(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Drops satisfied constant rows, keeps only the tightest row per coefficient
// vector. Returns false if a constant row is violated.
bool simplify(std::vector<Row>& rows) {
  std::map<std::vector<Rat>, Row, CoeffLess> best;
  for (auto& r : rows) {
    if (is_constant(r)) {
      if (!constant_holds(r)) return false;
      continue;
    }
    normalize(r);
    auto it = best.find(r.coeffs);
    if (it == best.end()) {
      best.emplace(r.coeffs, std::move(r));
      continue;
    }
    Row& cur = it->second;
    if (r.constant < cur.constant || (r.constant == cur.constant && r.strict && !cur.strict)) cur = std::move(r);
  }
  rows.clear();
  for (auto& [k, r] : best) rows.push_back(std::move(r));
  return true;
}

Rat pick(const std::optional<Rat>& lo, bool lo_strict, const std::optional<Rat>& hi, bool hi_strict) {
  if (lo && hi) {
    if (*lo == *hi && !lo_strict && !hi_strict) return *lo;
    return (*lo + *hi) / Rat(2);
  }
  if (lo) return lo_strict ? *lo + Rat(1) : *lo;
  if (hi) return hi_strict ? *hi - Rat(1) : *hi;
  return Rat(0);
}

}  // namespace

std::optional<std::vector<Rat>> find_point(const std::vector<Constraint>& constraints, std::size_t dim,
                                           FmStats* stats) {
  std::vector<Row> rows;
  rows.reserve(constraints.size());
  for (const auto& c : constraints) {
    if (c.coeffs.size() != dim) throw WidthError("constraint dimension mismatch");
    rows.push_back({c.coeffs, c.constant, c.strict});
  }
  if (!simplify(rows)) return std::nullopt;

  // levels[k] holds the system over variables 0..k (after eliminating k+1..).
  std::vector<std::vector<Row>> levels(dim);
  std::size_t peak = rows.size();
  for (std::size_t v = dim; v-- > 0;) {
    levels[v] = rows;
    std::vector<Row> pos, neg, next;
    for (auto& r : rows) {
      int s = r.coeffs[v].sign();
      if (s > 0) {
        pos.push_back(r);
      } else if (s < 0) {
        neg.push_back(r);
      } else {
        next.push_back(r);
      }
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        // p: a x_v + P >= 0 (a > 0), n: -b x_v + N >= 0 (b > 0)  =>  b P + a N >= 0
        Rat a = p.coeffs[v];
        Rat b = -n.coeffs[v];
        Row r{std::vector<Rat>(dim), b * p.constant + a * n.constant, p.strict || n.strict};
        for (std::size_t k = 0; k < v; ++k) r.coeffs[k] = b * p.coeffs[k] + a * n.coeffs[k];
        next.push_back(std::move(r));
      }
    }
    for (auto& r : next) r.coeffs[v] = Rat(0);
    rows = std::move(next);
    if (!simplify(rows)) return std::nullopt;
    peak = std::max(peak, rows.size());
    if (stats) ++stats->eliminations;
  }
  if (stats) stats->peak_constraints = std::max(stats->peak_constraints, peak);

  std::vector<Rat> x(dim, Rat(0));
  for (std::size_t v = 0; v < dim; ++v) {
    std::optional<Rat> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& r : levels[v]) {
      const Rat& a = r.coeffs[v];
      if (a.is_zero()) continue;
      Rat rest = r.constant;
      for (std::size_t k = 0; k < v; ++k) {
        if (!r.coeffs[k].is_zero()) rest += r.coeffs[k] * x[k];
      }
      Rat bound = -rest / a;
      if (a.sign() > 0) {  // x_v >= bound
        if (!lo || bound > *lo || (bound == *lo && r.strict)) {
          lo = bound;
          lo_strict = r.strict;
        }
      } else {  // x_v <= bound
        if (!hi || bound < *hi || (bound == *hi && r.strict)) {
          hi = bound;
          hi_strict = r.strict;
        }
      }
    }
    x[v] = pick(lo, lo_strict, hi, hi_strict);
  }
  for (const auto& c : constraints) {
    if (!c.satisfied_by(x)) throw Error("internal: Fourier-Motzkin witness violates a constraint");
  }
  return x;
}

}  // namespace dg::verify
