#include "dg/kernel/rat.hpp"

#include <cctype>

#include "dg/kernel/errors.hpp"

namespace dg {

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

Rat::Rat(long num, long den) {
  if (den == 0) throw Error("rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rat Rat::parse(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num) || !is_integer_literal(den) || den.front() == '-' || den.front() == '+') {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  }
  mpz_class d = parse_integer(den);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  mpq_class q(parse_integer(num), d);
  return Rat(std::move(q));
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw Error("division by zero");
  q_ /= o.q_;
  return *this;
}

Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }
Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace dg
