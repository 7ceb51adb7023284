#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace dg {

// Exact rational number, always kept in lowest terms with a positive
// denominator. Backed by GMP.
class Rat {
 public:
  Rat() = default;
  Rat(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rat(int v) : q_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  Rat(long num, long den);
  explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  // Accepts "p", "-p", "p/q" (q != 0). Whitespace is not allowed.
  static Rat parse(std::string_view text);

  std::string to_string() const { return q_.get_str(); }
  const mpq_class& raw() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  double to_double() const { return q_.get_d(); }

  Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
  Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
  Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.q_)); }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.to_string(); }

 private:
  mpq_class q_;
};

Rat abs(const Rat& r);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

}  // namespace dg
