#ifndef OCNOETHER_RATIONAL_HPP
#define OCNOETHER_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

namespace ocnoether {

// Exact rational with int64 storage. All arithmetic is overflow-checked via
// __int128; operations return nullopt on overflow so callers can demote to
// double instead of silently wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)

  static std::optional<Rational> make(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    __int128 n = num, d = den;
    return reduce(n, d);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return reduce(n, d);
  }
  static std::optional<Rational> sub(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return reduce(n, d);
  }
  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.num_;
    __int128 d = (__int128)a.den_ * b.den_;
    return reduce(n, d);
  }
  // nullopt also when b == 0.
  static std::optional<Rational> div(const Rational& a, const Rational& b) {
    if (b.num_ == 0) return std::nullopt;
    __int128 n = (__int128)a.num_ * b.den_;
    __int128 d = (__int128)a.den_ * b.num_;
    return reduce(n, d);
  }

  std::optional<Rational> negated() const {
    return Rational::sub(Rational(0), *this);
  }

  // Integer power; exponent may be negative (nullopt for 0^negative).
  std::optional<Rational> pow_int(std::int64_t e) const {
    if (e == 0) return Rational(1);
    Rational base = *this;
    if (e < 0) {
      if (num_ == 0) return std::nullopt;
      auto inv = Rational::div(Rational(1), base);
      if (!inv) return std::nullopt;
      base = *inv;
      e = -e;
    }
    if (e > 64) return std::nullopt;  // demote absurd exponents
    Rational acc(1);
    for (std::int64_t i = 0; i < e; ++i) {
      auto p = Rational::mul(acc, base);
      if (!p) return std::nullopt;
      acc = *p;
    }
    return acc;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static std::optional<Rational> reduce(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    if (n == 0) return Rational(0);
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    n /= a;
    d /= a;
    constexpr __int128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi) return std::nullopt;
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace ocnoether

#endif
