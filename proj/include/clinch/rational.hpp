#pragma once

// Exact rational scalar used for every price, value, budget and payment.
//
// Backed by GMP's mpq_class. Values are always canonical (lowest terms,
// positive denominator), so equality is structural and rendering is stable.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clinch {

using BigInt = mpz_class;

class Rational {
 public:
  Rational() = default;
  Rational(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator) {
    if (denominator == 0) {
      throw std::invalid_argument("rational with zero denominator");
    }
    q_ = mpq_class(mpz_class(numerator), mpz_class(denominator));
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
  explicit Rational(const BigInt& z) : q_(z) {}

  // Accepts "7", "-3", "5/2", "-10/4" (reduced), "2.5", "-0.125".
  // Anything else (exponents, whitespace, empty parts) is rejected.
  static Rational parse(std::string_view text);

  [[nodiscard]] std::string str() const { return q_.get_str(); }

  [[nodiscard]] const mpq_class& raw() const { return q_; }
  [[nodiscard]] BigInt numerator() const { return q_.get_num(); }
  [[nodiscard]] BigInt denominator() const { return q_.get_den(); }

  [[nodiscard]] int sign() const { return sgn(q_); }
  [[nodiscard]] bool is_zero() const { return sign() == 0; }
  [[nodiscard]] bool is_integer() const { return q_.get_den() == 1; }

  Rational& operator+=(const Rational& o) {
    q_ += o.q_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    q_ -= o.q_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    q_ *= o.q_;
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("rational division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_{0};
};

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
  };
  auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };

  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) return fail();

  mpq_class q;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) return fail();
    q = mpq_class(n, d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if (!all_digits(whole) || !all_digits(frac)) return fail();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class n(std::string(whole) + std::string(frac), 10);
    q = mpq_class(n, scale);
  } else {
    if (!all_digits(body)) return fail();
    q = mpq_class(mpz_class(std::string(body), 10));
  }
  q.canonicalize();
  if (negative) q = -q;
  return Rational(std::move(q));
}

// Exact floor(numer / denom) for numer >= 0, denom > 0.
inline BigInt floor_div(const Rational& numer, const Rational& denom) {
  if (denom.sign() <= 0) throw std::invalid_argument("floor_div: denominator must be positive");
  if (numer.sign() < 0) throw std::invalid_argument("floor_div: numerator must be nonnegative");
  // (a/b) / (c/d) = (a*d) / (b*c)
  BigInt top = numer.numerator() * denom.denominator();
  BigInt bottom = numer.denominator() * denom.numerator();
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), top.get_mpz_t(), bottom.get_mpz_t());
  return out;
}

}  // namespace clinch

template <>
struct std::hash<clinch::Rational> {
  std::size_t operator()(const clinch::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
