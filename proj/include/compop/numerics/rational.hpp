#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

#include <gmpxx.h>

namespace compop::numerics {

// Arbitrary-precision rational, always held in lowest terms.
class BigRational {
 public:
  BigRational() = default;
  BigRational(long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  BigRational(long num, long den);
  explicit BigRational(const mpq_class& v);

  /// Exact value of a finite double (every double is a dyadic rational).
  static BigRational from_double(double v);
  /// Parses "p", "p/q" or a finite decimal literal such as "0.25".
  static BigRational parse(const std::string& text);

  double to_double() const { return value_.get_d(); }
  long double to_long_double() const;
  std::string to_string() const { return value_.get_str(); }
  std::string numerator_string() const { return value_.get_num().get_str(); }
  std::string denominator_string() const { return value_.get_den().get_str(); }
  int sign() const { return sgn(value_); }
  bool is_integer() const { return value_.get_den() == 1; }

  const mpq_class& raw() const { return value_; }

  BigRational& operator+=(const BigRational& o) { value_ += o.value_; return *this; }
  BigRational& operator-=(const BigRational& o) { value_ -= o.value_; return *this; }
  BigRational& operator*=(const BigRational& o) { value_ *= o.value_; return *this; }
  BigRational& operator/=(const BigRational& o);

  friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
  friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
  friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
  friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }
  friend BigRational operator-(const BigRational& a) { return BigRational(mpq_class(-a.value_)); }

  friend bool operator==(const BigRational& a, const BigRational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const BigRational& a, const BigRational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const BigRational& r) {
    return os << r.to_string();
  }

 private:
  mpq_class value_;
};

BigRational pow(const BigRational& base, unsigned exponent);
BigRational factorial(unsigned n);
BigRational binomial(unsigned n, unsigned k);

}  // namespace compop::numerics
