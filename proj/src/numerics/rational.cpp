#include "compop/numerics/rational.hpp"

#include <cmath>
#include <stdexcept>

#include "compop/error.hpp"
#include "compop/numerics/precision.hpp"

namespace compop::numerics {

BigRational::BigRational(long num, long den) : value_(num, den) {
  if (den == 0) throw DomainError("BigRational: zero denominator");
  value_.canonicalize();
}

BigRational::BigRational(const mpq_class& v) : value_(v) { value_.canonicalize(); }

BigRational BigRational::from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("BigRational::from_double: non-finite input");
  mpq_class q(v);  // mpq_set_d is exact
  q.canonicalize();
  return BigRational(q);
}

BigRational BigRational::parse(const std::string& text) {
  const auto dot = text.find('.');
  try {
    if (dot == std::string::npos) {
      mpq_class q(text, 10);
      if (q.get_den() == 0) throw DomainError("BigRational::parse: zero denominator");
      q.canonicalize();
      return BigRational(q);
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac = text.size() - dot - 1;
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    mpq_class q(num, den);
    q.canonicalize();
    return BigRational(q);
  } catch (const std::invalid_argument&) {
    throw DomainError("BigRational::parse: malformed rational '" + text + "'");
  }
}

long double BigRational::to_long_double() const {
  // Go through a 113-bit float so ratios of huge integers keep their
  // leading digits even when numerator and denominator overflow separately.
  const quad_float num(value_.get_num().get_str());
  const quad_float den(value_.get_den().get_str());
  return static_cast<long double>(num / den);
}

BigRational& BigRational::operator/=(const BigRational& o) {
  if (o.value_ == 0) throw DomainError("BigRational: division by zero");
  value_ /= o.value_;
  return *this;
}

BigRational pow(const BigRational& base, unsigned exponent) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), exponent);
  return BigRational(mpq_class(num, den));
}

BigRational factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return BigRational(mpq_class(f));
}

BigRational binomial(unsigned n, unsigned k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return BigRational(mpq_class(b));
}

}  // namespace compop::numerics
