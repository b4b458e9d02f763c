#pragma once

// Conversions between GMP integers/rationals and floating point that stay
// finite for numbers far beyond the double range.

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace supertrees {

/// Natural logarithm of a positive integer of any size.
inline double log_of(const mpz_class& z) {
  if (sgn(z) <= 0) return -std::numeric_limits<double>::infinity();
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

inline double log_of(const mpq_class& q) {
  return log_of(mpz_class(q.get_num())) - log_of(mpz_class(q.get_den()));
}

/// z * 2^(-shift) as a double. Relative error below one ulp while the
/// result is in the normal range.
inline double scaled_double(const mpz_class& z, long shift) {
  if (sgn(z) == 0) return 0.0;
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::ldexp(mantissa, static_cast<int>(exponent - shift));
}

/// q as a double, going through logarithms when numerator or denominator
/// alone would overflow.
inline double to_double(const mpq_class& q) {
  if (sgn(q) == 0) return 0.0;
  long en = 0, ed = 0;
  const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::ldexp(mn / md, static_cast<int>(en - ed));
}

inline mpz_class factorial(unsigned long n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline mpz_class lcm_of_denominators(std::span<const mpq_class> values) {
  mpz_class l = 1;
  for (const auto& q : values) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  }
  return l;
}

/// Integer numerators of `values` over the common denominator `den`.
inline std::vector<mpz_class> over_common_denominator(std::span<const mpq_class> values,
                                                      const mpz_class& den) {
  std::vector<mpz_class> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i].get_num() * (den / values[i].get_den());
  }
  return out;
}

}  // namespace supertrees
