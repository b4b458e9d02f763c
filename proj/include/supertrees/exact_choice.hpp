#pragma once

// Exact sampling from a finite law given by big-integer weights.
//
// A uniform U in [0, 1) is revealed lazily: its first 53 bits decide the
// outcome whenever the double approximation of the law leaves no doubt,
// which is almost always. Otherwise more bits of the same U are compared
// against the exact cumulative sums, so the outcome has exactly the law
// weight_i / sum of weights.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "supertrees/error.hpp"

namespace supertrees {

/// Relative accuracy assumed for the double approximations: every partial
/// sum divided by the approximate total is within this of the exact ratio.
inline constexpr double kChoiceMargin = 1e-9;

/// Index in [0, count) drawn with probability exact(i) / sum exact.
///
/// approx(i) is a double proportional to exact(i) (same factor for every
/// i), approx_total the double approximation of the sum. Outcomes are
/// scanned in index order, so callers put likely outcomes first.
template <class Engine, class Approx, class Exact>
std::size_t exact_categorical(Engine& rng, std::size_t count, Approx&& approx, double approx_total,
                              Exact&& exact) {
  detail::require(count > 0, "categorical choice needs at least one outcome");
  const std::uint64_t head = rng() >> 11;  // 53 bits
  const double u_lo = static_cast<double>(head) * 0x1.0p-53;
  const double u_hi = static_cast<double>(head + 1) * 0x1.0p-53;
  const double target = u_lo * approx_total;

  double cum = 0.0;
  std::size_t i = 0;
  for (; i < count; ++i) {
    const double next = cum + approx(i);
    if (target < next) {
      const double lo = cum / approx_total, hi = next / approx_total;
      if (u_lo >= lo + kChoiceMargin && u_hi <= hi - kChoiceMargin) return i;
      break;
    }
    cum = next;
  }

  // Exact resolution with further bits of the same U.
  std::vector<mpz_class> cumulative(count);
  mpz_class total = 0;
  for (std::size_t j = 0; j < count; ++j) {
    total += exact(j);
    cumulative[j] = total;
  }
  detail::require(sgn(total) > 0, "categorical choice needs positive total weight");
  mpz_class prefix = static_cast<unsigned long>(head);
  unsigned long bits = 53;
  for (;;) {
    // U * total lies in [prefix * total, (prefix + 1) * total) / 2^bits.
    const mpz_class lo = prefix * total;
    const mpz_class hi = lo + total;
    std::size_t j = 0;
    {
      // First bucket whose upper end exceeds lo / 2^bits.
      std::size_t a = 0, b = count;
      while (a < b) {
        const std::size_t mid = (a + b) / 2;
        mpz_class edge = cumulative[mid];
        mpz_mul_2exp(edge.get_mpz_t(), edge.get_mpz_t(), bits);
        if (edge > lo) b = mid;
        else a = mid + 1;
      }
      j = a;
    }
    mpz_class edge = cumulative[j];
    mpz_mul_2exp(edge.get_mpz_t(), edge.get_mpz_t(), bits);
    if (hi <= edge) return j;
    const std::uint64_t more = rng();
    mpz_mul_2exp(prefix.get_mpz_t(), prefix.get_mpz_t(), 64);
    mpz_class chunk;
    mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(more), 0, 0, &more);
    prefix += chunk;
    bits += 64;
  }
}

}  // namespace supertrees
