#pragma once

#include <bit>
#include <cstdint>

namespace bagcv::detail {

/// exp(x) for x <= 0, branch-free so pair-sum loops vectorize. Relative error
/// is a few ulp; arguments below -708 return 0 (true value < 3.3e-308).
inline double exp_nonpositive(double x) noexcept {
  constexpr double log2e = 1.4426950408889634;
  constexpr double ln2_hi = 6.93147180369123816490e-01;
  constexpr double ln2_lo = 1.90821492927058770002e-10;
  constexpr double shifter = 6755399441055744.0;  // 1.5 * 2^52
  const double xc = x < -708.0 ? -708.0 : x;
  const double kd = xc * log2e + shifter;
  const double k = kd - shifter;
  const double r = (xc - k * ln2_hi) - k * ln2_lo;
  // Taylor series on |r| <= ln2/2, truncated after r^13.
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  // Low mantissa bits of kd hold 2^51 + k; only the low 12 survive the shift.
  const std::uint64_t bits = (std::bit_cast<std::uint64_t>(kd) + 1023u) << 52;
  const double res = p * std::bit_cast<double>(bits);
  return x < -708.0 ? 0.0 : res;
}

}  // namespace bagcv::detail
