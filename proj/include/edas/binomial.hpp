#pragma once

#include <cstdint>
#include <stdexcept>

// Exact binomial coefficients via the multiplicative formula with stepwise
// cancellation. Group sizes here are small (tens of rollouts), so results
// fit in 64 bits; anything larger throws rather than silently losing
// exactness.

namespace edas {

// C(n, k); zero when k > n.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;  // exact: C(m, i) is an integer
    if (result > static_cast<unsigned __int128>(UINT64_MAX)) {
      throw std::overflow_error("binomial coefficient exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

}  // namespace edas
