#include "mfchaos/parallel.hpp"

namespace mfchaos {

double pairwise_sum(const double *x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += x[i];
    }
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

} // namespace mfchaos
