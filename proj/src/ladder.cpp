#include "qkr/ladder.hpp"

#include <algorithm>

namespace qkr {

void LadderDistribution::trim(double eps) {
  if (probabilities.empty()) return;
  std::size_t lo = 0;
  std::size_t hi = probabilities.size();
  while (lo + 1 < hi && probabilities[lo] <= eps) ++lo;
  while (hi > lo + 1 && probabilities[hi - 1] <= eps) --hi;
  if (lo == 0 && hi == probabilities.size()) return;
  std::vector<double> kept(probabilities.begin() + static_cast<std::ptrdiff_t>(lo),
                           probabilities.begin() + static_cast<std::ptrdiff_t>(hi));
  probabilities = std::move(kept);
  j_min += static_cast<int>(lo);
}

}  // namespace qkr
