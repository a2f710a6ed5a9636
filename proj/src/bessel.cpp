#include "qkr/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace qkr {

std::vector<double> bessel_j_array(int n_max, double x) {
  if (n_max < 0) throw std::invalid_argument("bessel_j_array: n_max < 0");

  const double ax = std::abs(x);
  std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);

  if (ax < 1e-290) {
    j[0] = 1.0;
    return j;
  }

  // Start the downward recurrence far enough above both the requested order
  // and the turning point n ~ |x| that the unwanted solution has decayed.
  const int start = std::max(n_max, static_cast<int>(std::ceil(ax))) + 40;

  double fkp1 = 0.0;    // f_{k+1}
  double fk = 1e-280;   // f_k, arbitrary small seed
  double norm = 0.0;    // accumulates f_0 + 2 f_2 + 2 f_4 + ...
  for (int k = start; k >= 1; --k) {
    double fkm1 = (2.0 * k / ax) * fk - fkp1;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 <= n_max) j[static_cast<std::size_t>(k - 1)] = fk;
    if (((k - 1) & 1) == 0) norm += (k - 1 == 0) ? fk : 2.0 * fk;
    if (std::abs(fk) > 1e280) {  // rescale to avoid overflow
      const double scale = 1e-280;
      fk *= scale;
      fkp1 *= scale;
      norm *= scale;
      for (auto& v : j) v *= scale;
    }
  }

  for (auto& v : j) v /= norm;

  if (x < 0.0) {
    for (int n = 1; n <= n_max; n += 2) j[static_cast<std::size_t>(n)] = -j[static_cast<std::size_t>(n)];
  }
  return j;
}

double bessel_j(int n, double x) {
  const int an = std::abs(n);
  const double v = bessel_j_array(an, x)[static_cast<std::size_t>(an)];
  return (n < 0 && (an & 1)) ? -v : v;
}

}  // namespace qkr
