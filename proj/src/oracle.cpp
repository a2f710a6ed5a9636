#include "qkr/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkr/bessel.hpp"

namespace qkr::oracle {

namespace {

constexpr double kSingularSin = 1e-8;
constexpr double kTailMass = 1e-12;

double reduce_beta(double beta) {
  double b = beta - std::floor(beta);
  if (b >= 1.0) b = 0.0;  // guard against floor rounding at the edge
  return b;
}

}  // namespace

double upsilon(double beta, int l) {
  if (l < 1) throw std::invalid_argument("upsilon: l must be a positive integer");
  return 0.5 * std::numbers::pi * (1.0 + 2.0 * beta) * l;
}

double kick_argument(int n, double ups, double phi_d) {
  if (n < 1) throw std::invalid_argument("kick_argument: n must be >= 1");
  const double s = std::sin(ups);
  if (std::abs(s) < kSingularSin) {
    // L'Hopital limit n cos(n u)/cos(u) at the nearest u = m pi; the cosine
    // ratio is (-1)^{m(n-1)}, evaluated exactly in integer arithmetic.
    const long m = std::lround(ups / std::numbers::pi);
    const int sign = ((m % 2 != 0) && ((n - 1) % 2 != 0)) ? -1 : 1;
    return phi_d * n * sign;
  }
  return phi_d * std::sin(n * ups) / s;
}

double LadderAmplitudes::total_probability() const {
  double s = 0.0;
  for (const auto& a : c) s += std::norm(a);
  return s;
}

LadderAmplitudes ladder_amplitudes(int n, int l, double beta, double phi_d,
                                   int min_half_range) {
  if (n < 1) throw std::invalid_argument("ladder_amplitudes: n must be >= 1");
  if (l < 1) throw std::invalid_argument("ladder_amplitudes: l must be >= 1");

  const double b = reduce_beta(beta);
  const double ups = upsilon(b, l);
  const double arg = kick_argument(n, ups, phi_d);

  int half = std::max(min_half_range, static_cast<int>(std::ceil(std::abs(arg))) + 30);
  std::vector<double> jn;
  for (;;) {
    jn = bessel_j_array(half, std::abs(arg));
    double covered = jn[0] * jn[0];
    for (int k = 1; k <= half; ++k) covered += 2.0 * jn[static_cast<std::size_t>(k)] * jn[static_cast<std::size_t>(k)];
    if (1.0 - covered < kTailMass) break;
    half += std::max(20, half / 4);
  }

  LadderAmplitudes amps;
  amps.n = n;
  amps.l = l;
  amps.beta = b;
  amps.phi_d = phi_d;
  amps.j_min = -half;
  amps.c.resize(2 * static_cast<std::size_t>(half) + 1);

  const double global_phase = -n * std::numbers::pi * b * b * l;
  const std::complex<double> global = std::polar(1.0, global_phase);
  const bool negative_arg = arg < 0.0;

  for (int j = -half; j <= half; ++j) {
    double jv = jn[static_cast<std::size_t>(std::abs(j))];
    // J_{-k}(x) = (-1)^k J_k(x) and J_k(-x) = (-1)^k J_k(x); the two parity
    // flips cancel when both apply.
    if (((j < 0) != negative_arg) && (std::abs(j) % 2 != 0)) jv = -jv;
    // i^j e^{-i j (n+1) Upsilon}
    const double phase = 0.5 * std::numbers::pi * j - j * (n + 1.0) * ups;
    amps.c[static_cast<std::size_t>(j + half)] = jv * std::polar(1.0, phase) * global;
  }
  return amps;
}

double second_moment(const LadderAmplitudes& amps) {
  double e = 0.0;
  for (int j = amps.j_min; j <= amps.j_max(); ++j) {
    const double w = j + amps.beta;
    e += amps.probability(j) * w * w;
  }
  return 4.0 * e;
}

LadderDistribution to_distribution(const LadderAmplitudes& amps) {
  LadderDistribution d;
  d.beta = amps.beta;
  d.j_min = amps.j_min;
  d.probabilities.reserve(amps.c.size());
  for (const auto& a : amps.c) d.probabilities.push_back(std::norm(a));
  d.trim(1e-18);
  return d;
}

LadderDistribution distribution_for_momentum(int n, int l, double p_i_recoils,
                                             double phi_d) {
  if (l < 1) throw std::invalid_argument("distribution_for_momentum: l must be >= 1");
  const double half_momentum = 0.5 * p_i_recoils;
  const double b = reduce_beta(half_momentum);
  const int j0 = static_cast<int>(std::llround(half_momentum - b));

  if (n == 0) {
    LadderDistribution d;
    d.beta = b;
    d.j_min = j0;
    d.probabilities = {1.0};
    return d;
  }

  LadderDistribution d = to_distribution(ladder_amplitudes(n, l, b, phi_d));
  d.j_min += j0;
  return d;
}

double energy_for_momentum(int n, int l, double p_i_recoils, double phi_d) {
  return distribution_for_momentum(n, l, p_i_recoils, phi_d).mean_energy_recoils();
}

}  // namespace qkr::oracle
