#pragma once

#include <complex>
#include <vector>

#include "qkr/ladder.hpp"

namespace qkr::oracle {

// Closed-form ladder amplitudes after n kicks at kick periods that are a
// half-integer multiple of the Talbot time (T = l T_T / 2, integer l).
// They provide the verification path independent of the grid propagator.

// Upsilon = pi/2 (1 + 2 beta) l.
double upsilon(double beta, int l);

// phi_d sin(n Upsilon) / sin(Upsilon). At the resonant singularities
// sin(Upsilon) -> 0 the analytic limit +-n phi_d is returned (sign from
// n cos(n Upsilon)/cos(Upsilon) at the nearest singular point).
double kick_argument(int n, double ups, double phi_d);

struct LadderAmplitudes {
  int n = 0;             // kicks
  int l = 0;             // 2 T / T_T
  double beta = 0.0;     // quasimomentum, reduced to [0, 1)
  double phi_d = 0.0;
  int j_min = 0;
  std::vector<std::complex<double>> c;  // index i -> order j_min + i

  int j_max() const { return j_min + static_cast<int>(c.size()) - 1; }

  std::complex<double> amplitude(int j) const {
    const int i = j - j_min;
    if (i < 0 || i >= static_cast<int>(c.size())) return {0.0, 0.0};
    return c[static_cast<std::size_t>(i)];
  }

  double probability(int j) const { return std::norm(amplitude(j)); }
  double total_probability() const;
};

// Amplitudes c_j = J_j(A) i^j exp(-i j (n+1) Upsilon) exp(-i n pi beta^2 l)
// with A the kick argument. beta may be any real; it is reduced to [0, 1).
// The order range is extended until the truncated tail mass is < 1e-12
// (at least +-min_half_range orders are always present).
LadderAmplitudes ladder_amplitudes(int n, int l, double beta, double phi_d,
                                   int min_half_range = 0);

// 4 sum_j |c_j|^2 (j + beta)^2: the second moment of the comb in units of
// (hbar k_L)^2, i.e. the mean kinetic energy in recoil energies.
double second_moment(const LadderAmplitudes& amps);

LadderDistribution to_distribution(const LadderAmplitudes& amps);

// Comb distribution for an arbitrary initial momentum p_i = 2 (j0 + beta)
// recoils: magnitudes of the beta ladder shifted to absolute orders j + j0.
// n = 0 yields the unkicked comb (all mass at p_i).
LadderDistribution distribution_for_momentum(int n, int l, double p_i_recoils,
                                             double phi_d);

// Mean energy in recoil units for the same shifted comb.
double energy_for_momentum(int n, int l, double p_i_recoils, double phi_d);

}  // namespace qkr::oracle
