#pragma once

#include <vector>

namespace qkr {

// Probabilities on the discrete momentum comb p = (2 j + 2 beta) recoils.
// beta is the quasimomentum in units of 2 recoils, reduced to [0, 1);
// j is the absolute ladder index (integer offsets of the initial momentum
// are folded into j, not into beta).
struct LadderDistribution {
  double beta = 0.0;
  int j_min = 0;
  std::vector<double> probabilities;  // index i -> order j_min + i
  double off_comb_mass = 0.0;         // mass outside every binning window

  int j_max() const { return j_min + static_cast<int>(probabilities.size()) - 1; }

  double probability(int j) const {
    const int i = j - j_min;
    if (i < 0 || i >= static_cast<int>(probabilities.size())) return 0.0;
    return probabilities[static_cast<std::size_t>(i)];
  }

  // Comb position of order j in recoils.
  double momentum_of(int j) const { return 2.0 * j + 2.0 * beta; }

  double total_mass() const {
    double s = 0.0;
    for (double p : probabilities) s += p;
    return s;
  }

  // <(p / hbar k_L)^2> over the comb; equals the mean kinetic energy in
  // recoil energies.
  double mean_energy_recoils() const {
    double e = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      const double q = momentum_of(j_min + static_cast<int>(i));
      e += probabilities[i] * q * q;
    }
    return e;
  }

  // Drops negligible tails (keeps at least the single largest entry).
  void trim(double eps = 1e-16);
};

}  // namespace qkr
