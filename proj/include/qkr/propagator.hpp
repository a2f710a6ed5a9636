#pragma once

#include <complex>
#include <vector>

#include "qkr/ladder.hpp"

namespace qkr {

// Periodic position grid spanning n_periods lattice periods (the kick
// potential cos(2x) has period pi in units of 1/k_L). The matched momentum
// grid has spacing 2/n_periods recoils, so the comb p = 2j recoils falls
// exactly on grid nodes.
struct SpatialGrid {
  int n_points = 1 << 16;
  int n_periods = 256;

  double box_length() const;              // n_periods * pi, units of 1/k_L
  double dx() const;                      // box_length / n_points
  double dp() const;                      // 2 / n_periods, recoils
  double position(int i) const;           // (i - n_points/2) * dx
  double max_momentum() const;            // n_points/2 * dp
};

// Validates the power-of-two / divisibility invariants.
SpatialGrid make_grid(int n_points, int n_periods);

// One kick sequence: n_kicks kicks of strength phi_d at period T expressed
// as a multiple of the Talbot time. pulse_width_fraction = tau/T selects the
// finite-pulse mode (0 = ideal delta); finite pulses are integrated with
// Strang splitting over `substeps` steps.
struct KickSchedule {
  int n_kicks = 2;
  double period_talbot = 0.5;
  double phi_d = 1.0;
  double pulse_width_fraction = 0.0;
  int substeps = 32;
};

void validate(const KickSchedule& schedule);

// Schedule at T = l T_T / 2 (integer l), where the closed-form ladder
// amplitudes apply.
KickSchedule schedule_for_l(int l, int n_kicks, double phi_d);

// Wavefunction amplitudes on the position grid, kept at unit L2 norm.
struct WaveState {
  SpatialGrid grid;
  std::vector<std::complex<double>> amplitudes;
  double beta = 0.0;       // imprinted quasimomentum, [0, 1), units 2 recoils
  double momentum0 = 0.0;  // imprinted mean momentum, recoils (grid-rounded)

  double norm() const;
};

// Gaussian wavepacket of position-density rms sigma_w (units of 1/k_L)
// centered in the box, with a plane-wave factor at the grid momentum nearest
// k_i (recoils). The actually imprinted quasimomentum is recorded in beta.
WaveState init_wavepacket(const SpatialGrid& grid, double sigma_w,
                          double k_i_recoils);

// Exact plane wave at the grid momentum nearest k_i (for ladder-resolved
// comparisons free of packet-width effects).
WaveState init_plane_wave(const SpatialGrid& grid, double k_i_recoils);

// Pointwise phase exp(-i phi_d cos(2 x)); unitary.
void apply_kick(WaveState& state, double phi_d);

// Free flight for `duration` Talbot times: each momentum component q
// (recoils) acquires the phase exp(-i (pi/2) q^2 duration).
void apply_free(WaveState& state, double duration_talbot);

// Applies the per-period Floquet map n_kicks times: kick then free flight
// (ideal mode), or Strang-split finite pulse followed by free flight for
// T - tau. Throws NumericalFailure with the period index if amplitudes
// become non-finite.
void run_schedule(WaveState& state, const KickSchedule& schedule);

struct MomentumDistribution {
  double p_min = 0.0;               // momentum of probability[0], recoils
  double dp = 0.0;
  std::vector<double> probability;  // per momentum node, ascending in p
  LadderDistribution comb;

  double momentum(std::size_t i) const { return p_min + dp * static_cast<double>(i); }
  double mean_energy_recoils() const;
};

// FFT to the momentum representation. Probabilities are binned onto comb
// orders j by assigning every node within window_recoils of the center
// (2 j + 2 beta) to that order; with the default window of half the comb
// spacing the windows partition the axis. Smaller windows leave gaps whose
// mass is reported as off_comb_mass (quasimomentum-conservation check).
MomentumDistribution momentum_distribution(const WaveState& state,
                                           double window_recoils = 1.0);

// <(p/hbar k_L)^2> of the current state.
double mean_energy_recoils(const WaveState& state);

// <psi_a | psi_b> on a common grid.
std::complex<double> overlap(const WaveState& a, const WaveState& b);

}  // namespace qkr
