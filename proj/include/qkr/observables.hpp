#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkr/ladder.hpp"

namespace qkr {

// Mean energy (recoil units) as a function of a swept parameter.
struct EnergyScan {
  std::string parameter;  // e.g. "p_i_recoils" or "n_kicks"
  std::vector<double> values;
  std::vector<double> energy;
  std::vector<double> uncertainty;  // zero unless repeats were combined
};

// Raw second moment <(p/hbar k_L)^2> of a sampled density (probability per
// recoil on a momentum axis), optionally restricted to |p| <= window and
// renormalized there. This is the "direct variance" estimate; it is exact
// but sensitive to stray mass at large momenta.
double direct_variance(std::span<const double> momentum,
                       std::span<const double> density,
                       std::optional<double> window_recoils = std::nullopt);

// Comb version: sum P_j (2j + 2 beta)^2 over orders inside the window.
double direct_variance(const LadderDistribution& comb,
                       std::optional<double> window_recoils = std::nullopt);

// Default variance window: two orders beyond the largest order with mass
// above threshold.
double default_variance_window(const LadderDistribution& comb,
                               double mass_threshold = 1e-4);

// One fitted diffraction order of a sum-of-Gaussians model.
struct OrderFit {
  int j = 0;
  double center = 0.0;     // recoils
  double amplitude = 0.0;  // density peak height
  double width = 0.0;      // Gaussian sigma, recoils
  double mass = 0.0;       // amplitude * width * sqrt(2 pi)
  bool converged = false;  // false for degenerate/drifted orders
};

struct GaussianFitResult {
  std::vector<OrderFit> orders;
  double energy = 0.0;  // mass-weighted sum of center^2 + width^2
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nonlinear least-squares fit of one Gaussian per diffraction order, seeded
// at centers (2 j + 2 beta) for |j| <= max_order with amplitudes from the
// local mass and widths from width_seed. Orders with no seed mass are frozen
// at zero amplitude and flagged. Damped Gauss-Newton iteration, analytic
// Jacobian, cap 200 iterations, relative-step convergence 1e-8.
GaussianFitResult fit_orders(std::span<const double> momentum,
                             std::span<const double> density,
                             double expected_beta, int max_order,
                             double width_seed = 0.1);

// Mean and sample standard deviation across repeats with identical grids.
EnergyScan repeat_statistics(const std::vector<EnergyScan>& repeats);

enum class ReduceAxis {
  kOverRows,     // collapse rows, profile over columns
  kOverColumns,  // collapse columns, profile over rows
};

// Collapses a non-negative 2D density to a 1D profile normalized to unit sum.
std::vector<double> reduce_image(const std::vector<std::vector<double>>& image,
                                 ReduceAxis axis);

// Interior local maxima above min_relative_height * max(values).
int count_local_maxima(std::span<const double> values,
                       double min_relative_height = 0.01);

}  // namespace qkr
