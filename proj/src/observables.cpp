#include "qkr/observables.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkr {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

struct Accumulated {
  double mass = 0.0;
  double weighted_p2 = 0.0;
};

Accumulated accumulate_variance(std::span<const double> momentum,
                                std::span<const double> density,
                                std::optional<double> window) {
  Accumulated acc;
  for (std::size_t i = 0; i < momentum.size(); ++i) {
    if (window && std::abs(momentum[i]) > *window) continue;
    acc.mass += density[i];
    acc.weighted_p2 += density[i] * momentum[i] * momentum[i];
  }
  return acc;
}

}  // namespace

double direct_variance(std::span<const double> momentum,
                       std::span<const double> density,
                       std::optional<double> window_recoils) {
  if (momentum.size() != density.size() || momentum.empty())
    throw std::invalid_argument("direct_variance: bad axis/density sizes");
  const Accumulated acc = accumulate_variance(momentum, density, window_recoils);
  if (!(acc.mass > 0.0))
    throw std::invalid_argument("direct_variance: no mass inside window");
  return acc.weighted_p2 / acc.mass;
}

double direct_variance(const LadderDistribution& comb,
                       std::optional<double> window_recoils) {
  double mass = 0.0;
  double e = 0.0;
  for (int j = comb.j_min; j <= comb.j_max(); ++j) {
    const double p = comb.momentum_of(j);
    if (window_recoils && std::abs(p) > *window_recoils) continue;
    mass += comb.probability(j);
    e += comb.probability(j) * p * p;
  }
  if (!(mass > 0.0))
    throw std::invalid_argument("direct_variance: no mass inside window");
  return e / mass;
}

double default_variance_window(const LadderDistribution& comb,
                               double mass_threshold) {
  double extent = 0.0;
  for (int j = comb.j_min; j <= comb.j_max(); ++j) {
    if (comb.probability(j) > mass_threshold)
      extent = std::max(extent, std::abs(comb.momentum_of(j)));
  }
  return extent + 4.0;  // two comb orders of margin
}

GaussianFitResult fit_orders(std::span<const double> momentum,
                             std::span<const double> density,
                             double expected_beta, int max_order,
                             double width_seed) {
  if (momentum.size() != density.size() || momentum.size() < 8)
    throw std::invalid_argument("fit_orders: bad axis/density sizes");
  if (max_order < 0) throw std::invalid_argument("fit_orders: max_order < 0");
  if (!(width_seed > 0.0))
    throw std::invalid_argument("fit_orders: width_seed must be positive");

  const std::size_t m = momentum.size();
  const double dp = momentum[1] - momentum[0];
  if (!(dp > 0.0))
    throw std::invalid_argument("fit_orders: axis must be increasing");

  double total_mass = 0.0;
  for (double y : density) total_mass += y * dp;
  if (!(total_mass > 0.0))
    throw std::invalid_argument("fit_orders: empty distribution");

  // Seed one Gaussian per order; orders with no local mass are frozen.
  const int n_orders = 2 * max_order + 1;
  std::vector<double> seed_center(static_cast<std::size_t>(n_orders));
  std::vector<double> seed_mass(static_cast<std::size_t>(n_orders), 0.0);
  std::vector<bool> active(static_cast<std::size_t>(n_orders), false);
  for (int idx = 0; idx < n_orders; ++idx) {
    const int j = idx - max_order;
    seed_center[static_cast<std::size_t>(idx)] = 2.0 * j + 2.0 * expected_beta;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const int j = static_cast<int>(
        std::lround((momentum[i] - 2.0 * expected_beta) / 2.0));
    const int idx = j + max_order;
    if (idx < 0 || idx >= n_orders) continue;
    seed_mass[static_cast<std::size_t>(idx)] += density[i] * dp;
  }
  int n_active = 0;
  for (int idx = 0; idx < n_orders; ++idx) {
    if (seed_mass[static_cast<std::size_t>(idx)] > 1e-9 * total_mass) {
      active[static_cast<std::size_t>(idx)] = true;
      ++n_active;
    }
  }
  if (n_active == 0)
    throw std::invalid_argument("fit_orders: no order has seed mass");

  // Parameter layout: (amplitude, center, width) per active order.
  const int n_params = 3 * n_active;
  Eigen::VectorXd theta(n_params);
  std::vector<int> order_of_block;
  order_of_block.reserve(static_cast<std::size_t>(n_active));
  {
    int b = 0;
    for (int idx = 0; idx < n_orders; ++idx) {
      if (!active[static_cast<std::size_t>(idx)]) continue;
      theta(3 * b + 0) = seed_mass[static_cast<std::size_t>(idx)] /
                         (width_seed * kSqrt2Pi);
      theta(3 * b + 1) = seed_center[static_cast<std::size_t>(idx)];
      theta(3 * b + 2) = width_seed;
      order_of_block.push_back(idx);
      ++b;
    }
  }

  auto model_residual = [&](const Eigen::VectorXd& th, Eigen::VectorXd& r,
                            Eigen::MatrixXd* jac) {
    r.setZero(static_cast<Eigen::Index>(m));
    if (jac) jac->setZero(static_cast<Eigen::Index>(m), n_params);
    for (std::size_t i = 0; i < m; ++i) {
      double f = 0.0;
      for (int b = 0; b < n_active; ++b) {
        const double a = th(3 * b + 0);
        const double c = th(3 * b + 1);
        const double w = std::abs(th(3 * b + 2));
        if (w < 1e-12) continue;
        const double d = momentum[i] - c;
        const double g = std::exp(-d * d / (2.0 * w * w));
        f += a * g;
        if (jac) {
          const double sign_w = th(3 * b + 2) < 0.0 ? -1.0 : 1.0;
          (*jac)(static_cast<Eigen::Index>(i), 3 * b + 0) = g;
          (*jac)(static_cast<Eigen::Index>(i), 3 * b + 1) = a * g * d / (w * w);
          (*jac)(static_cast<Eigen::Index>(i), 3 * b + 2) =
              sign_w * a * g * d * d / (w * w * w);
        }
      }
      r(static_cast<Eigen::Index>(i)) = density[i] - f;
    }
  };

  Eigen::VectorXd residual;
  Eigen::MatrixXd jac;
  model_residual(theta, residual, &jac);
  double ssr = residual.squaredNorm();

  double lambda = 1e-3;
  bool converged = false;
  int iterations = 0;
  constexpr int kMaxIterations = 200;
  constexpr double kStepTol = 1e-8;

  while (iterations < kMaxIterations && !converged) {
    ++iterations;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * residual;

    bool accepted = false;
    for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (int k = 0; k < n_params; ++k)
        damped(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(jtr);
      const Eigen::VectorXd trial = theta + step;

      Eigen::VectorXd trial_residual;
      model_residual(trial, trial_residual, nullptr);
      const double trial_ssr = trial_residual.squaredNorm();
      if (trial_ssr <= ssr) {
        const double rel_step = step.norm() / (theta.norm() + 1e-12);
        theta = trial;
        ssr = trial_ssr;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel_step < kStepTol) converged = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
    model_residual(theta, residual, &jac);
  }

  GaussianFitResult result;
  result.iterations = iterations;
  result.converged = converged;
  result.residual_norm = std::sqrt(ssr);
  result.orders.resize(static_cast<std::size_t>(n_orders));

  double energy_num = 0.0;
  double energy_den = 0.0;
  for (int idx = 0; idx < n_orders; ++idx) {
    OrderFit& fit = result.orders[static_cast<std::size_t>(idx)];
    fit.j = idx - max_order;
    fit.center = seed_center[static_cast<std::size_t>(idx)];
    fit.width = width_seed;
    fit.amplitude = 0.0;
    fit.mass = 0.0;
    fit.converged = false;
  }
  for (int b = 0; b < n_active; ++b) {
    const int idx = order_of_block[static_cast<std::size_t>(b)];
    OrderFit& fit = result.orders[static_cast<std::size_t>(idx)];
    fit.amplitude = theta(3 * b + 0);
    fit.center = theta(3 * b + 1);
    fit.width = std::abs(theta(3 * b + 2));
    fit.mass = fit.amplitude * fit.width * kSqrt2Pi;
    const bool center_ok =
        std::abs(fit.center - seed_center[static_cast<std::size_t>(idx)]) <= 0.5;
    fit.converged = converged && center_ok && fit.amplitude >= 0.0;
    if (fit.mass > 0.0 && center_ok) {
      energy_num += fit.mass * (fit.center * fit.center + fit.width * fit.width);
      energy_den += fit.mass;
    }
  }
  result.energy = (energy_den > 0.0) ? energy_num / energy_den : 0.0;
  if (energy_den <= 0.0) result.converged = false;
  return result;
}

EnergyScan repeat_statistics(const std::vector<EnergyScan>& repeats) {
  if (repeats.size() < 2)
    throw std::invalid_argument("repeat_statistics: need at least 2 repeats");
  const EnergyScan& first = repeats.front();
  for (const auto& r : repeats) {
    if (r.parameter != first.parameter || r.values != first.values)
      throw std::invalid_argument("repeat_statistics: mismatched parameter grids");
  }

  EnergyScan out;
  out.parameter = first.parameter;
  out.values = first.values;
  out.energy.resize(first.values.size());
  out.uncertainty.resize(first.values.size());

  const double n = static_cast<double>(repeats.size());
  for (std::size_t i = 0; i < first.values.size(); ++i) {
    double mean = 0.0;
    for (const auto& r : repeats) mean += r.energy[i];
    mean /= n;
    double var = 0.0;
    for (const auto& r : repeats) {
      const double d = r.energy[i] - mean;
      var += d * d;
    }
    out.energy[i] = mean;
    out.uncertainty[i] = std::sqrt(var / (n - 1.0));
  }
  return out;
}

std::vector<double> reduce_image(const std::vector<std::vector<double>>& image,
                                 ReduceAxis axis) {
  if (image.empty() || image.front().empty())
    throw std::invalid_argument("reduce_image: empty image");
  const std::size_t n_cols = image.front().size();
  for (const auto& row : image) {
    if (row.size() != n_cols)
      throw std::invalid_argument("reduce_image: ragged image");
  }

  std::vector<double> profile;
  if (axis == ReduceAxis::kOverRows) {
    profile.assign(n_cols, 0.0);
    for (const auto& row : image)
      for (std::size_t c = 0; c < n_cols; ++c) profile[c] += row[c];
  } else {
    profile.assign(image.size(), 0.0);
    for (std::size_t r = 0; r < image.size(); ++r)
      for (double v : image[r]) profile[r] += v;
  }

  double total = 0.0;
  for (double v : profile) total += v;
  if (!(total > 0.0))
    throw std::invalid_argument("reduce_image: image has no mass");
  for (double& v : profile) v /= total;
  return profile;
}

int count_local_maxima(std::span<const double> values,
                       double min_relative_height) {
  if (values.size() < 3) return 0;
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  if (!(top > 0.0)) return 0;
  const double floor = min_relative_height * top;

  int count = 0;
  std::size_t i = 1;
  while (i + 1 < values.size()) {
    if (values[i] > values[i - 1] && values[i] >= floor) {
      // walk across any plateau
      std::size_t j = i;
      while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
      if (j + 1 < values.size() && values[j + 1] < values[i]) ++count;
      i = j + 1;
    } else {
      ++i;
    }
  }
  return count;
}

}  // namespace qkr
