// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qkr/ensemble.hpp"
#include "qkr/observables.hpp"
#include "qkr/oracle.hpp"
#include "qkr/parallel.hpp"
#include "qkr/propagator.hpp"
#include "qkr/units.hpp"

using namespace qkr;

namespace {

const SpatialGrid kGrid = make_grid(1 << 16, 256);
constexpr double kFiveMicronSigma = 40.276;  // 5 um * k_L at 780 nm
constexpr double kWideSigma = 128.0;

struct Check {
  int id;
  std::string title;
  std::function<bool(std::string&)> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// --- criterion 1 -----------------------------------------------------------
bool talbot_arithmetic(std::string& detail) {
  const PhysicalContext ctx = make_context_amu(kRb87MassU, 780e-9);
  const double t_us = ctx.talbot_time * 1e6;
  detail = "T_T = " + fmt(t_us) + " us";
  const bool full = std::abs(t_us - 66.3) / 66.3 < 2e-3;
  const bool half = std::abs(0.5 * t_us - 33.15) / 33.15 < 2e-3;
  const bool three_half = std::abs(1.5 * t_us - 99.45) / 99.45 < 2e-3;
  return full && half && three_half;
}

// --- criterion 2 -----------------------------------------------------------
bool antiresonance_revival(std::string& detail) {
  WaveState state = init_wavepacket(kGrid, kWideSigma, 0.0);
  const double initial_energy = mean_energy_recoils(state);
  run_schedule(state, schedule_for_l(1, 2, 1.0));
  const MomentumDistribution md = momentum_distribution(state);
  const double returned = md.comb.probability(0);
  const double gain = md.mean_energy_recoils() - initial_energy;
  detail = "order-0 population " + fmt(returned) + ", energy gain " +
           fmt(gain) + " E_r";
  return returned >= 0.999 && gain < 1e-3;
}

// --- criterion 3 -----------------------------------------------------------
bool resonance_quadratic_growth(std::string& detail) {
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const double expected = 2.0 * n * n;
    const double oracle_energy =
        oracle::second_moment(oracle::ladder_amplitudes(n, 2, 0.0, 1.0));
    WaveState state = init_wavepacket(kGrid, kWideSigma, 0.0);
    run_schedule(state, schedule_for_l(2, n, 1.0));
    const double propagated = mean_energy_recoils(state);
    worst = std::max(worst, std::abs(oracle_energy - expected) / expected);
    worst = std::max(worst, std::abs(propagated - expected) / expected);
  }
  detail = "max relative deviation from 2 n^2 phi_d^2: " + fmt(worst);
  return worst < 0.01;
}

// --- criterion 4 -----------------------------------------------------------
bool oracle_propagator_equivalence(std::string& detail) {
  // A long box (4096 lattice periods, 64 points each) makes the packet's
  // quasimomentum spread ~1.4e-4, so averaging |c_j|^2 over the packet stays
  // below the per-order tolerance even where the ladder oscillates fastest
  // (l = 3, n = 4, phi_d = 2).
  const SpatialGrid grid = make_grid(1 << 18, 4096);
  const double sigma_w = 1800.0;

  struct Combo {
    int n, l;
    double beta, phi;
  };
  std::vector<Combo> combos;
  for (int n = 1; n <= 4; ++n)
    for (int l = 1; l <= 3; ++l)
      for (int b = 0; b < 10; ++b)
        for (double phi : {0.5, 1.0, 2.0})
          combos.push_back({n, l, 0.1 * b, phi});

  std::vector<double> prob_dev(combos.size(), 0.0);
  std::vector<double> energy_dev(combos.size(), 0.0);

  parallel_for_index(combos.size(), 0, [&](std::size_t i) {
    const Combo c = combos[i];
    WaveState state = init_wavepacket(grid, sigma_w, 2.0 * c.beta);
    run_schedule(state, schedule_for_l(c.l, c.n, c.phi));
    const MomentumDistribution md = momentum_distribution(state);

    const LadderDistribution ref =
        oracle::distribution_for_momentum(c.n, c.l, state.momentum0, c.phi);
    double worst = 0.0;
    for (int j = ref.j_min - 2; j <= ref.j_max() + 2; ++j)
      worst = std::max(worst,
                       std::abs(md.comb.probability(j) - ref.probability(j)));
    prob_dev[i] = worst;

    const double e_ref = ref.mean_energy_recoils();
    const double e_prop = md.mean_energy_recoils();
    // relative agreement, with a 5e-4 absolute floor covering the
    // antiresonances where the reference energy vanishes identically
    energy_dev[i] = std::abs(e_prop - e_ref) / (0.01 * e_ref + 5e-4);
  });

  double worst_prob = 0.0;
  double worst_energy = 0.0;
  for (std::size_t i = 0; i < combos.size(); ++i) {
    worst_prob = std::max(worst_prob, prob_dev[i]);
    worst_energy = std::max(worst_energy, energy_dev[i]);
  }
  detail = "360 combos; max per-order deviation " + fmt(worst_prob) +
           ", max energy deviation " + fmt(worst_energy) +
           "x of (1% + 5e-4 E_r) budget";
  return worst_prob < 1e-3 && worst_energy < 1.0;
}

// --- criterion 5 -----------------------------------------------------------
bool beta_periodicity_and_rate(std::string& detail) {
  double worst = 0.0;
  for (int l : {1, 2, 3}) {
    for (double beta : {0.0, 0.04, 0.17, 0.31, 0.46}) {
      const auto a = oracle::ladder_amplitudes(3, l, beta, 1.0);
      const auto b = oracle::ladder_amplitudes(3, l, beta + 1.0 / l, 1.0);
      for (int j = -15; j <= 15; ++j)
        worst = std::max(worst, std::abs(std::abs(a.amplitude(j)) -
                                         std::abs(b.amplitude(j))));
    }
  }

  // oscillation count of the two-kick energy-gain curve over p_i in [0, 2]
  auto count_gain_maxima = [](int l) {
    std::vector<double> p(201), gain(201);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = 2.0 * static_cast<double>(i) / (p.size() - 1);
      gain[i] = oracle::energy_for_momentum(2, l, p[i], 1.0) - p[i] * p[i];
    }
    return count_local_maxima(gain, 0.05);
  };
  const int maxima_l1 = count_gain_maxima(1);
  const int maxima_l3 = count_gain_maxima(3);

  detail = "max ||c_j(b+1/l)| - |c_j(b)|| = " + fmt(worst) + "; oscillations " +
           std::to_string(maxima_l1) + " (l=1) vs " + std::to_string(maxima_l3) +
           " (l=3)";
  return worst < 1e-10 && maxima_l1 == 1 && maxima_l3 == 3;
}

// --- criterion 6 -----------------------------------------------------------
bool four_kick_fine_structure(std::string& detail) {
  const PropagatorEngine engine(kGrid, schedule_for_l(1, 4, 1.0),
                                kFiveMicronSigma);
  std::vector<double> p(81);
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = 2.0 * static_cast<double>(i) / (p.size() - 1);
  const EnergyScan scan = scan_initial_momentum(engine, p, nullptr, 0);

  // locate interior extrema of the scanned curve
  double small_max_p = -1.0, small_max_e = 0.0;
  double min_p = -1.0, min_e = 1e9;
  double global_max_p = -1.0, global_max_e = -1.0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const bool is_max =
        scan.energy[i] > scan.energy[i - 1] && scan.energy[i] > scan.energy[i + 1];
    const bool is_min =
        scan.energy[i] < scan.energy[i - 1] && scan.energy[i] < scan.energy[i + 1];
    if (is_max && std::abs(p[i] - 0.25) <= 0.05 && scan.energy[i] > small_max_e) {
      small_max_p = p[i];
      small_max_e = scan.energy[i];
    }
    if (is_min && std::abs(p[i] - 0.5) <= 0.05 && scan.energy[i] < min_e) {
      min_p = p[i];
      min_e = scan.energy[i];
    }
    if (scan.energy[i] > global_max_e) {
      global_max_e = scan.energy[i];
      global_max_p = p[i];
    }
  }

  detail = "small max at p_i = " + fmt(small_max_p) + " (" + fmt(small_max_e) +
           " E_r), minimum at " + fmt(min_p) + " (" + fmt(min_e) +
           " E_r), dominant max at " + fmt(global_max_p) + " (" +
           fmt(global_max_e) + " E_r)";
  return small_max_p > 0.0 && min_p > 0.0 && min_e < 0.5 &&
         std::abs(global_max_p - 1.0) <= 0.05;
}

// --- criterion 7 -----------------------------------------------------------
bool ensemble_peak_morphology(std::string& detail) {
  const PropagatorEngine engine(kGrid, schedule_for_l(1, 4, 1.0),
                                kFiveMicronSigma);
  const SourceSpec spec{1.0, 0.18, 33, 3.0};
  const AveragedDistribution avg = average_incoherently(engine, spec);

  const OrderProfile split = extract_order_profile(avg, 1.0);
  const int maxima = count_local_maxima(split.masses, 0.01);

  double narrow_rms = 1e9;
  double narrow_p = 0.0;
  for (double target : {-7.0, -5.0, 5.0, 7.0}) {
    const OrderProfile high = extract_order_profile(avg, target);
    if (high.total_mass() < 1e-4) continue;
    if (high.rms_width() < narrow_rms) {
      narrow_rms = high.rms_width();
      narrow_p = target;
    }
  }

  detail = "order at p=1: " + std::to_string(maxima) +
           " local maxima; narrowest high order at p=" + fmt(narrow_p) +
           " with rms " + fmt(narrow_rms) + " recoils";
  return maxima >= 2 && narrow_rms < 0.18;
}

// --- criterion 8 -----------------------------------------------------------
bool estimator_behavior(std::string& detail) {
  // clean profile: closed-form resonance comb convolved with the source width
  const auto comb = oracle::distribution_for_momentum(2, 2, 0.0, 1.0);
  const std::size_t n = 4801;
  std::vector<double> axis(n), density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) axis[i] = -24.0 + 0.01 * i;
  for (int j = comb.j_min; j <= comb.j_max(); ++j) {
    const double mass = comb.probability(j);
    if (mass <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (axis[i] - comb.momentum_of(j)) / 0.18;
      density[i] +=
          mass * std::exp(-0.5 * d * d) / (0.18 * std::sqrt(2 * std::numbers::pi));
    }
  }

  const GaussianFitResult clean_fit = fit_orders(axis, density, 0.0, 6, 0.18);
  const double clean_var = direct_variance(axis, density);
  const double agreement = std::abs(clean_fit.energy - clean_var) / clean_var;

  auto spiked = density;
  spiked[4400] += 1e-3 / 0.01;  // mass 1e-3 at p = 20 recoils
  const GaussianFitResult spiked_fit = fit_orders(axis, spiked, 0.0, 6, 0.18);
  const double spiked_var = direct_variance(axis, spiked);

  const double var_shift = spiked_var - clean_var;
  const double fit_shift =
      std::abs(spiked_fit.energy - clean_fit.energy) / clean_fit.energy;

  detail = "clean fit/variance agree to " + fmt(agreement) +
           "; spike moves variance by " + fmt(var_shift) + " E_r and the fit by " +
           fmt(fit_shift);
  return agreement < 0.02 && std::abs(var_shift - 0.4) < 0.02 &&
         fit_shift < 0.005;
}

// --- criterion 9 -----------------------------------------------------------
bool conservation_suite(std::string& detail) {
  WaveState state = init_wavepacket(kGrid, kFiveMicronSigma, 0.3);
  run_schedule(state, schedule_for_l(1, 100, 1.0));
  const double drift = std::abs(state.norm() - 1.0);

  double worst_norm = 0.0;
  for (int n : {1, 3, 6}) {
    for (int l : {1, 2, 3}) {
      for (double beta : {0.0, 0.2, 0.5, 0.8}) {
        for (double phi : {0.5, 1.5, 3.0}) {
          const auto amps = oracle::ladder_amplitudes(n, l, beta, phi);
          worst_norm =
              std::max(worst_norm, std::abs(amps.total_probability() - 1.0));
        }
      }
    }
  }

  WaveState kicked = init_wavepacket(kGrid, kFiveMicronSigma, 0.6);
  run_schedule(kicked, schedule_for_l(2, 4, 1.0));
  const double off_comb =
      momentum_distribution(kicked, 0.5).comb.off_comb_mass;

  detail = "norm drift " + fmt(drift) + " over 100 periods; |sum|c|^2 - 1| <= " +
           fmt(worst_norm) + "; off-comb mass " + fmt(off_comb);
  return drift < 1e-9 && worst_norm < 1e-10 && off_comb < 1e-6;
}

// --- criterion 10 ----------------------------------------------------------
bool finite_pulse_convergence(std::string& detail) {
  const KickSchedule ideal = schedule_for_l(2, 2, 1.0);
  KickSchedule finite = ideal;
  finite.pulse_width_fraction = 1e-3;
  finite.substeps = 64;

  double worst = 0.0;
  for (double k_i : {0.0, 0.6}) {
    WaveState a = init_wavepacket(kGrid, kWideSigma, k_i);
    WaveState b = init_wavepacket(kGrid, kWideSigma, k_i);
    run_schedule(a, ideal);
    run_schedule(b, finite);
    const MomentumDistribution da = momentum_distribution(a);
    const MomentumDistribution db = momentum_distribution(b);
    for (int j = -10; j <= 10; ++j)
      worst = std::max(worst,
                       std::abs(da.comb.probability(j) - db.comb.probability(j)));
  }
  detail = "max per-order deviation from the delta-kick limit: " + fmt(worst);
  return worst < 1e-3;
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {1, "Talbot-time arithmetic (Rb-87 at 780 nm)", talbot_arithmetic},
      {2, "antiresonance revival (beta=0, l=1, n=2, phi_d=1)",
       antiresonance_revival},
      {3, "resonance quadratic energy growth (l=2, n=1..4)",
       resonance_quadratic_growth},
      {4, "oracle-propagator equivalence over the parameter grid",
       oracle_propagator_equivalence},
      {5, "quasimomentum periodicity and l-fold rate scaling",
       beta_periodicity_and_rate},
      {6, "four-kick fine structure versus initial momentum",
       four_kick_fine_structure},
      {7, "ensemble peak splitting and sub-source-width orders",
       ensemble_peak_morphology},
      {8, "fit/variance estimator agreement and noise robustness",
       estimator_behavior},
      {9, "conservation suite (norm, comb closure, quasimomentum)",
       conservation_suite},
      {10, "finite-pulse convergence to the ideal delta kick",
       finite_pulse_convergence},
  };

  int failures = 0;
  for (const auto& check : checks) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = check.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s  %2d  %-58s  [%5.1fs]  %s\n", ok ? "PASS" : "FAIL",
                check.id, check.title.c_str(), seconds, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", checks.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
