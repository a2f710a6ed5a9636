#include "qkr/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkr/oracle.hpp"
#include "qkr/parallel.hpp"

namespace qkr {

namespace {

constexpr double kFineTail = 1e-18;

// Assembles the weighted incoherent sum on the union of the node bin ranges.
AveragedDistribution assemble(std::vector<NodeResult> results,
                              const std::vector<double>& weights, double dp) {
  long g_lo = 0;
  long g_hi = -1;
  for (const auto& r : results) {
    if (r.fine.empty()) continue;
    const long lo = r.fine_offset;
    const long hi = r.fine_offset + static_cast<long>(r.fine.size()) - 1;
    if (g_hi < g_lo) {
      g_lo = lo;
      g_hi = hi;
    } else {
      g_lo = std::min(g_lo, lo);
      g_hi = std::max(g_hi, hi);
    }
  }
  if (g_hi < g_lo) throw std::invalid_argument("assemble: no distribution data");

  const std::size_t n_bins = static_cast<std::size_t>(g_hi - g_lo + 1);
  AveragedDistribution avg;
  avg.bin_width = dp;
  avg.axis.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i)
    avg.axis[i] = static_cast<double>(g_lo + static_cast<long>(i)) * dp;

  avg.density.assign(n_bins, 0.0);
  avg.per_sample.reserve(results.size());
  avg.per_node_comb.reserve(results.size());
  avg.node_momenta.reserve(results.size());
  avg.node_weights = weights;

  for (std::size_t k = 0; k < results.size(); ++k) {
    auto& r = results[k];
    std::vector<double> row(n_bins, 0.0);
    for (std::size_t i = 0; i < r.fine.size(); ++i)
      row[static_cast<std::size_t>(r.fine_offset - g_lo) + i] = r.fine[i];
    for (std::size_t i = 0; i < n_bins; ++i)
      avg.density[i] += weights[k] * row[i] / dp;
    avg.energy += weights[k] * r.energy;
    avg.per_sample.push_back(std::move(row));
    avg.per_node_comb.push_back(std::move(r.comb));
    avg.node_momenta.push_back(r.momentum_actual);
  }
  return avg;
}

std::vector<NodeResult> run_nodes(const DistributionEngine& engine,
                                  const std::vector<SourceNode>& nodes,
                                  unsigned threads) {
  std::vector<NodeResult> results(nodes.size());
  parallel_for_index(nodes.size(), threads, [&](std::size_t k) {
    results[k] = engine.run(nodes[k].momentum);
  });
  return results;
}

}  // namespace

std::vector<SourceNode> sample_source(const SourceSpec& spec) {
  if (!(spec.sigma > 0.0))
    throw std::invalid_argument("sample_source: sigma must be positive");
  if (spec.n_samples < 3)
    throw std::invalid_argument("sample_source: need at least 3 samples");
  if (!(spec.span > 0.0))
    throw std::invalid_argument("sample_source: span must be positive");

  const double half = spec.span * spec.sigma;
  const double step = 2.0 * half / (spec.n_samples - 1);

  std::vector<SourceNode> nodes(static_cast<std::size_t>(spec.n_samples));
  double total = 0.0;
  for (int k = 0; k < spec.n_samples; ++k) {
    const double offset = -half + step * k;
    const double w = std::exp(-offset * offset / (2.0 * spec.sigma * spec.sigma));
    nodes[static_cast<std::size_t>(k)] = {spec.mean_momentum + offset, w};
    total += w;
  }
  for (auto& n : nodes) n.weight /= total;
  return nodes;
}

PropagatorEngine::PropagatorEngine(SpatialGrid grid, KickSchedule schedule,
                                   double sigma_w, double comb_window)
    : grid_(grid), schedule_(schedule), sigma_w_(sigma_w),
      comb_window_(comb_window) {
  validate(schedule_);
}

double PropagatorEngine::axis_spacing() const { return grid_.dp(); }

NodeResult PropagatorEngine::run(double p_i_recoils) const {
  WaveState state = init_wavepacket(grid_, sigma_w_, p_i_recoils);
  run_schedule(state, schedule_);
  MomentumDistribution md = momentum_distribution(state, comb_window_);

  // Clip the fine axis to the populated range (plus a small margin).
  std::size_t lo = 0;
  std::size_t hi = md.probability.size();
  while (lo + 1 < hi && md.probability[lo] <= kFineTail) ++lo;
  while (hi > lo + 1 && md.probability[hi - 1] <= kFineTail) --hi;
  lo = (lo >= 2) ? lo - 2 : 0;
  hi = std::min(hi + 2, md.probability.size());

  NodeResult r;
  r.momentum_actual = state.momentum0;
  r.comb = std::move(md.comb);
  r.fine.assign(md.probability.begin() + static_cast<std::ptrdiff_t>(lo),
                md.probability.begin() + static_cast<std::ptrdiff_t>(hi));
  r.fine_offset = static_cast<long>(lo) - grid_.n_points / 2;
  r.energy = md.mean_energy_recoils();
  return r;
}

OracleEngine::OracleEngine(int l, int n_kicks, double phi_d, double bin_dp)
    : l_(l), n_kicks_(n_kicks), phi_d_(phi_d), bin_dp_(bin_dp) {
  if (l_ < 1) throw std::invalid_argument("OracleEngine: l must be >= 1");
  if (n_kicks_ < 0) throw std::invalid_argument("OracleEngine: n_kicks must be >= 0");
  if (!(bin_dp_ > 0.0)) throw std::invalid_argument("OracleEngine: bin_dp must be positive");
}

NodeResult OracleEngine::run(double p_i_recoils) const {
  NodeResult r;
  r.momentum_actual = p_i_recoils;
  r.comb = oracle::distribution_for_momentum(n_kicks_, l_, p_i_recoils, phi_d_);
  r.energy = r.comb.mean_energy_recoils();

  // Deposit comb masses onto the fine axis; orders are far wider apart than
  // any sensible bin, so deposits never collide.
  long g_lo = 0;
  long g_hi = -1;
  for (int j = r.comb.j_min; j <= r.comb.j_max(); ++j) {
    const long g = std::lround(r.comb.momentum_of(j) / bin_dp_);
    if (g_hi < g_lo) {
      g_lo = g_hi = g;
    } else {
      g_lo = std::min(g_lo, g);
      g_hi = std::max(g_hi, g);
    }
  }
  r.fine.assign(static_cast<std::size_t>(g_hi - g_lo + 1), 0.0);
  for (int j = r.comb.j_min; j <= r.comb.j_max(); ++j) {
    const long g = std::lround(r.comb.momentum_of(j) / bin_dp_);
    r.fine[static_cast<std::size_t>(g - g_lo)] += r.comb.probability(j);
  }
  r.fine_offset = g_lo;
  return r;
}

AveragedDistribution average_incoherently(const DistributionEngine& engine,
                                          const SourceSpec& spec,
                                          unsigned threads) {
  const std::vector<SourceNode> nodes = sample_source(spec);
  std::vector<double> weights(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) weights[k] = nodes[k].weight;
  return assemble(run_nodes(engine, nodes, threads), weights,
                  engine.axis_spacing());
}

double OrderProfile::total_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

double OrderProfile::mean_center() const {
  const double total = total_mass();
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) s += masses[i] * centers[i];
  return s / total;
}

double OrderProfile::rms_width() const {
  const double total = total_mass();
  if (total <= 0.0) return 0.0;
  const double mu = mean_center();
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double d = centers[i] - mu;
    s += masses[i] * d * d;
  }
  return std::sqrt(s / total);
}

OrderProfile extract_order_profile(const AveragedDistribution& avg,
                                   double target_momentum) {
  OrderProfile profile;
  profile.centers.reserve(avg.per_node_comb.size());
  profile.masses.reserve(avg.per_node_comb.size());
  for (std::size_t k = 0; k < avg.per_node_comb.size(); ++k) {
    const LadderDistribution& comb = avg.per_node_comb[k];
    int j = static_cast<int>(
        std::lround((target_momentum - 2.0 * comb.beta) / 2.0));
    j = std::clamp(j, comb.j_min, comb.j_max());
    profile.centers.push_back(comb.momentum_of(j));
    profile.masses.push_back(avg.node_weights[k] * comb.probability(j));
  }
  return profile;
}

EnergyScan scan_initial_momentum(
    const DistributionEngine& engine, const std::vector<double>& p_values,
    const SourceSpec* source, unsigned threads,
    const std::function<void(std::size_t, const AveragedDistribution&)>&
        observer) {
  if (p_values.empty())
    throw std::invalid_argument("scan_initial_momentum: empty momentum grid");
  for (std::size_t i = 1; i < p_values.size(); ++i) {
    if (!(p_values[i] > p_values[i - 1]))
      throw std::invalid_argument(
          "scan_initial_momentum: momentum grid must be strictly increasing");
  }

  EnergyScan scan;
  scan.parameter = "p_i_recoils";
  scan.values = p_values;
  scan.energy.resize(p_values.size());
  scan.uncertainty.assign(p_values.size(), 0.0);

  if (source == nullptr) {
    std::vector<NodeResult> results(p_values.size());
    parallel_for_index(p_values.size(), threads, [&](std::size_t i) {
      results[i] = engine.run(p_values[i]);
    });
    for (std::size_t i = 0; i < p_values.size(); ++i) {
      scan.energy[i] = results[i].energy;
      if (observer) {
        observer(i, assemble({results[i]}, {1.0}, engine.axis_spacing()));
      }
    }
  } else {
    for (std::size_t i = 0; i < p_values.size(); ++i) {
      SourceSpec point = *source;
      point.mean_momentum = p_values[i];
      AveragedDistribution avg = average_incoherently(engine, point, threads);
      scan.energy[i] = avg.energy;
      if (observer) observer(i, avg);
    }
  }
  return scan;
}

}  // namespace qkr
