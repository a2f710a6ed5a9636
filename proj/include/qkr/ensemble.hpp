#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qkr/ladder.hpp"
#include "qkr/observables.hpp"
#include "qkr/propagator.hpp"

namespace qkr {

// Finite momentum width of the atom source: deterministic equispaced nodes
// over mean +- span*sigma with Gaussian weights, renormalized to sum 1.
struct SourceSpec {
  double mean_momentum = 0.0;  // recoils
  double sigma = 0.18;         // rms width, recoils
  int n_samples = 33;
  double span = 3.0;           // half-width in units of sigma
};

struct SourceNode {
  double momentum;  // absolute initial momentum, recoils
  double weight;
};

std::vector<SourceNode> sample_source(const SourceSpec& spec);

// Single-momentum result produced by an engine.
struct NodeResult {
  double momentum_actual = 0.0;  // possibly grid-rounded
  LadderDistribution comb;
  std::vector<double> fine;  // probability per axis bin
  long fine_offset = 0;      // global bin index of fine[0]; p = index * dp
  double energy = 0.0;       // recoil units
};

// A way of turning one initial momentum into a final momentum distribution:
// either the grid propagator or the closed-form ladder amplitudes.
class DistributionEngine {
 public:
  virtual ~DistributionEngine() = default;
  virtual NodeResult run(double p_i_recoils) const = 0;
  virtual double axis_spacing() const = 0;  // recoils per fine bin
  virtual std::string name() const = 0;
};

class PropagatorEngine : public DistributionEngine {
 public:
  PropagatorEngine(SpatialGrid grid, KickSchedule schedule, double sigma_w,
                   double comb_window = 1.0);
  NodeResult run(double p_i_recoils) const override;
  double axis_spacing() const override;
  std::string name() const override { return "propagator"; }

 private:
  SpatialGrid grid_;
  KickSchedule schedule_;
  double sigma_w_;
  double comb_window_;
};

class OracleEngine : public DistributionEngine {
 public:
  // bin_dp sets the fine-axis bin width the comb masses are deposited on.
  OracleEngine(int l, int n_kicks, double phi_d, double bin_dp = 2.0 / 256.0);
  NodeResult run(double p_i_recoils) const override;
  double axis_spacing() const override { return bin_dp_; }
  std::string name() const override { return "oracle"; }

 private:
  int l_;
  int n_kicks_;
  double phi_d_;
  double bin_dp_;
};

// Weighted incoherent sum of single-momentum distributions plus the per-node
// matrix for map outputs. Probabilities are summed, never amplitudes.
struct AveragedDistribution {
  std::vector<double> axis;  // fine bin centers, recoils
  double bin_width = 0.0;
  std::vector<double> density;  // probability per recoil
  std::vector<double> node_momenta;
  std::vector<double> node_weights;
  std::vector<std::vector<double>> per_sample;  // node x bin, probabilities
  std::vector<LadderDistribution> per_node_comb;
  double energy = 0.0;  // weighted mean of node energies, recoil units
};

AveragedDistribution average_incoherently(const DistributionEngine& engine,
                                          const SourceSpec& spec,
                                          unsigned threads = 0);

// Weighted mass of the comb order nearest target_momentum, node by node:
// the horizontal-profile view of a map. centers are the per-node positions
// of that order; masses are weight * order probability.
struct OrderProfile {
  std::vector<double> centers;
  std::vector<double> masses;

  double total_mass() const;
  double mean_center() const;
  double rms_width() const;  // about the weighted mean
};

OrderProfile extract_order_profile(const AveragedDistribution& avg,
                                   double target_momentum);

// Mean energy for each initial momentum in p_values (strictly increasing).
// With a source spec the energy is the incoherent ensemble average at that
// mean momentum; without one it is the single-momentum result. The observer,
// when set, receives each point's distribution in input order.
EnergyScan scan_initial_momentum(
    const DistributionEngine& engine, const std::vector<double>& p_values,
    const SourceSpec* source = nullptr, unsigned threads = 0,
    const std::function<void(std::size_t, const AveragedDistribution&)>&
        observer = {});

}  // namespace qkr
