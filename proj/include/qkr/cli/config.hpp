#pragma once

#include <optional>
#include <string>

#include "qkr/propagator.hpp"
#include "qkr/units.hpp"

namespace qkr::cli {

// Resolved command configuration. Everything is deterministic (no RNG);
// re-running an identical config reproduces outputs byte for byte.
struct RunConfig {
  // physical context
  double mass_u = kRb87MassU;
  double wavelength_nm = 780.0;

  // kick schedule: period given either as integer l (T = l T_T/2) or in us
  std::optional<int> l;
  std::optional<double> period_us;
  int kicks = 2;
  double phi_d = 1.0;
  double tau_frac = 0.0;
  int substeps = 32;

  // initial state and source
  double p_i = 0.0;        // mean initial momentum, recoils
  double sigma = 0.0;      // source rms width, recoils; 0 = single momentum
  int nodes = 33;
  double span = 3.0;
  double sigma_w_um = 5.0;  // packet position rms

  // grid and comb binning
  int grid_points = 65536;
  int periods = 256;
  double window = 1.0;

  // scan sweep
  std::string sweep = "pi";  // pi | kicks
  double start = 0.0;
  double stop = 2.0;
  int steps = 17;

  // engine and execution
  std::string engine = "propagator";  // propagator | oracle
  unsigned threads = 0;

  // outputs
  std::string out;
  std::string comb_out;     // simulate: comb distribution
  std::string profile_out;  // map: averaged 1D profile
  std::string dist_dir;     // scan: per-point distribution dumps
  std::string format = "csv";  // csv | json
  double pmax = 0.0;           // clip map/profile axis to |p| <= pmax (0 = auto)

  // fit / reduce inputs
  std::string input;
  double beta = 0.0;
  int max_order = 8;
  double width_seed = 0.0;   // 0 = auto (sigma when set, else 0.1)
  std::string axis = "rows";  // reduce: sum over rows | cols

  // resolved config text, embedded in output headers (set by the front end)
  std::string resolved;
};

PhysicalContext context_of(const RunConfig& cfg);

// Kick period in Talbot times from --l or --period-us (default l = 1).
double period_talbot_of(const RunConfig& cfg, const PhysicalContext& ctx);

KickSchedule schedule_of(const RunConfig& cfg, const PhysicalContext& ctx);

SpatialGrid grid_of(const RunConfig& cfg);

// Packet rms width in units of 1/k_L.
double sigma_w_units_of(const RunConfig& cfg, const PhysicalContext& ctx);

// Integer l for the closed-form engine; throws when the configured period is
// not a half-integer multiple of the Talbot time.
int integer_l_of(const RunConfig& cfg, const PhysicalContext& ctx);

// Cross-field validation shared by every command.
void validate_common(const RunConfig& cfg);

}  // namespace qkr::cli
