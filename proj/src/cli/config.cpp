#include "qkr/cli/config.hpp"

#include <cmath>
#include <stdexcept>

namespace qkr::cli {

PhysicalContext context_of(const RunConfig& cfg) {
  return make_context_amu(cfg.mass_u, cfg.wavelength_nm * 1e-9);
}

double period_talbot_of(const RunConfig& cfg, const PhysicalContext& ctx) {
  if (cfg.l && cfg.period_us)
    throw std::invalid_argument("give either --l or --period-us, not both");
  if (cfg.l) {
    if (*cfg.l < 1) throw std::invalid_argument("--l must be >= 1");
    return 0.5 * *cfg.l;
  }
  if (cfg.period_us) {
    if (!(*cfg.period_us > 0.0))
      throw std::invalid_argument("--period-us must be positive");
    return *cfg.period_us * 1e-6 / ctx.talbot_time;
  }
  return 0.5;  // default l = 1
}

KickSchedule schedule_of(const RunConfig& cfg, const PhysicalContext& ctx) {
  KickSchedule s;
  s.n_kicks = cfg.kicks;
  s.period_talbot = period_talbot_of(cfg, ctx);
  s.phi_d = cfg.phi_d;
  s.pulse_width_fraction = cfg.tau_frac;
  s.substeps = cfg.substeps;
  validate(s);
  return s;
}

SpatialGrid grid_of(const RunConfig& cfg) {
  return make_grid(cfg.grid_points, cfg.periods);
}

double sigma_w_units_of(const RunConfig& cfg, const PhysicalContext& ctx) {
  if (!(cfg.sigma_w_um > 0.0))
    throw std::invalid_argument("--sigma-w-um must be positive");
  return cfg.sigma_w_um * 1e-6 * ctx.k_laser;
}

int integer_l_of(const RunConfig& cfg, const PhysicalContext& ctx) {
  if (cfg.l) {
    if (*cfg.l < 1) throw std::invalid_argument("--l must be >= 1");
    return *cfg.l;
  }
  if (cfg.period_us) {
    const DimensionlessSchedule d = to_dimensionless(
        *cfg.period_us * 1e-6, cfg.kicks, cfg.phi_d, cfg.tau_frac, ctx);
    if (!d.l_is_integer)
      throw std::invalid_argument(
          "the closed-form engine applies only at half-integer multiples of "
          "the Talbot time (integer l = 2T/T_T); this period gives l = " +
          std::to_string(d.l_real));
    return d.l_nearest;
  }
  return 1;
}

void validate_common(const RunConfig& cfg) {
  if (cfg.engine != "propagator" && cfg.engine != "oracle")
    throw std::invalid_argument("--engine must be propagator or oracle");
  if (cfg.format != "csv" && cfg.format != "json")
    throw std::invalid_argument("--format must be csv or json");
  if (cfg.sweep != "pi" && cfg.sweep != "kicks")
    throw std::invalid_argument("--sweep must be pi or kicks");
  if (cfg.axis != "rows" && cfg.axis != "cols")
    throw std::invalid_argument("--axis must be rows or cols");
  if (cfg.kicks < 0) throw std::invalid_argument("--kicks must be >= 0");
  if (cfg.sigma < 0.0) throw std::invalid_argument("--sigma must be >= 0");
  if (cfg.pmax < 0.0) throw std::invalid_argument("--pmax must be >= 0");
  if (cfg.steps < 1) throw std::invalid_argument("--steps must be >= 1");
  if (!(cfg.window > 0.0) || cfg.window > 1.0)
    throw std::invalid_argument("--window must be in (0, 1] recoils");
}

}  // namespace qkr::cli
