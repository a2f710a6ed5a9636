#include "qkr/units.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qkr {

PhysicalContext make_context(double atom_mass_kg, double wavelength_m) {
  if (!(atom_mass_kg > 0.0))
    throw std::invalid_argument("make_context: atom mass must be positive");
  if (!(wavelength_m > 0.0))
    throw std::invalid_argument("make_context: wavelength must be positive");

  PhysicalContext c;
  c.atom_mass = atom_mass_kg;
  c.wavelength = wavelength_m;
  c.k_laser = 2.0 * std::numbers::pi / wavelength_m;
  c.recoil_frequency = kHBar * c.k_laser * c.k_laser / (2.0 * atom_mass_kg);
  c.talbot_time = std::numbers::pi / (2.0 * c.recoil_frequency);
  c.recoil_momentum = kHBar * c.k_laser;
  c.recoil_energy = kHBar * c.recoil_frequency;
  return c;
}

PhysicalContext make_context_amu(double mass_u, double wavelength_m) {
  return make_context(mass_u * kAtomicMassUnit, wavelength_m);
}

DimensionlessSchedule to_dimensionless(double period_s, int n_kicks, double phi_d,
                                       double pulse_width_fraction,
                                       const PhysicalContext& ctx,
                                       double integer_tol) {
  if (!(period_s > 0.0))
    throw std::invalid_argument("to_dimensionless: period must be positive");

  DimensionlessSchedule d;
  d.period_talbot = period_s / ctx.talbot_time;
  d.l_real = 2.0 * d.period_talbot;
  d.l_nearest = static_cast<int>(std::lround(d.l_real));
  d.l_is_integer =
      d.l_nearest >= 1 && std::abs(d.l_real - d.l_nearest) <= integer_tol;
  d.n_kicks = n_kicks;
  d.phi_d = phi_d;
  d.pulse_width_fraction = pulse_width_fraction;
  return d;
}

}  // namespace qkr
