#pragma once

namespace qkr {

inline constexpr double kHBar = 1.054571817e-34;             // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kRb87MassU = 86.909;                  // u
inline constexpr double kDefaultWavelengthM = 780e-9;         // m

// Atom/laser constants and the derived recoil scales. Everything downstream
// computes in dimensionless units; SI appears only at the I/O boundary.
struct PhysicalContext {
  double atom_mass = 0.0;         // kg
  double wavelength = 0.0;        // m
  double k_laser = 0.0;           // 1/m, 2 pi / lambda
  double recoil_frequency = 0.0;  // rad/s, hbar k_L^2 / (2 m)
  double talbot_time = 0.0;       // s, pi / (2 omega_R)
  double recoil_momentum = 0.0;   // kg m/s, hbar k_L
  double recoil_energy = 0.0;     // J, hbar omega_R
};

PhysicalContext make_context(double atom_mass_kg, double wavelength_m);
PhysicalContext make_context_amu(double mass_u, double wavelength_m);

// Conversion factors between SI and the working units: momenta in photon
// recoils hbar k_L, energies in E_r = hbar omega_R, times in Talbot times,
// positions in 1/k_L. Mean kinetic energy in these units is <(p/hbar k_L)^2>.
struct DimensionlessUnits {
  double momentum_unit;  // kg m/s per recoil
  double energy_unit;    // J per recoil energy
  double time_unit;      // s per Talbot time
  double position_unit;  // m per 1/k_L

  explicit DimensionlessUnits(const PhysicalContext& c)
      : momentum_unit(c.recoil_momentum),
        energy_unit(c.recoil_energy),
        time_unit(c.talbot_time),
        position_unit(1.0 / c.k_laser) {}

  double momentum_to_recoils(double p_si) const { return p_si / momentum_unit; }
  double momentum_to_si(double recoils) const { return recoils * momentum_unit; }
  double energy_to_recoils(double e_si) const { return e_si / energy_unit; }
  double energy_to_si(double recoils) const { return recoils * energy_unit; }
  double time_to_talbot(double t_si) const { return t_si / time_unit; }
  double time_to_si(double talbot) const { return talbot * time_unit; }
  double position_to_units(double x_si) const { return x_si / position_unit; }
  double position_to_si(double units) const { return units * position_unit; }
};

// Kick period reduced to the Talbot scale: l = 2 T / T_T. The closed-form
// ladder amplitudes apply only when l is an integer; `l_is_integer` reports
// whether l_real is within `tol` of one.
struct DimensionlessSchedule {
  double l_real = 0.0;
  double period_talbot = 0.0;  // T / T_T
  bool l_is_integer = false;
  int l_nearest = 0;
  int n_kicks = 0;
  double phi_d = 0.0;
  double pulse_width_fraction = 0.0;
};

DimensionlessSchedule to_dimensionless(double period_s, int n_kicks, double phi_d,
                                       double pulse_width_fraction,
                                       const PhysicalContext& ctx,
                                       double integer_tol = 1e-3);

}  // namespace qkr
