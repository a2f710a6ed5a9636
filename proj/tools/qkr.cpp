// qkr: atom-optics kicked-rotor simulator and analysis tool.
//
// Subcommands: simulate | oracle | scan | map | fit | reduce.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "qkr/cli/commands.hpp"
#include "qkr/cli/config.hpp"

namespace {

using qkr::cli::RunConfig;

void add_context_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--mass-u", cfg.mass_u, "atom mass in atomic mass units")
      ->capture_default_str();
  sub->add_option("--wavelength-nm", cfg.wavelength_nm,
                  "kick laser wavelength in nm")
      ->capture_default_str();
}

void add_schedule_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--l", cfg.l,
                  "kick period as integer l: T = l * T_Talbot / 2");
  sub->add_option("--period-us", cfg.period_us, "kick period in microseconds");
  sub->add_option("--kicks", cfg.kicks, "number of kicks")
      ->capture_default_str();
  sub->add_option("--phid", cfg.phi_d, "kick strength (pulse area)")
      ->capture_default_str();
  sub->add_option("--tau-frac", cfg.tau_frac,
                  "pulse width as a fraction of the period (0 = delta kick)")
      ->capture_default_str();
  sub->add_option("--substeps", cfg.substeps,
                  "split-step substeps per finite pulse")
      ->capture_default_str();
}

void add_state_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--pi", cfg.p_i, "initial momentum in recoils (mean)")
      ->capture_default_str();
  sub->add_option("--sigma-w-um", cfg.sigma_w_um,
                  "packet position rms width in micrometres")
      ->capture_default_str();
}

void add_source_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--sigma", cfg.sigma,
                  "source momentum rms width in recoils (0 = single momentum)")
      ->capture_default_str();
  sub->add_option("--nodes", cfg.nodes, "source quadrature nodes")
      ->capture_default_str();
  sub->add_option("--span", cfg.span, "sampled half-width in units of sigma")
      ->capture_default_str();
}

void add_grid_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--grid-points", cfg.grid_points, "position grid points")
      ->capture_default_str();
  sub->add_option("--periods", cfg.periods, "lattice periods in the box")
      ->capture_default_str();
  sub->add_option("--window", cfg.window,
                  "comb binning half-width in recoils")
      ->capture_default_str();
}

void add_engine_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--engine", cfg.engine, "propagator | oracle")
      ->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)")
      ->capture_default_str();
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--out", cfg.out, "output file path");
  sub->add_option("--format", cfg.format, "csv | json")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atom-optics delta-kicked-rotor simulator"};
  app.require_subcommand(1);
  // --config lives on the top-level app; keys sit in a [subcommand] section.
  // fallthrough lets `qkr scan --config file` reach it, and unrecognized
  // config keys are hard errors so recipe typos cannot pass silently.
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "",
                 "options file: [subcommand] section with key=value lines");
  RunConfig cfg;

  auto* simulate = app.add_subcommand(
      "simulate", "propagate one wavepacket through a kick sequence");
  add_context_options(simulate, cfg);
  add_schedule_options(simulate, cfg);
  add_state_options(simulate, cfg);
  add_grid_options(simulate, cfg);
  add_engine_options(simulate, cfg);
  add_output_options(simulate, cfg);
  simulate->add_option("--comb-out", cfg.comb_out,
                       "comb distribution output path");

  auto* oracle = app.add_subcommand(
      "oracle", "closed-form ladder amplitudes at integer l");
  add_context_options(oracle, cfg);
  add_schedule_options(oracle, cfg);
  add_state_options(oracle, cfg);
  add_output_options(oracle, cfg);

  auto* scan = app.add_subcommand(
      "scan", "mean energy versus initial momentum or kick count");
  add_context_options(scan, cfg);
  add_schedule_options(scan, cfg);
  add_state_options(scan, cfg);
  add_source_options(scan, cfg);
  add_grid_options(scan, cfg);
  add_engine_options(scan, cfg);
  add_output_options(scan, cfg);
  scan->add_option("--sweep", cfg.sweep, "pi | kicks")->capture_default_str();
  scan->add_option("--start", cfg.start, "sweep start")->capture_default_str();
  scan->add_option("--stop", cfg.stop, "sweep stop")->capture_default_str();
  scan->add_option("--steps", cfg.steps, "sweep points")->capture_default_str();
  scan->add_option("--dist-dir", cfg.dist_dir,
                   "directory for per-point distribution dumps");

  auto* map = app.add_subcommand(
      "map", "initial-vs-final momentum map plus the averaged profile");
  add_context_options(map, cfg);
  add_schedule_options(map, cfg);
  add_state_options(map, cfg);
  add_source_options(map, cfg);
  add_grid_options(map, cfg);
  add_engine_options(map, cfg);
  add_output_options(map, cfg);
  map->add_option("--profile-out", cfg.profile_out,
                  "averaged 1D profile output path");
  map->add_option("--pmax", cfg.pmax,
                  "clip the final-momentum axis to |p| <= pmax (0 = auto)")
      ->capture_default_str();

  auto* fit = app.add_subcommand(
      "fit", "multi-Gaussian diffraction-order fit of a momentum profile");
  fit->add_option("--input", cfg.input, "profile CSV (momentum, density)")
      ->required();
  fit->add_option("--beta", cfg.beta, "expected quasimomentum in [0,1)")
      ->capture_default_str();
  fit->add_option("--max-order", cfg.max_order, "largest |order| to fit")
      ->capture_default_str();
  fit->add_option("--width-seed", cfg.width_seed,
                  "seed Gaussian width in recoils (0 = auto)")
      ->capture_default_str();
  fit->add_option("--sigma", cfg.sigma, "source width used as width seed")
      ->capture_default_str();
  add_output_options(fit, cfg);

  auto* reduce = app.add_subcommand(
      "reduce", "collapse a 2D image matrix to a 1D profile");
  reduce->add_option("--input", cfg.input, "matrix file (CSV or whitespace)")
      ->required();
  reduce->add_option("--axis", cfg.axis, "sum over rows | cols")
      ->capture_default_str();
  add_output_options(reduce, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  // header comments re-runnable as a config file for this subcommand
  cfg.resolved = "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
  return qkr::cli::dispatch(sub->get_name(), cfg);
}
