#include "qkr/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qkr/ensemble.hpp"
#include "qkr/errors.hpp"
#include "qkr/io.hpp"
#include "qkr/oracle.hpp"
#include "qkr/observables.hpp"

namespace qkr::cli {

namespace {

using nlohmann::json;

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string default_sibling(const std::string& out, const std::string& tag) {
  std::filesystem::path p(out);
  const std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + tag + (ext.empty() ? ".csv" : ext);
}

// '#' metadata header shared by every output: command plus the resolved
// config, enough to re-run the job.
std::vector<std::string> base_comments(const std::string& command,
                                       const RunConfig& cfg) {
  std::vector<std::string> comments;
  comments.push_back("qkr " + command);
  std::istringstream lines(cfg.resolved);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) comments.push_back("config " + line);
  }
  return comments;
}

void write_json_file(const std::string& path, const json& doc) {
  ensure_parent_dir(path);
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

json comb_to_json(const LadderDistribution& comb) {
  json orders = json::array();
  for (int j = comb.j_min; j <= comb.j_max(); ++j) {
    orders.push_back({{"j", j},
                      {"momentum_recoils", comb.momentum_of(j)},
                      {"probability", comb.probability(j)}});
  }
  return {{"beta", comb.beta},
          {"off_comb_mass", comb.off_comb_mass},
          {"orders", orders}};
}

std::unique_ptr<DistributionEngine> make_engine(const RunConfig& cfg,
                                                const PhysicalContext& ctx,
                                                int kicks) {
  if (cfg.engine == "oracle") {
    return std::make_unique<OracleEngine>(integer_l_of(cfg, ctx), kicks,
                                          cfg.phi_d, grid_of(cfg).dp());
  }
  KickSchedule schedule = schedule_of(cfg, ctx);
  schedule.n_kicks = kicks;
  return std::make_unique<PropagatorEngine>(grid_of(cfg), schedule,
                                            sigma_w_units_of(cfg, ctx),
                                            cfg.window);
}

void write_profile_csv(const std::string& path,
                       std::vector<std::string> comments,
                       const std::vector<double>& momentum,
                       const std::vector<double>& density) {
  ensure_parent_dir(path);
  std::vector<std::vector<double>> rows;
  rows.reserve(momentum.size());
  for (std::size_t i = 0; i < momentum.size(); ++i)
    rows.push_back({momentum[i], density[i]});
  io::write_table(path, comments, {"momentum_recoils", "probability_density"},
                  rows);
}

// Column range of the averaged distribution restricted to |p| <= pmax.
std::pair<std::size_t, std::size_t> axis_range(const AveragedDistribution& avg,
                                               double pmax) {
  if (pmax <= 0.0) return {0, avg.axis.size()};
  std::size_t lo = 0;
  std::size_t hi = avg.axis.size();
  while (lo < hi && avg.axis[lo] < -pmax) ++lo;
  while (hi > lo && avg.axis[hi - 1] > pmax) --hi;
  if (lo >= hi) throw std::invalid_argument("--pmax leaves no axis bins");
  return {lo, hi};
}

void dump_point_distribution(const RunConfig& cfg, const std::string& command,
                             std::size_t index, double p_value,
                             const AveragedDistribution& avg) {
  std::ostringstream name;
  name << "point_" << std::setw(3) << std::setfill('0') << index << ".csv";
  const std::filesystem::path path =
      std::filesystem::path(cfg.dist_dir) / name.str();
  auto comments = base_comments(command, cfg);
  comments.push_back("p_i_recoils = " + io::format_double(p_value));
  comments.push_back("energy_recoils = " + io::format_double(avg.energy));
  std::filesystem::create_directories(cfg.dist_dir);
  write_profile_csv(path.string(), comments, avg.axis, avg.density);
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  validate_common(cfg);
  const PhysicalContext ctx = context_of(cfg);
  const SpatialGrid grid = grid_of(cfg);
  const KickSchedule schedule = schedule_of(cfg, ctx);

  WaveState state = init_wavepacket(grid, sigma_w_units_of(cfg, ctx), cfg.p_i);
  const double beta_actual = state.beta;
  const double momentum_actual = state.momentum0;
  run_schedule(state, schedule);
  const double norm_drift = std::abs(state.norm() - 1.0);
  const MomentumDistribution md = momentum_distribution(state, cfg.window);

  // clip the fine output to the populated range
  std::size_t lo = 0;
  std::size_t hi = md.probability.size();
  while (lo + 1 < hi && md.probability[lo] <= 1e-18) ++lo;
  while (hi > lo + 1 && md.probability[hi - 1] <= 1e-18) --hi;
  lo = (lo >= 2) ? lo - 2 : 0;
  hi = std::min(hi + 2, md.probability.size());

  std::vector<double> momentum, density;
  momentum.reserve(hi - lo);
  density.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    momentum.push_back(md.momentum(i));
    density.push_back(md.probability[i] / md.dp);
  }

  auto comments = base_comments("simulate", cfg);
  comments.push_back("beta_actual = " + io::format_double(beta_actual));
  comments.push_back("momentum_actual_recoils = " +
                     io::format_double(momentum_actual));
  comments.push_back("norm_drift = " + io::format_double(norm_drift));
  comments.push_back("energy_recoils = " +
                     io::format_double(md.mean_energy_recoils()));
  comments.push_back("off_comb_mass = " +
                     io::format_double(md.comb.off_comb_mass));

  const std::string out = cfg.out.empty() ? "simulate.csv" : cfg.out;
  if (cfg.format == "json") {
    json doc;
    doc["command"] = "simulate";
    doc["config"] = cfg.resolved;
    doc["beta_actual"] = beta_actual;
    doc["momentum_actual_recoils"] = momentum_actual;
    doc["norm_drift"] = norm_drift;
    doc["energy_recoils"] = md.mean_energy_recoils();
    doc["fine"] = {{"momentum_recoils", momentum},
                   {"probability_density", density}};
    doc["comb"] = comb_to_json(md.comb);
    write_json_file(out, doc);
    return;
  }

  write_profile_csv(out, comments, momentum, density);

  const std::string comb_out =
      cfg.comb_out.empty() ? default_sibling(out, "comb") : cfg.comb_out;
  std::vector<std::vector<double>> rows;
  for (int j = md.comb.j_min; j <= md.comb.j_max(); ++j) {
    rows.push_back({static_cast<double>(j), md.comb.momentum_of(j),
                    md.comb.probability(j)});
  }
  ensure_parent_dir(comb_out);
  io::write_table(comb_out, comments,
                  {"order_j", "momentum_recoils", "probability"}, rows);
}

void cmd_oracle(const RunConfig& cfg) {
  validate_common(cfg);
  const PhysicalContext ctx = context_of(cfg);
  const int l = integer_l_of(cfg, ctx);

  const double half_momentum = 0.5 * cfg.p_i;
  const double beta = half_momentum - std::floor(half_momentum);
  const int j0 = static_cast<int>(std::llround(half_momentum - beta));

  auto comments = base_comments("oracle", cfg);
  std::vector<std::vector<double>> rows;
  double energy = 0.0;

  if (cfg.kicks == 0) {
    energy = cfg.p_i * cfg.p_i;
    rows.push_back({static_cast<double>(j0), 2.0 * j0 + 2.0 * beta, 1.0, 1.0,
                    0.0, 0.0});
  } else {
    const oracle::LadderAmplitudes amps =
        oracle::ladder_amplitudes(cfg.kicks, l, beta, cfg.phi_d);
    LadderDistribution dist = oracle::to_distribution(amps);
    dist.j_min += j0;
    energy = dist.mean_energy_recoils();
    comments.push_back(
        "upsilon = " + io::format_double(oracle::upsilon(beta, l)));
    comments.push_back("kick_argument = " +
                       io::format_double(oracle::kick_argument(
                           cfg.kicks, oracle::upsilon(beta, l), cfg.phi_d)));
    for (int j = dist.j_min; j <= dist.j_max(); ++j) {
      const auto c = amps.amplitude(j - j0);
      rows.push_back({static_cast<double>(j), dist.momentum_of(j),
                      dist.probability(j), c.real(), c.imag(), std::arg(c)});
    }
  }
  comments.push_back("beta = " + io::format_double(beta));
  comments.push_back("l = " + std::to_string(l));
  comments.push_back("energy_recoils = " + io::format_double(energy));

  const std::string out = cfg.out.empty() ? "oracle.csv" : cfg.out;
  if (cfg.format == "json") {
    json orders = json::array();
    for (const auto& r : rows) {
      orders.push_back({{"j", static_cast<int>(r[0])},
                        {"momentum_recoils", r[1]},
                        {"probability", r[2]},
                        {"re", r[3]},
                        {"im", r[4]},
                        {"phase", r[5]}});
    }
    json doc;
    doc["command"] = "oracle";
    doc["config"] = cfg.resolved;
    doc["beta"] = beta;
    doc["l"] = l;
    doc["energy_recoils"] = energy;
    doc["orders"] = orders;
    write_json_file(out, doc);
    return;
  }
  ensure_parent_dir(out);
  io::write_table(out, comments,
                  {"order_j", "momentum_recoils", "probability", "re", "im",
                   "phase"},
                  rows);
}

void cmd_scan(const RunConfig& cfg) {
  validate_common(cfg);
  const PhysicalContext ctx = context_of(cfg);
  const double l_real = 2.0 * period_talbot_of(cfg, ctx);

  EnergyScan scan;
  std::vector<double> swept_kicks;

  if (cfg.sweep == "pi") {
    std::vector<double> values(static_cast<std::size_t>(cfg.steps));
    for (int i = 0; i < cfg.steps; ++i) {
      values[static_cast<std::size_t>(i)] =
          (cfg.steps == 1)
              ? cfg.start
              : cfg.start + (cfg.stop - cfg.start) * i / (cfg.steps - 1);
    }
    const auto engine = make_engine(cfg, ctx, cfg.kicks);
    SourceSpec spec{0.0, cfg.sigma, cfg.nodes, cfg.span};
    const SourceSpec* source = cfg.sigma > 0.0 ? &spec : nullptr;

    std::function<void(std::size_t, const AveragedDistribution&)> observer;
    if (!cfg.dist_dir.empty()) {
      observer = [&](std::size_t i, const AveragedDistribution& avg) {
        dump_point_distribution(cfg, "scan", i, values[i], avg);
      };
    }
    scan = scan_initial_momentum(*engine, values, source, cfg.threads, observer);
  } else {  // sweep over the kick count at fixed p_i
    const int n_lo = static_cast<int>(std::lround(cfg.start));
    const int n_hi = static_cast<int>(std::lround(cfg.stop));
    if (n_lo < 0 || n_hi < n_lo)
      throw std::invalid_argument("kick sweep needs 0 <= start <= stop");
    scan.parameter = "n_kicks";
    for (int n = n_lo; n <= n_hi; ++n) {
      const auto engine = make_engine(cfg, ctx, n);
      double energy = 0.0;
      if (cfg.sigma > 0.0) {
        SourceSpec spec{cfg.p_i, cfg.sigma, cfg.nodes, cfg.span};
        energy = average_incoherently(*engine, spec, cfg.threads).energy;
      } else {
        energy = engine->run(cfg.p_i).energy;
      }
      scan.values.push_back(n);
      scan.energy.push_back(energy);
      scan.uncertainty.push_back(0.0);
      swept_kicks.push_back(n);
    }
  }

  const std::string out = cfg.out.empty() ? "scan.csv" : cfg.out;
  if (cfg.format == "json") {
    json doc;
    doc["command"] = "scan";
    doc["config"] = cfg.resolved;
    doc["parameter"] = scan.parameter;
    doc["values"] = scan.values;
    doc["energy_recoils"] = scan.energy;
    doc["uncertainty"] = scan.uncertainty;
    doc["engine"] = cfg.engine;
    doc["l"] = l_real;
    doc["phi_d"] = cfg.phi_d;
    write_json_file(out, doc);
    return;
  }

  ensure_parent_dir(out);
  std::ofstream file(out);
  if (!file) throw std::invalid_argument("cannot open output file " + out);
  for (const auto& c : base_comments("scan", cfg)) file << "# " << c << '\n';
  file << scan.parameter
       << ",energy_recoils,uncertainty,engine,l,n,phi_d\n";
  for (std::size_t i = 0; i < scan.values.size(); ++i) {
    const int n_col = (cfg.sweep == "pi")
                          ? cfg.kicks
                          : static_cast<int>(swept_kicks[i]);
    file << io::format_double(scan.values[i]) << ','
         << io::format_double(scan.energy[i]) << ','
         << io::format_double(scan.uncertainty[i]) << ',' << cfg.engine << ','
         << io::format_double(l_real) << ',' << n_col << ','
         << io::format_double(cfg.phi_d) << '\n';
  }
  if (!file) throw std::runtime_error("write failed for " + out);
}

void cmd_map(const RunConfig& cfg) {
  validate_common(cfg);
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("map needs a source width (--sigma > 0)");
  const PhysicalContext ctx = context_of(cfg);

  const auto engine = make_engine(cfg, ctx, cfg.kicks);
  const SourceSpec spec{cfg.p_i, cfg.sigma, cfg.nodes, cfg.span};
  const AveragedDistribution avg =
      average_incoherently(*engine, spec, cfg.threads);
  const auto [lo, hi] = axis_range(avg, cfg.pmax);

  auto comments = base_comments("map", cfg);
  comments.push_back("energy_recoils = " + io::format_double(avg.energy));
  comments.push_back("bin_width_recoils = " + io::format_double(avg.bin_width));
  comments.push_back(
      "rows: one per initial-momentum node; columns: p_i_recoils, weight, "
      "then probability density per final-momentum bin");

  const std::string out = cfg.out.empty() ? "map.csv" : cfg.out;
  const std::string profile_out = cfg.profile_out.empty()
                                      ? default_sibling(out, "profile")
                                      : cfg.profile_out;

  if (cfg.format == "json") {
    json doc;
    doc["command"] = "map";
    doc["config"] = cfg.resolved;
    doc["energy_recoils"] = avg.energy;
    doc["bin_width_recoils"] = avg.bin_width;
    doc["axis_recoils"] =
        std::vector<double>(avg.axis.begin() + static_cast<std::ptrdiff_t>(lo),
                            avg.axis.begin() + static_cast<std::ptrdiff_t>(hi));
    doc["node_momenta_recoils"] = avg.node_momenta;
    doc["node_weights"] = avg.node_weights;
    json matrix = json::array();
    for (const auto& row : avg.per_sample) {
      json r = json::array();
      for (std::size_t c = lo; c < hi; ++c) r.push_back(row[c] / avg.bin_width);
      matrix.push_back(std::move(r));
    }
    doc["density_matrix"] = std::move(matrix);
    json profile = json::array();
    for (std::size_t c = lo; c < hi; ++c) profile.push_back(avg.density[c]);
    doc["averaged_density"] = std::move(profile);
    write_json_file(out, doc);
    return;
  }

  ensure_parent_dir(out);
  std::ofstream file(out);
  if (!file) throw std::invalid_argument("cannot open output file " + out);
  for (const auto& c : comments) file << "# " << c << '\n';
  file << "p_i_recoils,weight";
  for (std::size_t c = lo; c < hi; ++c)
    file << ',' << io::format_double(avg.axis[c]);
  file << '\n';
  for (std::size_t k = 0; k < avg.per_sample.size(); ++k) {
    file << io::format_double(avg.node_momenta[k]) << ','
         << io::format_double(avg.node_weights[k]);
    for (std::size_t c = lo; c < hi; ++c)
      file << ',' << io::format_double(avg.per_sample[k][c] / avg.bin_width);
    file << '\n';
  }
  if (!file) throw std::runtime_error("write failed for " + out);

  std::vector<double> momentum(avg.axis.begin() + static_cast<std::ptrdiff_t>(lo),
                               avg.axis.begin() + static_cast<std::ptrdiff_t>(hi));
  std::vector<double> density(avg.density.begin() + static_cast<std::ptrdiff_t>(lo),
                              avg.density.begin() + static_cast<std::ptrdiff_t>(hi));
  write_profile_csv(profile_out, comments, momentum, density);
}

void cmd_fit(const RunConfig& cfg) {
  validate_common(cfg);
  if (cfg.input.empty()) throw std::invalid_argument("fit needs --input FILE");
  const io::Table table = io::read_table(cfg.input);
  if (table.rows.empty())
    throw std::invalid_argument("fit: no rows in " + cfg.input);

  std::vector<double> momentum, density;
  momentum.reserve(table.rows.size());
  density.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.size() < 2)
      throw std::invalid_argument("fit: need momentum,density columns");
    momentum.push_back(row[0]);
    density.push_back(row[1]);
  }

  const double seed =
      cfg.width_seed > 0.0 ? cfg.width_seed : (cfg.sigma > 0.0 ? cfg.sigma : 0.1);
  const GaussianFitResult fit =
      fit_orders(momentum, density, cfg.beta, cfg.max_order, seed);
  const double variance = direct_variance(momentum, density);

  auto comments = base_comments("fit", cfg);
  comments.push_back("input = " + cfg.input);
  comments.push_back("fitted_energy_recoils = " + io::format_double(fit.energy));
  comments.push_back("direct_variance_recoils = " + io::format_double(variance));
  comments.push_back("residual_norm = " + io::format_double(fit.residual_norm));
  comments.push_back("iterations = " + std::to_string(fit.iterations));
  comments.push_back(std::string("converged = ") + (fit.converged ? "1" : "0"));

  const std::string out = cfg.out.empty() ? "fit.csv" : cfg.out;
  if (cfg.format == "json") {
    json orders = json::array();
    for (const auto& o : fit.orders) {
      orders.push_back({{"j", o.j},
                        {"center_recoils", o.center},
                        {"amplitude", o.amplitude},
                        {"width_recoils", o.width},
                        {"mass", o.mass},
                        {"converged", o.converged}});
    }
    json doc;
    doc["command"] = "fit";
    doc["config"] = cfg.resolved;
    doc["fitted_energy_recoils"] = fit.energy;
    doc["direct_variance_recoils"] = variance;
    doc["residual_norm"] = fit.residual_norm;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    doc["orders"] = std::move(orders);
    write_json_file(out, doc);
    return;
  }

  std::vector<std::vector<double>> rows;
  for (const auto& o : fit.orders) {
    rows.push_back({static_cast<double>(o.j), o.center, o.amplitude, o.width,
                    o.mass, o.converged ? 1.0 : 0.0});
  }
  ensure_parent_dir(out);
  io::write_table(out, comments,
                  {"order_j", "center_recoils", "amplitude", "width_recoils",
                   "mass", "converged"},
                  rows);
}

void cmd_reduce(const RunConfig& cfg) {
  validate_common(cfg);
  if (cfg.input.empty()) throw std::invalid_argument("reduce needs --input FILE");
  const auto image = io::read_matrix(cfg.input);
  const ReduceAxis axis =
      cfg.axis == "rows" ? ReduceAxis::kOverRows : ReduceAxis::kOverColumns;
  const std::vector<double> profile = reduce_image(image, axis);

  auto comments = base_comments("reduce", cfg);
  comments.push_back("input = " + cfg.input);
  comments.push_back("summed_over = " + cfg.axis);

  const std::string out = cfg.out.empty() ? "reduce.csv" : cfg.out;
  if (cfg.format == "json") {
    json doc;
    doc["command"] = "reduce";
    doc["config"] = cfg.resolved;
    doc["profile"] = profile;
    write_json_file(out, doc);
    return;
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < profile.size(); ++i)
    rows.push_back({static_cast<double>(i), profile[i]});
  ensure_parent_dir(out);
  io::write_table(out, comments, {"index", "value"}, rows);
}

int dispatch(const std::string& command, const RunConfig& cfg) {
  try {
    if (command == "simulate") cmd_simulate(cfg);
    else if (command == "oracle") cmd_oracle(cfg);
    else if (command == "scan") cmd_scan(cfg);
    else if (command == "map") cmd_map(cfg);
    else if (command == "fit") cmd_fit(cfg);
    else if (command == "reduce") cmd_reduce(cfg);
    else throw std::invalid_argument("unknown command " + command);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace qkr::cli
