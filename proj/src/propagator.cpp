#include "qkr/propagator.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "qkr/errors.hpp"

namespace qkr {

namespace {

// FFTW plan creation/destruction is not thread safe; execution on disjoint
// arrays is. Plans are created FFTW_UNALIGNED so they can run on any buffer
// via the new-array interface, keeping one workspace per worker.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

class FftWorkspace {
 public:
  explicit FftWorkspace(int n) : n_(n) {
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  ~FftWorkspace() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  void forward(std::complex<double>* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd_, buf, buf);
  }

  // Unnormalized inverse; callers rescale by 1/n.
  void backward(std::complex<double>* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(bwd_, buf, buf);
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Momentum in recoils for FFT index m (standard wrap-around ordering).
double fft_momentum(int m, const SpatialGrid& g) {
  const int half = g.n_points / 2;
  const int signed_m = (m < half) ? m : m - g.n_points;
  return signed_m * g.dp();
}

// exp(-i (pi/2) q^2 duration) per FFT index.
std::vector<std::complex<double>> free_phase_table(const SpatialGrid& g,
                                                   double duration_talbot) {
  std::vector<std::complex<double>> table(static_cast<std::size_t>(g.n_points));
  for (int m = 0; m < g.n_points; ++m) {
    const double q = fft_momentum(m, g);
    table[static_cast<std::size_t>(m)] =
        std::polar(1.0, -0.5 * std::numbers::pi * q * q * duration_talbot);
  }
  return table;
}

// exp(-i phi cos(2 x)) per grid point.
std::vector<std::complex<double>> kick_phase_table(const SpatialGrid& g,
                                                   double phi) {
  std::vector<std::complex<double>> table(static_cast<std::size_t>(g.n_points));
  for (int i = 0; i < g.n_points; ++i) {
    table[static_cast<std::size_t>(i)] =
        std::polar(1.0, -phi * std::cos(2.0 * g.position(i)));
  }
  return table;
}

void multiply(std::vector<std::complex<double>>& amps,
              const std::vector<std::complex<double>>& table) {
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] *= table[i];
}

void scale(std::vector<std::complex<double>>& amps, double s) {
  for (auto& a : amps) a *= s;
}

// Momentum-space phase multiply: FFT, apply table, inverse FFT, rescale.
void apply_in_momentum(WaveState& state, const FftWorkspace& ws,
                       const std::vector<std::complex<double>>& table) {
  ws.forward(state.amplitudes.data());
  multiply(state.amplitudes, table);
  ws.backward(state.amplitudes.data());
  scale(state.amplitudes, 1.0 / state.grid.n_points);
}

double squared_norm(const WaveState& state) {
  double s = 0.0;
  for (const auto& a : state.amplitudes) s += std::norm(a);
  return s;
}

double reduce_beta(double half_momentum) {
  double b = half_momentum - std::floor(half_momentum);
  if (b >= 1.0) b = 0.0;
  return b;
}

}  // namespace

double SpatialGrid::box_length() const { return n_periods * std::numbers::pi; }
double SpatialGrid::dx() const { return box_length() / n_points; }
double SpatialGrid::dp() const { return 2.0 / n_periods; }
double SpatialGrid::position(int i) const { return (i - n_points / 2) * dx(); }
double SpatialGrid::max_momentum() const { return (n_points / 2) * dp(); }

SpatialGrid make_grid(int n_points, int n_periods) {
  if (!is_power_of_two(n_points))
    throw std::invalid_argument("make_grid: n_points must be a power of two");
  if (n_periods < 1 || n_points % n_periods != 0)
    throw std::invalid_argument("make_grid: n_periods must divide n_points");
  if (n_points / n_periods < 4)
    throw std::invalid_argument("make_grid: fewer than 4 points per lattice period");
  return SpatialGrid{n_points, n_periods};
}

void validate(const KickSchedule& schedule) {
  if (schedule.n_kicks < 0)
    throw std::invalid_argument("KickSchedule: n_kicks must be >= 0");
  if (!(schedule.period_talbot > 0.0))
    throw std::invalid_argument("KickSchedule: period must be positive");
  if (schedule.phi_d < 0.0)
    throw std::invalid_argument("KickSchedule: phi_d must be >= 0");
  if (schedule.pulse_width_fraction < 0.0 || schedule.pulse_width_fraction >= 0.1)
    throw std::invalid_argument(
        "KickSchedule: pulse_width_fraction must be in [0, 0.1)");
  if (schedule.substeps < 1)
    throw std::invalid_argument("KickSchedule: substeps must be >= 1");
}

KickSchedule schedule_for_l(int l, int n_kicks, double phi_d) {
  if (l < 1) throw std::invalid_argument("schedule_for_l: l must be >= 1");
  KickSchedule s;
  s.n_kicks = n_kicks;
  s.period_talbot = 0.5 * l;
  s.phi_d = phi_d;
  return s;
}

double WaveState::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

WaveState init_wavepacket(const SpatialGrid& grid, double sigma_w,
                          double k_i_recoils) {
  const double min_sigma = 2.0 * std::numbers::pi;  // two lattice periods
  const double max_sigma = grid.box_length() / 6.0;
  if (!(sigma_w >= min_sigma && sigma_w <= max_sigma))
    throw std::invalid_argument(
        "init_wavepacket: sigma_w must cover a few lattice periods and stay "
        "below box_length/6");

  const long m0 = std::lround(k_i_recoils / grid.dp());
  if (std::abs(m0) >= grid.n_points / 2)
    throw std::invalid_argument("init_wavepacket: k_i beyond the momentum grid");
  const double q0 = static_cast<double>(m0) * grid.dp();

  WaveState state;
  state.grid = grid;
  state.amplitudes.resize(static_cast<std::size_t>(grid.n_points));
  state.beta = reduce_beta(0.5 * q0);
  state.momentum0 = q0;

  // Position-density rms sigma_w: |psi|^2 ~ exp(-x^2 / (2 sigma_w^2)), so the
  // momentum-density rms is 1/(2 sigma_w) recoils.
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.position(i);
    const double envelope = std::exp(-x * x / (4.0 * sigma_w * sigma_w));
    state.amplitudes[static_cast<std::size_t>(i)] =
        envelope * std::polar(1.0, q0 * x);
  }

  const double n = state.norm();
  scale(state.amplitudes, 1.0 / n);
  return state;
}

WaveState init_plane_wave(const SpatialGrid& grid, double k_i_recoils) {
  const long m0 = std::lround(k_i_recoils / grid.dp());
  if (std::abs(m0) >= grid.n_points / 2)
    throw std::invalid_argument("init_plane_wave: k_i beyond the momentum grid");
  const double q0 = static_cast<double>(m0) * grid.dp();

  WaveState state;
  state.grid = grid;
  state.amplitudes.resize(static_cast<std::size_t>(grid.n_points));
  state.beta = reduce_beta(0.5 * q0);
  state.momentum0 = q0;

  const double amp = 1.0 / std::sqrt(static_cast<double>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    state.amplitudes[static_cast<std::size_t>(i)] =
        amp * std::polar(1.0, q0 * grid.position(i));
  }
  return state;
}

void apply_kick(WaveState& state, double phi_d) {
  multiply(state.amplitudes, kick_phase_table(state.grid, phi_d));
}

void apply_free(WaveState& state, double duration_talbot) {
  if (duration_talbot == 0.0) return;
  FftWorkspace ws(state.grid.n_points);
  apply_in_momentum(state, ws, free_phase_table(state.grid, duration_talbot));
}

void run_schedule(WaveState& state, const KickSchedule& schedule) {
  validate(schedule);
  if (schedule.n_kicks == 0) return;

  FftWorkspace ws(state.grid.n_points);
  const bool ideal = schedule.pulse_width_fraction == 0.0;
  const double tau = schedule.pulse_width_fraction * schedule.period_talbot;

  std::vector<std::complex<double>> kick_table;
  std::vector<std::complex<double>> substep_kinetic;
  if (ideal) {
    kick_table = kick_phase_table(state.grid, schedule.phi_d);
  } else {
    kick_table = kick_phase_table(
        state.grid, 0.5 * schedule.phi_d / schedule.substeps);
    substep_kinetic = free_phase_table(state.grid, tau / schedule.substeps);
  }
  const std::vector<std::complex<double>> drift =
      free_phase_table(state.grid, schedule.period_talbot - tau);

  for (int period = 1; period <= schedule.n_kicks; ++period) {
    if (ideal) {
      multiply(state.amplitudes, kick_table);
    } else {
      for (int s = 0; s < schedule.substeps; ++s) {
        multiply(state.amplitudes, kick_table);
        apply_in_momentum(state, ws, substep_kinetic);
        multiply(state.amplitudes, kick_table);
      }
    }
    apply_in_momentum(state, ws, drift);

    if (!std::isfinite(squared_norm(state)))
      throw NumericalFailure(
          "run_schedule: non-finite amplitudes after period " +
              std::to_string(period),
          period);
  }
}

double MomentumDistribution::mean_energy_recoils() const {
  double e = 0.0;
  for (std::size_t i = 0; i < probability.size(); ++i) {
    const double p = momentum(i);
    e += probability[i] * p * p;
  }
  return e;
}

MomentumDistribution momentum_distribution(const WaveState& state,
                                           double window_recoils) {
  if (!(window_recoils > 0.0) || window_recoils > 1.0)
    throw std::invalid_argument(
        "momentum_distribution: window must be in (0, 1] recoils");

  const SpatialGrid& g = state.grid;
  const int n = g.n_points;

  std::vector<std::complex<double>> work = state.amplitudes;
  FftWorkspace ws(n);
  ws.forward(work.data());

  MomentumDistribution out;
  out.dp = g.dp();
  out.p_min = -(n / 2) * g.dp();
  out.probability.resize(static_cast<std::size_t>(n));
  const double inv_n = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    const int m = (k + n / 2) % n;  // ascending momentum order
    out.probability[static_cast<std::size_t>(k)] =
        std::norm(work[static_cast<std::size_t>(m)]) * inv_n;
  }

  const double beta = state.beta;
  const int j_lo = static_cast<int>(
      std::lround((out.p_min - 2.0 * beta) / 2.0));
  const int j_hi = static_cast<int>(
      std::lround((out.momentum(out.probability.size() - 1) - 2.0 * beta) / 2.0));

  LadderDistribution comb;
  comb.beta = beta;
  comb.j_min = j_lo;
  comb.probabilities.assign(static_cast<std::size_t>(j_hi - j_lo + 1), 0.0);

  constexpr double edge_tol = 1e-12;
  for (std::size_t k = 0; k < out.probability.size(); ++k) {
    const double p = out.momentum(k);
    const int j = static_cast<int>(std::lround((p - 2.0 * beta) / 2.0));
    const double center = 2.0 * j + 2.0 * beta;
    if (std::abs(p - center) <= window_recoils + edge_tol) {
      comb.probabilities[static_cast<std::size_t>(j - j_lo)] += out.probability[k];
    } else {
      comb.off_comb_mass += out.probability[k];
    }
  }
  comb.trim(0.0);
  out.comb = std::move(comb);
  return out;
}

double mean_energy_recoils(const WaveState& state) {
  return momentum_distribution(state).mean_energy_recoils();
}

std::complex<double> overlap(const WaveState& a, const WaveState& b) {
  if (a.amplitudes.size() != b.amplitudes.size())
    throw std::invalid_argument("overlap: mismatched grids");
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
    s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return s;
}

}  // namespace qkr
