#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "schrocon/spectral_ops.hpp"

namespace schrocon {

/// i u_t + Delta u + i c chi^2 u = sigma |u|^2 u, stepped with dt.
/// c = damping_sign is +1 for damping and -1 for the anti-damped equation
/// obtained by reversing time and conjugating a damped solution.
struct NLSParams {
  double sigma = -1.0;
  std::optional<CutoffWindow> damping;
  double dt = 1e-3;
  bool dealias = true;
  double damping_sign = 1.0;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("nls: dt must be positive");
    if (!std::isfinite(sigma)) throw ValidationError("nls: sigma must be finite");
    if (damping_sign != 1.0 && damping_sign != -1.0) throw ValidationError("nls: damping_sign must be +1 or -1");
  }
};

/// Zeroes modes with max |k_i| > N/3 (2/3 rule).
inline void dealias_two_thirds(FourierState& u) {
  const GridSpec& g = u.grid();
  const int n = g.modes_per_axis();
  const int cut = n / 3;
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) {
    const bool drop = g.dim() == 1
                          ? std::abs(g.mode_of(static_cast<int>(i))) > cut
                          : std::max(std::abs(g.mode_of(static_cast<int>(i / n))),
                                     std::abs(g.mode_of(static_cast<int>(i % n)))) > cut;
    if (drop) u.coeffs()[i] = 0.0;
  }
}

namespace detail {

/// Strang step with a precomputed half-step propagator and damping factor.
struct StrangStepper {
  NLSParams p;
  PropagatorPhases half;
  Eigen::ArrayXcd damp_half;  // exp(-c chi^2 dt/2) or empty

  StrangStepper(const GridSpec& g, const NLSParams& params)
      : p(params), half(g, 0.5 * params.dt) {
    p.validate();
    if (p.damping) {
      require_same_grid(p.damping->grid, g, "nls damping");
      const Eigen::ArrayXd chi2 = p.damping->samples.array().square();
      damp_half = (-p.damping_sign * 0.5 * p.dt * chi2).exp().cast<Complex>();
    }
  }

  void damp(FourierState& u) const {
    if (!damp_half.size()) return;
    Eigen::VectorXcd x = to_physical(u);
    x.array() *= damp_half;
    u = from_physical(u.grid(), std::move(x));
  }

  void step(FourierState& u) const {
    damp(u);
    half.apply(u.coeffs());
    Eigen::VectorXcd x = to_physical(u);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double ph = -p.sigma * std::norm(x[j]) * p.dt;
      x[j] *= Complex(std::cos(ph), std::sin(ph));
    }
    u = from_physical(u.grid(), std::move(x));
    if (p.dealias) dealias_two_thirds(u);
    half.apply(u.coeffs());
    damp(u);
  }
};

}  // namespace detail

/// One Strang step: half damping, half free propagation, exact cubic phase
/// rotation u -> u exp(-i sigma |u|^2 dt), half free propagation, half damping.
/// Damping at the outer ends makes the mass loss per step a trapezoid sum of
/// ||chi u||^2 at the step endpoints up to O(dt^3). With dealias on, the 2/3
/// filter is applied after the phase rotation.
inline FourierState nls_step(FourierState u, const NLSParams& params) {
  detail::StrangStepper(u.grid(), params).step(u);
  return u;
}

/// Sum_k (2 pi |k|)^2 |u_k|^2 + (sigma/2) int |u|^4.
inline double energy(const FourierState& u, double sigma) {
  double kinetic = 0.0;
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) kinetic += laplace_symbol(u.grid(), i) * std::norm(u.coeffs()[i]);
  const Eigen::VectorXcd x = to_physical(u);
  const double quartic = x.cwiseAbs2().cwiseAbs2().mean();
  return kinetic + 0.5 * sigma * quartic;
}

struct DecayRecord {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> energy;
  /// ||chi u||^2 with the damping window (zero without damping).
  std::vector<double> observed;
  std::optional<double> gamma_fit;

  std::size_t size() const noexcept { return times.size(); }
};

struct EvolveResult {
  FourierState final_state;
  DecayRecord record;
  int steps = 0;
};

inline void append_sample(DecayRecord& rec, double t, const FourierState& u, const NLSParams& p) {
  rec.times.push_back(t);
  rec.mass.push_back(u.mass());
  rec.energy.push_back(energy(u, p.sigma));
  rec.observed.push_back(p.damping ? multiply_window(u, *p.damping).mass() : 0.0);
}

/// Steps from u0 to time T with ceil(T/dt) equal steps (the step is shrunk to
/// land on T). Samples every `record_stride` steps plus the final time.
inline EvolveResult evolve(const FourierState& u0, double T, const NLSParams& params, int record_stride = 1) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("evolve: T must be positive");
  if (record_stride < 1) throw ValidationError("evolve: record_stride must be >= 1");
  params.validate();
  const int n = std::max(1, static_cast<int>(std::ceil(T / params.dt - 1e-9)));
  NLSParams p = params;
  p.dt = T / n;
  const detail::StrangStepper stepper(u0.grid(), p);
  EvolveResult out{u0, {}, n};
  append_sample(out.record, 0.0, u0, p);
  for (int s = 1; s <= n; ++s) {
    stepper.step(out.final_state);
    if (s % record_stride == 0 || s == n) append_sample(out.record, s * p.dt, out.final_state, p);
  }
  return out;
}

struct DecayFit {
  double gamma = 0.0;
  /// The raw slope gave a slightly negative rate that was clamped to 0.
  bool clamped = false;
  int samples = 0;
};

/// gamma = -slope(log mass) / 2 by least squares over the last tail_fraction
/// of the record's time span.
inline DecayFit fit_decay_rate(const DecayRecord& rec, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("fit_decay_rate: tail_fraction must lie in (0, 1]");
  }
  if (rec.times.size() != rec.mass.size() || rec.times.empty()) {
    throw ValidationError("fit_decay_rate: malformed record");
  }
  const double t0 = rec.times.front(), t1 = rec.times.back();
  const double start = t1 - tail_fraction * (t1 - t0);
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    if (rec.times[i] < start - 1e-12 * std::max(1.0, std::abs(t1))) continue;
    if (!(rec.mass[i] > 0.0)) throw ValidationError("fit_decay_rate: mass must be positive in the tail");
    const double t = rec.times[i] - start, y = std::log(rec.mass[i]);
    st += t, sy += y, stt += t * t, sty += t * y;
    ++n;
  }
  if (n < 10) throw ValidationError("fit_decay_rate: fewer than 10 samples in the tail");
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  DecayFit fit{-0.5 * slope, false, n};
  if (fit.gamma < 0.0) {
    fit.gamma = 0.0;
    fit.clamped = true;
  }
  return fit;
}

struct StabilizeOptions {
  /// Time between decay-rate refits.
  double chunk = 10.0;
  /// Horizon cap is cap_factor / gamma_est.
  double cap_factor = 50.0;
  double gamma_floor = 1e-6;
  double tail_fraction = 0.5;
  int record_stride = 10;
};

struct StabilizeResult {
  FourierState final_state;
  DecayRecord record;
  double time = 0.0;
  int steps = 0;
  double gamma_est = 0.0;
  double horizon_cap = 0.0;
};

/// Damped evolution until ||u|| <= norm_threshold. The decay rate is refit
/// every `chunk` time units; running past cap_factor / gamma_est or fitting a
/// rate below gamma_floor raises StabilizationStall.
inline StabilizeResult stabilize(const FourierState& u0, const NLSParams& params, double norm_threshold,
                                 const StabilizeOptions& opt = {}) {
  params.validate();
  if (!params.damping) throw ValidationError("stabilize: a damping window is required");
  if (!(norm_threshold > 0.0)) throw ValidationError("stabilize: threshold must be positive");
  if (!(opt.chunk > 0.0) || !(opt.cap_factor > 0.0)) throw ValidationError("stabilize: bad options");
  const detail::StrangStepper stepper(u0.grid(), params);
  StabilizeResult out{u0, {}, 0.0, 0, 0.0, std::numeric_limits<double>::infinity()};
  append_sample(out.record, 0.0, u0, params);
  const int chunk_steps = std::max(1, static_cast<int>(std::llround(opt.chunk / params.dt)));
  // Keep enough samples per chunk for the refit.
  const int stride = std::max(1, std::min(opt.record_stride, chunk_steps / 50));
  while (out.final_state.l2_norm() > norm_threshold) {
    for (int s = 0; s < chunk_steps; ++s) {
      stepper.step(out.final_state);
      ++out.steps;
      out.time = out.steps * params.dt;
      const bool done = out.final_state.l2_norm() <= norm_threshold;
      if (out.steps % stride == 0 || done) append_sample(out.record, out.time, out.final_state, params);
      if (done) break;
    }
    if (out.final_state.l2_norm() <= norm_threshold) break;
    const DecayFit fit = fit_decay_rate(out.record, opt.tail_fraction);
    out.gamma_est = fit.gamma;
    if (fit.gamma <= opt.gamma_floor) {
      throw StabilizationStall("fitted decay rate is below the floor", fit.gamma);
    }
    out.horizon_cap = opt.cap_factor / fit.gamma;
    if (out.time >= out.horizon_cap) {
      throw StabilizationStall("threshold not reached within the horizon cap", fit.gamma);
    }
  }
  if (out.record.size() >= 10) {
    try {
      out.gamma_est = fit_decay_rate(out.record, opt.tail_fraction).gamma;
    } catch (const ValidationError&) {
    }
  }
  out.record.gamma_fit = out.gamma_est;
  return out;
}

}  // namespace schrocon
