#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "schrocon/hum.hpp"
#include "schrocon/nls.hpp"

namespace schrocon {

namespace detail {

/// Undamped Strang substep of length h (h may be negative, giving the exact
/// inverse of the step with -h). No dealiasing, so the step is reversible.
inline void strang_substep(FourierState& u, double h, double sigma) {
  const PropagatorPhases half(u.grid(), 0.5 * h);
  half.apply(u.coeffs());
  if (sigma != 0.0) {
    Eigen::VectorXcd x = to_physical(u);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double ph = -sigma * std::norm(x[j]) * h;
      x[j] *= Complex(std::cos(ph), std::sin(ph));
    }
    u = from_physical(u.grid(), std::move(x));
  }
  half.apply(u.coeffs());
}

/// Advances over an interval of signed length `len` in ceil(|len|/dt) equal substeps.
inline void nls_advance(FourierState& u, double len, double sigma, double dt) {
  if (len == 0.0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(len) / dt - 1e-9)));
  for (int s = 0; s < n; ++s) strang_substep(u, len / n, sigma);
}

}  // namespace detail

/// Impulse schedule on [0, T]: at times[j] the state receives -i weights[j] source(j).
struct KickSchedule {
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<double> weights;
  std::function<FourierState(std::size_t)> source;

  /// HUM control chi^2 e^{it Delta} phi0 at the Gramian's quadrature nodes.
  static KickSchedule hum(const Gramian& G, const FourierState& phi0) {
    KickSchedule k;
    k.horizon = G.spec().horizon;
    k.times = G.quadrature().nodes;
    k.weights = G.quadrature().weights;
    k.source = [G, phi0](std::size_t j) { return G.control_at(phi0, G.quadrature().nodes[j]); };
    return k;
  }

  /// The schedule that drives conj(u(T - s)) when this one drives u(s).
  KickSchedule reversed_conjugate() const {
    KickSchedule k;
    k.horizon = horizon;
    const std::size_t n = times.size();
    for (std::size_t j = 0; j < n; ++j) {
      k.times.push_back(horizon - times[n - 1 - j]);
      k.weights.push_back(weights[n - 1 - j]);
    }
    auto src = source;
    k.source = [src, n](std::size_t j) {
      return conjugate(src(n - 1 - j));
    };
    return k;
  }
};

/// Controlled NLS i u_t + Delta u = sigma |u|^2 u + g, with g given as kicks.
/// Forward integrates from time 0 to T; backward starts from the state at T
/// and undoes every forward operation, ending at time 0.
inline FourierState integrate_controlled(FourierState u, const KickSchedule& k, double sigma, double dt,
                                         bool backward = false) {
  if (!(dt > 0.0)) throw ValidationError("integrate_controlled: dt must be positive");
  const std::size_t n = k.times.size();
  if (!backward) {
    double t = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      detail::nls_advance(u, k.times[j] - t, sigma, dt);
      u -= Complex(0.0, k.weights[j]) * k.source(j);
      t = k.times[j];
    }
    detail::nls_advance(u, k.horizon - t, sigma, dt);
  } else {
    double t = k.horizon;
    for (std::size_t jj = n; jj-- > 0;) {
      detail::nls_advance(u, k.times[jj] - t, sigma, dt);
      u += Complex(0.0, k.weights[jj]) * k.source(jj);
      t = k.times[jj];
    }
    detail::nls_advance(u, -t, sigma, dt);
  }
  return u;
}

struct LocalControlOptions {
  double dt = 1e-3;
  SolverOptions solver{1e-12, 500, false};
  /// Diverged if the iterate difference grows this many times in a row.
  int max_increases = 3;
  /// Differences below noise_floor * ||phi|| are not used for contraction ratios.
  double noise_floor = 1e-9;
};

struct LocalControlResult {
  FourierState phi0;
  /// ||u(T)|| from a forward controlled NLS run started at u0.
  double residual = 0.0;
  int iterations = 0;
  /// ||phi^{j} - phi^{j-1}|| per iteration.
  std::vector<double> history;
  /// Largest ratio of successive differences measured above the noise floor (NaN if none).
  double contraction_ratio = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  bool certified = false;
};

/// Picard iteration phi <- S^{-1}(-i (u0 - K phi)), where K phi = v(0) for the
/// backward system and the linear HUM part is removed: K phi = u_b(0) - i S phi
/// with u_b the controlled NLS solution run backward from u(T) = 0.
inline LocalControlResult local_control_nls(const FourierState& u0, const Gramian& G, double sigma, double tol,
                                            int max_iter, const LocalControlOptions& opt = {}) {
  if (!(tol > 0.0)) throw ValidationError("local_control_nls: tol must be positive");
  if (max_iter < 1) throw ValidationError("local_control_nls: max_iter must be >= 1");
  require_same_grid(u0.grid(), G.grid(), "local_control_nls");
  const GridSpec& g = G.grid();
  const Complex minus_i(0.0, -1.0);

  LocalControlResult res{FourierState::zeros(g)};
  FourierState phi = FourierState::zeros(g);
  int increases = 0;
  double last_ratio = std::numeric_limits<double>::quiet_NaN();
  double max_ratio = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    FourierState K = FourierState::zeros(g);
    if (phi.mass() > 0.0) {
      const FourierState ub0 =
          integrate_controlled(FourierState::zeros(g), KickSchedule::hum(G, phi), sigma, opt.dt, /*backward=*/true);
      K = ub0 - Complex(0.0, 1.0) * G.apply(phi);
    }
    const FourierState rhs = minus_i * (u0 - K);
    FourierState next(g, solve_gramian_system(G, rhs, opt.solver).x);
    const double diff = (next - phi).l2_norm();
    if (!std::isfinite(diff)) throw Divergence("Picard iterate is not finite", last_ratio);
    if (!res.history.empty()) {
      const double prev = res.history.back();
      if (prev > opt.noise_floor * std::max(next.l2_norm(), 1e-300)) {
        last_ratio = diff / prev;
        max_ratio = std::max(max_ratio, last_ratio);
      }
      increases = diff > prev ? increases + 1 : 0;
    }
    res.history.push_back(diff);
    phi = std::move(next);
    res.iterations = it;
    if (diff < tol) {
      res.converged = true;
      break;
    }
    if (increases >= opt.max_increases) {
      throw Divergence("Picard iterates grow: data too large for local control", last_ratio);
    }
  }
  if (!res.converged) {
    throw NonConvergence("Picard iteration did not converge", res.iterations, res.history.back());
  }
  res.contraction_ratio = max_ratio >= 0.0 ? max_ratio : std::numeric_limits<double>::quiet_NaN();
  res.phi0 = phi;
  res.residual = u0.mass() == 0.0 && phi.mass() == 0.0
                     ? 0.0
                     : integrate_controlled(u0, KickSchedule::hum(G, phi), sigma, opt.dt).l2_norm();
  res.certified = res.residual <= 10.0 * tol * u0.l2_norm() || res.residual == 0.0;
  return res;
}

struct AmplitudeProbe {
  double amplitude = 0.0;
  bool converged = false;
  int iterations = 0;
  double contraction_ratio = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;
};

struct AdmissibleAmplitude {
  double delta = 0.0;
  std::vector<AmplitudeProbe> scan;
};

struct AmplitudeScanOptions {
  double start = 0.05;
  double factor = 1.4142135623730951;
  double max_amplitude = 8.0;
  double tol = 1e-8;
  int max_iter = 40;
};

/// Largest amplitude a (geometric scan from `start`) for which Picard local
/// control of a * direction converges; the scan stops at the first failure.
inline AdmissibleAmplitude admissible_amplitude(const Gramian& G, double sigma, const FourierState& direction,
                                                const AmplitudeScanOptions& scan = {},
                                                const LocalControlOptions& opt = {}) {
  if (!(direction.l2_norm() > 0.0)) throw ValidationError("admissible_amplitude: direction must be nonzero");
  if (!(scan.start > 0.0) || !(scan.factor > 1.0)) throw ValidationError("admissible_amplitude: bad scan");
  const FourierState unit = with_norm(direction, 1.0);
  AdmissibleAmplitude out;
  for (double a = scan.start; a <= scan.max_amplitude * (1.0 + 1e-12); a *= scan.factor) {
    AmplitudeProbe p;
    p.amplitude = a;
    try {
      const LocalControlResult r = local_control_nls(Complex(a, 0.0) * unit, G, sigma, scan.tol, scan.max_iter, opt);
      p.converged = true;
      p.iterations = r.iterations;
      p.contraction_ratio = r.contraction_ratio;
      p.residual = r.residual;
    } catch (const NumericalError& e) {
      p.converged = false;
    }
    out.scan.push_back(p);
    if (!p.converged) break;
    out.delta = a;
  }
  return out;
}

enum class PhaseType { damped, control };

inline std::string to_string(PhaseType t) { return t == PhaseType::damped ? "damped" : "control"; }

struct SchedulePhase {
  std::string name;
  double t_start = 0.0;
  double t_end = 0.0;
  PhaseType type = PhaseType::damped;
  /// damped: step count, step and sign (+1 damping, -1 anti-damping).
  int steps = 0;
  double dt = 0.0;
  double damping_sign = 1.0;
  /// control: HUM datum and whether kicks run reversed and conjugated.
  std::optional<FourierState> phi0;
  bool reversed_conjugate = false;
};

struct ControlSchedule {
  std::vector<SchedulePhase> phases;
  /// Number of leading phases forming the u0 -> 0 leg.
  std::size_t forward_leg_phases = 0;
  double forward_error = 0.0;
  double reverse_error = 0.0;
  double total_time = 0.0;
};

struct GlobalControlOptions {
  double dt = 1e-3;
  StabilizeOptions stabilize;
  LocalControlOptions local;
  int max_iter = 60;
};

namespace detail {

inline FourierState run_phase(FourierState u, const SchedulePhase& ph, const Gramian& G, double sigma,
                              const CutoffWindow& damping, double dt) {
  if (ph.type == PhaseType::damped) {
    NLSParams p{sigma, damping, ph.dt, false, ph.damping_sign};
    const StrangStepper st(u.grid(), p);
    for (int s = 0; s < ph.steps; ++s) st.step(u);
    return u;
  }
  KickSchedule k = KickSchedule::hum(G, *ph.phi0);
  if (ph.reversed_conjugate) k = k.reversed_conjugate();
  return integrate_controlled(std::move(u), k, sigma, dt);
}

/// Damped phase (if needed) then local control: the u -> 0 leg for one datum.
inline std::vector<SchedulePhase> leg_to_zero(const FourierState& u, const Gramian& G, double sigma,
                                              const CutoffWindow& damping, double threshold, double tol,
                                              const GlobalControlOptions& opt, const std::string& tag) {
  std::vector<SchedulePhase> out;
  if (u.mass() == 0.0) return out;
  FourierState cur = u;
  double t = 0.0;
  if (cur.l2_norm() > threshold) {
    const NLSParams p{sigma, damping, opt.dt, false, 1.0};
    const StabilizeResult st = stabilize(cur, p, threshold, opt.stabilize);
    SchedulePhase ph;
    ph.name = tag + ":stabilize";
    ph.t_start = 0.0;
    ph.t_end = st.steps * opt.dt;
    ph.type = PhaseType::damped;
    ph.steps = st.steps;
    ph.dt = opt.dt;
    out.push_back(ph);
    cur = st.final_state;
    t = ph.t_end;
  }
  const LocalControlResult lc = local_control_nls(cur, G, sigma, tol, opt.max_iter, opt.local);
  SchedulePhase ph;
  ph.name = tag + ":local-control";
  ph.t_start = t;
  ph.t_end = t + G.spec().horizon;
  ph.type = PhaseType::control;
  ph.phi0 = lc.phi0;
  out.push_back(ph);
  return out;
}

}  // namespace detail

/// u0 -> 0 by damping then local control; 0 -> u1 by running the same
/// construction on conj(u1) and emitting it reversed in time and conjugated
/// (damping becomes anti-damping, kicks run backward with conjugated sources).
/// Both endpoint errors are measured by simulating the final schedule from u0.
inline ControlSchedule global_control(const FourierState& u0, const FourierState& u1, const Gramian& G, double sigma,
                                      const CutoffWindow& damping, double norm_threshold, double tol,
                                      const GlobalControlOptions& opt = {}) {
  require_same_grid(u0.grid(), G.grid(), "global_control");
  require_same_grid(u1.grid(), G.grid(), "global_control");
  if (!(norm_threshold > 0.0)) throw ValidationError("global_control: threshold must be positive");
  ControlSchedule sched;
  sched.phases = detail::leg_to_zero(u0, G, sigma, damping, norm_threshold, tol, opt, "to-zero");
  sched.forward_leg_phases = sched.phases.size();

  const FourierState w0 = conjugate(u1);
  std::vector<SchedulePhase> back = detail::leg_to_zero(w0, G, sigma, damping, norm_threshold, tol, opt, "to-target");
  double t = sched.phases.empty() ? 0.0 : sched.phases.back().t_end;
  for (auto it = back.rbegin(); it != back.rend(); ++it) {
    SchedulePhase ph = *it;
    const double len = ph.t_end - ph.t_start;
    ph.name = ph.name + ":reversed";
    ph.t_start = t;
    ph.t_end = t + len;
    if (ph.type == PhaseType::damped) ph.damping_sign = -1.0;
    else ph.reversed_conjugate = true;
    sched.phases.push_back(ph);
    t = ph.t_end;
  }
  sched.total_time = t;

  FourierState u = u0;
  for (std::size_t i = 0; i < sched.phases.size(); ++i) {
    if (i == sched.forward_leg_phases) sched.forward_error = u.l2_norm();
    u = detail::run_phase(std::move(u), sched.phases[i], G, sigma, damping, opt.local.dt);
  }
  if (sched.forward_leg_phases == sched.phases.size()) sched.forward_error = u.l2_norm();
  sched.reverse_error = (u - u1).l2_norm();
  return sched;
}

}  // namespace schrocon
