#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "schrocon/gramian.hpp"
#include "schrocon/krylov.hpp"
#include "schrocon/random_state.hpp"

namespace schrocon {

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 500;
  /// Divide residuals by T * mean(chi^2), the Gramian's average diagonal.
  bool mean_preconditioner = false;
};

struct ControlSolution {
  FourierState phi0;
  /// ||u(T)|| after driving the target with the synthesized control.
  double residual_l2 = 0.0;
  int iterations = 0;
  /// ||S phi0 - rhs|| / ||rhs|| reported by the Krylov solver.
  double solver_residual = 0.0;
  std::optional<double> observability_constant;
};

/// Solves S x = b by conjugate gradients; throws NonConvergence on failure.
inline CgResult solve_gramian_system(const Gramian& G, const FourierState& b, const SolverOptions& opt) {
  if (!(opt.tol > 0.0)) throw ValidationError("solver tol must be positive");
  if (opt.max_iter < 1) throw ValidationError("solver max_iter must be >= 1");
  require_same_grid(b.grid(), G.grid(), "solve_gramian_system");
  const GridSpec& g = G.grid();
  LinearOp A = [&](const Eigen::VectorXcd& v) { return G.apply(FourierState(g, v)).coeffs(); };
  LinearOp M;
  if (opt.mean_preconditioner) {
    const double scale = G.spec().horizon * G.control_window().samples.mean();
    if (scale > 0.0) M = [scale](const Eigen::VectorXcd& r) { return Eigen::VectorXcd(r / scale); };
  }
  CgResult res = conjugate_gradient(A, b.coeffs(), opt.tol, opt.max_iter, M);
  if (!res.converged) {
    throw NonConvergence("HUM Gramian solve did not reach tolerance", res.iterations,
                         res.relative_residual);
  }
  return res;
}

struct DriveResult {
  std::vector<double> times;
  std::vector<double> mass;
  /// ||chi u(t)||^2 with the Gramian's window.
  std::vector<double> observed;
  FourierState final_state;
  double residual = 0.0;
};

/// Integrates i u_t + Delta u = chi^2 e^{it Delta} phi0 from u0 over [0, T].
/// The source acts as impulses -i w_j g(t_j) at the quadrature nodes with
/// exact free propagation in between, which is the time discretization that
/// defines the quadrature Gramian. With `n_record` > 0 the state is sampled at
/// that many uniformly spaced times (both ends included).
inline DriveResult drive_linear(const FourierState& u0, const Gramian& G, const FourierState& phi0,
                                int n_record = 0) {
  require_same_grid(u0.grid(), G.grid(), "drive_linear");
  require_same_grid(phi0.grid(), G.grid(), "drive_linear");
  const double T = G.spec().horizon;
  const TimeQuadrature& q = G.quadrature();
  const bool active = phi0.coeffs().squaredNorm() > 0.0;

  std::vector<double> record_times;
  if (n_record == 1) record_times = {T};
  for (int r = 0; r < n_record && n_record > 1; ++r) record_times.push_back(T * r / (n_record - 1));

  DriveResult out{{}, {}, {}, u0, 0.0};
  FourierState u = u0;
  double t = 0.0;
  std::size_t next_rec = 0;
  auto advance_to = [&](double target) {
    while (next_rec < record_times.size() && record_times[next_rec] < target) {
      const FourierState s = free_propagate(u, record_times[next_rec] - t);
      out.times.push_back(record_times[next_rec]);
      out.mass.push_back(s.mass());
      out.observed.push_back(multiply_window(s, G.spec().window).mass());
      ++next_rec;
    }
    u = free_propagate(std::move(u), target - t);
    t = target;
  };
  if (active) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      advance_to(q.nodes[j]);
      u -= Complex(0.0, q.weights[j]) * G.control_at(phi0, q.nodes[j]);
    }
  }
  advance_to(T);
  while (next_rec < record_times.size()) {
    out.times.push_back(record_times[next_rec]);
    out.mass.push_back(u.mass());
    out.observed.push_back(multiply_window(u, G.spec().window).mass());
    ++next_rec;
  }
  out.residual = u.l2_norm();
  out.final_state = std::move(u);
  return out;
}

/// HUM control steering `target` to zero at time T: S phi0 = -i target.
inline ControlSolution solve_hum(const Gramian& G, const FourierState& target, const SolverOptions& opt = {}) {
  const FourierState rhs = Complex(0.0, -1.0) * target;
  const CgResult cg = solve_gramian_system(G, rhs, opt);
  ControlSolution sol{FourierState(G.grid(), cg.x), 0.0, cg.iterations, cg.relative_residual, std::nullopt};
  sol.residual_l2 = target.mass() == 0.0 ? 0.0 : drive_linear(target, G, sol.phi0).residual;
  return sol;
}

inline ControlSolution solve_hum(const GramianSpec& spec, const FourierState& target, double tol,
                                 int max_iter) {
  return solve_hum(Gramian(spec), target, SolverOptions{tol, max_iter, false});
}

/// chi^2 e^{it Delta} phi0 for t in [0, T].
inline FourierState synthesize_control(const Gramian& G, const FourierState& phi0, double t) {
  const double T = G.spec().horizon;
  if (!(t >= 0.0 && t <= T)) throw ValidationError("synthesize_control: t must lie in [0, T]");
  require_same_grid(phi0.grid(), G.grid(), "synthesize_control");
  return G.control_at(phi0, t);
}

inline FourierState synthesize_control(const GramianSpec& spec, const FourierState& phi0, double t) {
  if (!(t >= 0.0 && t <= spec.horizon)) throw ValidationError("synthesize_control: t must lie in [0, T]");
  return multiply_window(free_propagate(phi0, t), spec.window.squared());
}

enum class EigenMethod { automatic, dense, lanczos };

struct ObservabilityResult {
  double C_T = 0.0;
  double lambda_min = 0.0;
  int n_quad = 0;
  std::string method;
  int lanczos_steps = 0;
};

inline constexpr double kConditioningFloor = 1e-14;

/// Smallest eigenvalue of the quadrature Gramian.
inline std::pair<double, ObservabilityResult> gramian_lambda_min(const Gramian& G, EigenMethod how,
                                                                 double lanczos_tol = 1e-13) {
  ObservabilityResult r;
  r.n_quad = static_cast<int>(G.quadrature().size());
  const bool dense = how == EigenMethod::dense || (how == EigenMethod::automatic && G.prefers_dense());
  double lmin = 0.0;
  if (dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G.matrix(), Eigen::EigenvaluesOnly);
    lmin = es.eigenvalues()(0);
    r.method = "dense";
  } else {
    const GridSpec& g = G.grid();
    LinearOp A = [&](const Eigen::VectorXcd& v) { return G.apply_matrix_free(FourierState(g, v)).coeffs(); };
    const LanczosResult lz = lanczos_extreme(A, G.dim(), Extreme::smallest, lanczos_tol);
    if (!lz.converged) {
      throw NonConvergence("Lanczos for lambda_min(S) did not converge", lz.steps, lz.residual);
    }
    lmin = lz.value;
    r.method = "lanczos";
    r.lanczos_steps = lz.steps;
  }
  r.lambda_min = lmin;
  return {lmin, r};
}

/// C_T = 1 / lambda_min(S). Throws IllConditioned below the conditioning floor.
inline ObservabilityResult observability_constant(const Gramian& G, EigenMethod how = EigenMethod::automatic) {
  auto [lmin, r] = gramian_lambda_min(G, how);
  if (!(lmin >= kConditioningFloor)) {
    throw IllConditioned("Gramian is numerically singular at this truncation", lmin);
  }
  r.C_T = 1.0 / lmin;
  return r;
}

inline ObservabilityResult observability_constant(const GramianSpec& spec) {
  return observability_constant(Gramian(spec));
}

struct RegularityStats {
  double s = 0.0;
  int n_samples = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// ||S^{-1} psi||_{H^s} over random psi normalized to ||psi||_{H^s} = 1.
/// Samples have coefficients decaying like (1 + |2 pi k|^2)^{-(s+1)/2}. Each
/// sample draws from its own generator seeded by `rng`, so sample i for a
/// given seed shares its low modes across resolutions.
inline RegularityStats hum_regularity_ratio(const Gramian& G, double s, int n_samples, std::mt19937_64& rng,
                                            const SolverOptions& opt = {}) {
  if (!(s >= 0.0)) throw ValidationError("hum_regularity_ratio: s must be >= 0");
  if (n_samples < 1) throw ValidationError("hum_regularity_ratio: n_samples must be >= 1");
  if (G.spec().window.kind != WindowKind::smooth) {
    throw ValidationError("hum_regularity_ratio: a smooth window is required");
  }
  RegularityStats st{s, n_samples, 0.0, 0.0};
  for (int i = 0; i < n_samples; ++i) {
    std::mt19937_64 sample_rng(rng());
    const FourierState psi =
        with_norm(random_state(G.grid(), sample_rng, SpectralEnvelope::sobolev(s + 1.0)), 1.0, s);
    const CgResult cg = solve_gramian_system(G, psi, opt);
    const double ratio = sobolev_norm(FourierState(G.grid(), cg.x), s);
    st.max_ratio = std::max(st.max_ratio, ratio);
    st.mean_ratio += ratio / n_samples;
  }
  return st;
}

}  // namespace schrocon
