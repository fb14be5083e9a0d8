#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "schrocon/hum.hpp"

namespace schrocon {

struct ResolventOptions {
  /// Mode k is in ker(Delta - lambda) when |(2 pi)^2 |k|^2 + lambda| <= kernel_tol * max(1, |lambda|).
  double kernel_tol = 1e-10;
  /// Slack for the kernel constraint, relative to 1 + m max(chi^2).
  double feasibility_tol = 1e-10;
  EigenMethod method = EigenMethod::automatic;
  double lanczos_tol = 1e-12;
};

namespace detail {

struct ResolventSplit {
  std::vector<Eigen::Index> kernel;
  std::vector<Eigen::Index> rest;
  Eigen::VectorXd d_rest;  // |Delta - lambda| symbols on the complement
};

inline ResolventSplit split_kernel(const GridSpec& g, double lambda, double kernel_tol) {
  ResolventSplit s;
  std::vector<double> d;
  const double thresh = kernel_tol * std::max(1.0, std::abs(lambda));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.size()); ++i) {
    const double di = -laplace_symbol(g, i) - lambda;
    if (std::abs(di) <= thresh) {
      s.kernel.push_back(i);
    } else {
      s.rest.push_back(i);
      d.push_back(std::abs(di));
    }
  }
  s.d_rest = Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  return s;
}

/// Pseudo-inverse of the kernel block A_KK after checking feasibility:
/// A_KK must be negative semidefinite and its null directions must not couple
/// to the complement.
inline Eigen::MatrixXcd kernel_block_pinv(const Eigen::MatrixXcd& Akk, const Eigen::MatrixXcd& Apk,
                                          double tol, double lambda) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Akk);
  const Eigen::VectorXd mu = es.eigenvalues();
  if (mu.maxCoeff() > tol) {
    throw Infeasible("an eigenfunction of Delta at lambda violates m ||chi phi||^2 >= ||phi||^2", lambda);
  }
  Eigen::MatrixXcd pinv = Eigen::MatrixXcd::Zero(Akk.rows(), Akk.cols());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const Eigen::VectorXcd v = es.eigenvectors().col(j);
    if (mu(j) >= -tol) {
      if (Apk.rows() > 0 && (Apk * v).norm() > std::sqrt(tol)) {
        throw Infeasible("a marginal kernel direction couples to the complement", lambda);
      }
      continue;
    }
    pinv += (v * v.adjoint()) / mu(j);
  }
  return pinv;
}

}  // namespace detail

/// Smallest M >= 0 with ||u||^2 <= M ||(Delta - lambda) u||^2 + m ||chi u||^2 for
/// every state on the grid, where chi is `window`. Kernel modes of Delta - lambda
/// are eliminated by a Schur complement; the rest is the top eigenvalue of
/// |Delta - lambda|^{-1} (I - m chi^2)_Schur |Delta - lambda|^{-1}.
inline double best_resolvent_constant(double lambda, double m, const CutoffWindow& window,
                                      const GridSpec& grid, const ResolventOptions& opt = {}) {
  if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("best_resolvent_constant: m must be positive");
  if (!std::isfinite(lambda)) throw ValidationError("best_resolvent_constant: lambda must be finite");
  require_same_grid(window.grid, grid, "best_resolvent_constant");
  const detail::ResolventSplit sp = detail::split_kernel(grid, lambda, opt.kernel_tol);
  const CutoffWindow chi2 = window.squared();
  const double tol = opt.feasibility_tol * (1.0 + m * chi2.max());
  const auto nk = static_cast<Eigen::Index>(sp.kernel.size());
  const auto np = static_cast<Eigen::Index>(sp.rest.size());
  if (np == 0) {
    // Whole space is kernel: only the constraint remains.
    Eigen::MatrixXcd A = -m * multiplier_matrix(chi2);
    A.diagonal().array() += 1.0;
    detail::kernel_block_pinv(A, Eigen::MatrixXcd(0, nk), tol, lambda);
    return 0.0;
  }

  const bool dense = opt.method == EigenMethod::dense ||
                     (opt.method == EigenMethod::automatic && grid.size() <= 1024);
  if (dense) {
    Eigen::MatrixXcd A = -m * multiplier_matrix(chi2);
    A.diagonal().array() += 1.0;
    Eigen::MatrixXcd App(np, np), Apk(np, nk), Akk(nk, nk);
    for (Eigen::Index r = 0; r < np; ++r) {
      for (Eigen::Index c = 0; c < np; ++c) App(r, c) = A(sp.rest[r], sp.rest[c]);
      for (Eigen::Index c = 0; c < nk; ++c) Apk(r, c) = A(sp.rest[r], sp.kernel[c]);
    }
    for (Eigen::Index r = 0; r < nk; ++r)
      for (Eigen::Index c = 0; c < nk; ++c) Akk(r, c) = A(sp.kernel[r], sp.kernel[c]);
    if (nk > 0) App -= Apk * detail::kernel_block_pinv(Akk, Apk, tol, lambda) * Apk.adjoint();
    const Eigen::VectorXd dinv = sp.d_rest.cwiseInverse();
    const Eigen::MatrixXcd C = dinv.asDiagonal() * App * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues()(np - 1));
  }

  // Matrix-free: A x = x - m chi^2 x through the FFT.
  auto applyA = [&](const Eigen::VectorXcd& x) {
    return Eigen::VectorXcd(x - m * multiply_window(FourierState(grid, x), chi2).coeffs());
  };
  const auto dim = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd Akk(nk, nk), Apk(np, nk);
  for (Eigen::Index c = 0; c < nk; ++c) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e(sp.kernel[c]) = 1.0;
    const Eigen::VectorXcd Ae = applyA(e);
    for (Eigen::Index r = 0; r < nk; ++r) Akk(r, c) = Ae(sp.kernel[r]);
    for (Eigen::Index r = 0; r < np; ++r) Apk(r, c) = Ae(sp.rest[r]);
  }
  const Eigen::MatrixXcd pinv = nk > 0 ? detail::kernel_block_pinv(Akk, Apk, tol, lambda) : Eigen::MatrixXcd();
  LinearOp C = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index r = 0; r < np; ++r) x(sp.rest[r]) = v(r) / sp.d_rest(r);
    const Eigen::VectorXcd Ax = applyA(x);
    Eigen::VectorXcd out(np);
    for (Eigen::Index r = 0; r < np; ++r) out(r) = Ax(sp.rest[r]);
    if (nk > 0) {
      Eigen::VectorXcd xk(nk);
      for (Eigen::Index r = 0; r < nk; ++r) xk(r) = Ax(sp.kernel[r]);
      out -= Apk * (pinv * xk);
    }
    return Eigen::VectorXcd(out.cwiseQuotient(sp.d_rest.cast<Complex>()));
  };
  const LanczosResult lz = lanczos_extreme(C, np, Extreme::largest, opt.lanczos_tol);
  if (!lz.converged) throw NonConvergence("Lanczos for the resolvent constant did not converge", lz.steps, lz.residual);
  return std::max(0.0, lz.value);
}

/// Smallest m for which every eigenspace of Delta on the grid satisfies
/// m ||chi phi||^2 >= ||phi||^2. Throws Infeasible if some eigenfunction is
/// invisible to the window.
inline double minimal_feasible_m(const CutoffWindow& window) {
  const GridSpec& g = window.grid;
  const Eigen::MatrixXcd W = multiplier_matrix(window.squared());
  std::vector<std::pair<long, Eigen::Index>> levels;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.size()); ++i) levels.push_back({mode_norm_sq(g, i), i});
  std::sort(levels.begin(), levels.end());
  double m_min = 0.0;
  for (std::size_t a = 0; a < levels.size();) {
    std::size_t b = a;
    while (b < levels.size() && levels[b].first == levels[a].first) ++b;
    const auto n = static_cast<Eigen::Index>(b - a);
    Eigen::MatrixXcd Wk(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) Wk(r, c) = W(levels[a + r].second, levels[a + c].second);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Wk, Eigen::EigenvaluesOnly);
    const double wmin = es.eigenvalues()(0);
    const double lambda = -kFourPiSq * static_cast<double>(levels[a].first);
    if (!(wmin > 1e-14)) throw Infeasible("an eigenfunction of Delta is not seen by the window", lambda);
    m_min = std::max(m_min, 1.0 / wmin);
    a = b;
  }
  return m_min;
}

/// Eigenvalue levels -(2 pi)^2 j of Delta on the grid, ascending.
inline std::vector<double> laplace_eigenvalues(const GridSpec& g) {
  std::set<long> js;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(g.size()); ++i) js.insert(mode_norm_sq(g, i));
  std::vector<double> out;
  for (long j : js) out.push_back(-kFourPiSq * static_cast<double>(j));
  std::sort(out.begin(), out.end());
  return out;
}

/// Default sweep range: a little below the Nyquist eigenvalue up to +(2 pi)^2.
inline std::pair<double, double> default_lambda_range(const GridSpec& g) {
  const std::vector<double> ev = laplace_eigenvalues(g);
  return {1.1 * ev.front(), kFourPiSq};
}

/// About n_points values in [lo, hi]: every eigenvalue of Delta in range plus
/// Chebyshev-clustered points in each gap between consecutive breakpoints.
inline std::vector<double> default_lambda_grid(const GridSpec& g, double lo, double hi, int n_points = 512) {
  if (!(lo < hi)) throw ValidationError("lambda grid: lambda_min must be < lambda_max");
  if (n_points < 2) throw ValidationError("lambda grid: n_points must be >= 2");
  std::vector<double> br{lo};
  for (double e : laplace_eigenvalues(g))
    if (e > lo && e < hi) br.push_back(e);
  br.push_back(hi);
  const int gaps = static_cast<int>(br.size()) - 1;
  const int per_gap = std::max(2, (n_points - static_cast<int>(br.size())) / gaps);
  std::vector<double> out(br.begin(), br.end());
  for (int s = 0; s < gaps; ++s) {
    const double a = br[s], b = br[s + 1];
    for (int i = 1; i <= per_gap; ++i) {
      out.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * i / (per_gap + 1))));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct ResolventSweepResult {
  std::vector<double> lambda_grid;
  std::vector<double> M_of_lambda;
  std::vector<bool> feasible;
  double m_fixed = 0.0;
  double M_sup = 0.0;
  double lambda_at_sup = 0.0;
  double miller_time = 0.0;
  /// M_sup after each refinement of an adaptive sweep.
  std::vector<double> refinement_history;

  /// Supremum of M over grid points with |lambda| >= R0 (high-frequency regime).
  double restricted_sup(double R0) const {
    double sup = 0.0;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i)
      if (feasible[i] && std::abs(lambda_grid[i]) >= R0) sup = std::max(sup, M_of_lambda[i]);
    return sup;
  }
};

struct SweepOptions {
  ResolventOptions resolvent;
  /// Record infeasible points as such instead of failing the sweep.
  bool skip_infeasible = false;
};

inline ResolventSweepResult sweep(const std::vector<double>& lambda_grid, double m, const CutoffWindow& window,
                                  const GridSpec& grid, const SweepOptions& opt = {}) {
  if (lambda_grid.empty()) throw ValidationError("sweep: lambda grid is empty");
  ResolventSweepResult r;
  r.m_fixed = m;
  r.lambda_grid = lambda_grid;
  std::sort(r.lambda_grid.begin(), r.lambda_grid.end());
  for (double lam : r.lambda_grid) {
    double M = 0.0;
    bool ok = true;
    try {
      M = best_resolvent_constant(lam, m, window, grid, opt.resolvent);
    } catch (const Infeasible&) {
      if (!opt.skip_infeasible) throw;
      ok = false;
    }
    r.M_of_lambda.push_back(ok ? M : std::numeric_limits<double>::infinity());
    r.feasible.push_back(ok);
    if (ok && M > r.M_sup) {
      r.M_sup = M;
      r.lambda_at_sup = lam;
    }
  }
  r.miller_time = std::numbers::pi * std::sqrt(r.M_sup);
  r.refinement_history.push_back(r.M_sup);
  return r;
}

/// Sweeps the default grid, doubling the point count until M_sup moves by
/// less than rel_tol (or max_doublings is hit).
inline ResolventSweepResult adaptive_sweep(const GridSpec& grid, const CutoffWindow& window, double m, double lo,
                                           double hi, int n_points = 512, double rel_tol = 0.05,
                                           int max_doublings = 4, const SweepOptions& opt = {}) {
  ResolventSweepResult cur = sweep(default_lambda_grid(grid, lo, hi, n_points), m, window, grid, opt);
  std::vector<double> history{cur.M_sup};
  for (int d = 0; d < max_doublings; ++d) {
    n_points *= 2;
    ResolventSweepResult next = sweep(default_lambda_grid(grid, lo, hi, n_points), m, window, grid, opt);
    history.push_back(next.M_sup);
    const bool stable = std::abs(next.M_sup - cur.M_sup) <= rel_tol * std::max(next.M_sup, 1e-300);
    cur = std::move(next);
    if (stable) break;
  }
  cur.refinement_history = history;
  return cur;
}

/// Observability cost 2 m T / (T^2 - M pi^2), valid for T > pi sqrt(M).
inline double miller_cost_bound(double M, double m, double T) {
  if (!(M >= 0.0) || !(m > 0.0)) throw ValidationError("miller_cost_bound: need M >= 0 and m > 0");
  const double denom = T * T - M * std::numbers::pi * std::numbers::pi;
  if (!(T > std::numbers::pi * std::sqrt(M)) || !(denom > 0.0)) {
    throw ValidationError("miller_cost_bound: T must exceed pi sqrt(M)");
  }
  return 2.0 * m * T / denom;
}

struct ResolventConstants {
  double M = 0.0;
  double m = 0.0;
};

/// (M, m) = (2 C_T T^3 / 3, 2 C_T T).
inline ResolventConstants constants_from_observability(double C_T, double T) {
  if (!(C_T >= 0.0) || !(T > 0.0)) throw ValidationError("constants_from_observability: need C_T >= 0, T > 0");
  return {2.0 * C_T * T * T * T / 3.0, 2.0 * C_T * T};
}

struct EstimateCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

inline constexpr double kEstimateSlack = 1e-10;

/// ||(Delta - lambda) u||^2.
inline double resolvent_residual_sq(const FourierState& u, double lambda) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) {
    const double d = -laplace_symbol(u.grid(), i) - lambda;
    acc += d * d * std::norm(u.coeffs()[i]);
  }
  return acc;
}

/// Both sides of ||u||^2 <= M ||(Delta - lambda) u||^2 + m ||chi u||^2.
inline EstimateCheck verify_resolvent(const FourierState& u, double lambda, double M, double m,
                                      const CutoffWindow& window) {
  EstimateCheck c;
  c.lhs = u.mass();
  c.rhs = M * resolvent_residual_sq(u, lambda) + m * multiply_window(u, window).mass();
  c.holds = c.lhs <= c.rhs * (1.0 + kEstimateSlack);
  return c;
}

/// Both sides of ||lambda u||^2 <= M2 ||(Delta - lambda^2) u||^2 + m2 ||lambda chi u||^2.
inline EstimateCheck wave_resolvent_check(const FourierState& u, double lambda, double M2, double m2,
                                          const CutoffWindow& window) {
  EstimateCheck c;
  const double l2 = lambda * lambda;
  c.lhs = l2 * u.mass();
  c.rhs = M2 * resolvent_residual_sq(u, l2) + m2 * l2 * multiply_window(u, window).mass();
  c.holds = c.lhs <= c.rhs * (1.0 + kEstimateSlack);
  return c;
}

}  // namespace schrocon
