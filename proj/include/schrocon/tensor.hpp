#pragma once

#include <limits>
#include <string>
#include <vector>

#include "schrocon/hum.hpp"

namespace schrocon {

/// Strip omega_1 x T on the 2D torus built from a window on the first axis.
struct StripWindow {
  CutoffWindow base;
  CutoffWindow window;  // 2D samples, constant along x2
};

inline StripWindow make_strip_window(const CutoffWindow& base) {
  require_1d(base.grid, "make_strip_window");
  const int n = base.grid.modes_per_axis();
  const GridSpec g2 = make_grid(2, n);
  Eigen::VectorXd s(static_cast<Eigen::Index>(g2.size()));
  for (int j1 = 0; j1 < n; ++j1) s.segment(static_cast<Eigen::Index>(j1) * n, n).setConstant(base.samples[j1]);
  CutoffWindow w{g2, std::move(s), base.omega, base.transition_width, base.kind, base.profile};
  return {base, std::move(w)};
}

/// True if the 2D window does not vary along x2.
inline bool is_strip(const CutoffWindow& w) {
  if (w.grid.dim() != 2) return false;
  const int n = w.grid.modes_per_axis();
  for (int j1 = 0; j1 < n; ++j1) {
    const double v = w.samples[static_cast<Eigen::Index>(j1) * n];
    for (int j2 = 1; j2 < n; ++j2)
      if (w.samples[static_cast<Eigen::Index>(j1) * n + j2] != v) return false;
  }
  return true;
}

/// Base (first-axis) window of a strip.
inline CutoffWindow strip_base(const CutoffWindow& w) {
  if (!is_strip(w)) throw ValidationError("window does not depend on x1 only");
  const int n = w.grid.modes_per_axis();
  Eigen::VectorXd s(n);
  for (int j1 = 0; j1 < n; ++j1) s[j1] = w.samples[static_cast<Eigen::Index>(j1) * n];
  CutoffWindow b{make_grid(1, n), std::move(s), w.omega, w.transition_width, w.kind, w.profile};
  return b;
}

/// Slices c_k(x1) of u(x1, x2) = sum_k c_k(x1) e^{2 pi i k x2}, ordered k = -N/2 .. N/2-1.
inline std::vector<FourierState> decompose_modes(const FourierState& u2d) {
  const GridSpec& g = u2d.grid();
  if (g.dim() != 2) throw ValidationError("decompose_modes: 2D state required");
  const int n = g.modes_per_axis();
  const GridSpec g1 = make_grid(1, n);
  std::vector<FourierState> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i2 = 0; i2 < n; ++i2) {
    Eigen::VectorXcd c(n);
    for (int i1 = 0; i1 < n; ++i1) c[i1] = u2d.coeffs()[static_cast<Eigen::Index>(i1) * n + i2];
    out.emplace_back(g1, std::move(c));
  }
  return out;
}

/// c(x1) e^{2 pi i k x2}.
inline FourierState tensor_with_mode(const FourierState& c, int k) {
  require_1d(c.grid(), "tensor_with_mode");
  const int n = c.grid().modes_per_axis();
  FourierState u = FourierState::zeros(make_grid(2, n));
  const int i2 = c.grid().index_of(k);
  for (int i1 = 0; i1 < n; ++i1) u.coeffs()[static_cast<Eigen::Index>(i1) * n + i2] = c.coeffs()[i1];
  return u;
}

enum class StripMethod { dense_full, dense_blocks, krylov };

inline std::string to_string(StripMethod m) {
  switch (m) {
    case StripMethod::dense_full: return "dense_full";
    case StripMethod::dense_blocks: return "dense_blocks";
    case StripMethod::krylov: return "krylov";
  }
  return "?";
}

struct TensorReport {
  double C_1d = 0.0;
  double C_2d = 0.0;
  double relative_gap = 0.0;
  int N_per_axis = 0;
  double T = 0.0;
  std::string method;
};

/// The 1D spec with the same horizon, quadrature and base window.
inline GramianSpec base_spec(const GramianSpec& spec_2d) {
  return GramianSpec{spec_2d.horizon, strip_base(spec_2d.window), spec_2d.n_quad, spec_2d.rule};
}

/// Observability constants of the strip on T^2 and of its base on T^1.
/// dense_full diagonalizes the assembled N^2 x N^2 Gramian; dense_blocks
/// diagonalizes the 2D Gramian restricted to each x2-mode block; krylov runs
/// Lanczos on the matrix-free 2D operator.
inline TensorReport strip_observability_constant(const GramianSpec& spec_2d, StripMethod method) {
  if (spec_2d.grid().dim() != 2) throw ValidationError("strip_observability_constant: 2D spec required");
  const GramianSpec spec_1d = base_spec(spec_2d);
  TensorReport r;
  r.N_per_axis = spec_2d.grid().modes_per_axis();
  r.T = spec_2d.horizon;
  r.method = to_string(method);
  r.C_1d = observability_constant(Gramian(spec_1d), EigenMethod::dense).C_T;

  const Gramian G2(spec_2d);
  double lmin = 0.0;
  switch (method) {
    case StripMethod::dense_full:
      lmin = gramian_lambda_min(G2, EigenMethod::dense).first;
      break;
    case StripMethod::krylov:
      lmin = gramian_lambda_min(G2, EigenMethod::lanczos).first;
      break;
    case StripMethod::dense_blocks: {
      const int n = r.N_per_axis;
      const Eigen::MatrixXcd& S = G2.matrix();
      lmin = std::numeric_limits<double>::infinity();
      for (int i2 = 0; i2 < n; ++i2) {
        Eigen::MatrixXcd B(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) B(a, b) = S(static_cast<Eigen::Index>(a) * n + i2, static_cast<Eigen::Index>(b) * n + i2);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, es.eigenvalues()(0));
      }
      break;
    }
  }
  if (!(lmin >= kConditioningFloor)) throw IllConditioned("2D strip Gramian is numerically singular", lmin);
  r.C_2d = 1.0 / lmin;
  r.relative_gap = std::abs(r.C_2d - r.C_1d) / r.C_1d;
  return r;
}

inline TensorReport strip_observability_constant(const GramianSpec& spec_2d) {
  return strip_observability_constant(
      spec_2d, spec_2d.grid().modes_per_axis() <= 32 ? StripMethod::dense_full : StripMethod::krylov);
}

}  // namespace schrocon
