#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "schrocon/quadrature.hpp"
#include "schrocon/spectral_ops.hpp"

namespace schrocon {

/// Time horizon, window and time quadrature defining the HUM operator
/// S = int_0^T e^{-it Delta} chi^2 e^{it Delta} dt.
struct GramianSpec {
  double horizon = 1.0;
  CutoffWindow window;
  int n_quad = 0;
  QuadRule rule = QuadRule::gauss_legendre;

  const GridSpec& grid() const noexcept { return window.grid; }

  void validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw ValidationError("gramian: horizon T must be positive");
    }
    if (n_quad < 2) throw ValidationError("gramian: n_quad must be >= 2");
  }
};

/// Largest frequency (2 pi)^2 max|k^2 - k'^2| that the window couples along
/// its active axis. Strip windows in 2D leave the second axis untouched, so
/// the bound is the same as in 1D.
inline double max_coupled_frequency(const GridSpec& g) {
  const double h = g.modes_per_axis() / 2.0;
  return kFourPiSq * h * h;
}

/// Default node count: enough 32-point Gauss panels that each panel sees at
/// most 24 radians of half-phase of the fastest coupled oscillation, and never
/// fewer than max(32, 4N).
inline int default_n_quad(const GridSpec& g, double T) {
  constexpr double kHalfPhasePerPanel = 24.0;
  const double panels = std::ceil(max_coupled_frequency(g) * T / (2.0 * kHalfPhasePerPanel));
  const int resolved = kGaussPanelOrder * static_cast<int>(std::max(1.0, panels));
  return std::max({32, 4 * g.modes_per_axis(), resolved});
}

inline GramianSpec make_gramian_spec(double T, CutoffWindow window, int n_quad = 0,
                                     QuadRule rule = QuadRule::gauss_legendre) {
  GramianSpec s{T, std::move(window), n_quad, rule};
  if (s.n_quad == 0 && T > 0.0) s.n_quad = default_n_quad(s.grid(), T);
  s.validate();
  return s;
}

/// The quadrature-discretized Gramian S_q = sum_j w_j e^{-it_j Delta} chi^2 e^{it_j Delta}.
/// `apply_matrix_free` evaluates it by exact propagation to each node;
/// `assemble` builds the same operator densely from the window's Fourier
/// coefficients and the node phase sums.
class Gramian {
 public:
  explicit Gramian(GramianSpec spec)
      : spec_(std::move(spec)),
        quad_(make_time_quadrature(spec_.rule, spec_.n_quad, spec_.horizon)),
        chi2_(spec_.window.squared()) {
    spec_.validate();
  }

  const GramianSpec& spec() const noexcept { return spec_; }
  const GridSpec& grid() const noexcept { return spec_.grid(); }
  const TimeQuadrature& quadrature() const noexcept { return quad_; }
  const CutoffWindow& control_window() const noexcept { return chi2_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(grid().size()); }

  /// Matrices up to this many modes are assembled and cached for repeated use.
  static constexpr Eigen::Index kDenseLimit = 1024;
  bool prefers_dense() const noexcept { return dim() <= kDenseLimit; }

  /// Cached dense matrix; assembled on first use.
  const Eigen::MatrixXcd& matrix() const {
    std::call_once(cache_->once, [this] { cache_->S = assemble(); });
    return cache_->S;
  }

  /// S phi, through the cached matrix when the problem is small enough.
  FourierState apply(const FourierState& phi) const {
    if (!prefers_dense()) return apply_matrix_free(phi);
    require_same_grid(phi.grid(), grid(), "apply_gramian");
    return FourierState(grid(), matrix() * phi.coeffs());
  }

  /// Quadrature of the observed energy int_0^T ||chi e^{it Delta} phi||^2 dt,
  /// evaluated by propagation rather than through S.
  double observed_energy(const FourierState& phi) const {
    require_same_grid(phi.grid(), grid(), "observed_energy");
    double acc = 0.0;
    for (std::size_t j = 0; j < quad_.size(); ++j) {
      acc += quad_.weights[j] *
             multiply_window(free_propagate(phi, quad_.nodes[j]), spec_.window).mass();
    }
    return acc;
  }

  /// chi^2 e^{it Delta} phi0: the control source at time t.
  FourierState control_at(const FourierState& phi0, double t) const {
    return multiply_window(free_propagate(phi0, t), chi2_);
  }

  FourierState apply_matrix_free(const FourierState& phi) const {
    require_same_grid(phi.grid(), grid(), "apply_gramian");
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(phi.coeffs().size());
    const Eigen::ArrayXcd chi2 = chi2_.samples.array().cast<Complex>();
    for (std::size_t j = 0; j < quad_.size(); ++j) {
      const PropagatorPhases ph(grid(), quad_.nodes[j]);
      Eigen::VectorXcd c = phi.coeffs();
      ph.apply(c);
      Eigen::VectorXcd x = to_physical(FourierState(grid(), std::move(c)));
      x.array() *= chi2;
      Eigen::VectorXcd back = from_physical(grid(), std::move(x)).coeffs();
      ph.apply(back, /*conjugate=*/true);
      acc += quad_.weights[j] * back;
    }
    return FourierState(grid(), std::move(acc));
  }

  /// Phase sums q(d) = sum_j w_j exp(i (2 pi)^2 d t_j) for d = 0..dmax.
  std::vector<Complex> phase_sums(long dmax) const {
    constexpr long double pi = 3.141592653589793238462643383279502884L;
    constexpr long double two_pi = 2.0L * pi;
    constexpr long kResync = 64;
    std::vector<Complex> q(static_cast<std::size_t>(dmax + 1), Complex(0.0, 0.0));
    for (std::size_t j = 0; j < quad_.size(); ++j) {
      const long double base = 4.0L * pi * pi * static_cast<long double>(quad_.nodes[j]);
      const double w = quad_.weights[j];
      const double r1 = static_cast<double>(std::fmod(base, two_pi));
      const Complex step(std::cos(r1), std::sin(r1));
      Complex z(1.0, 0.0);
      for (long d = 0; d <= dmax; ++d) {
        if (d % kResync == 0) {
          const double r = static_cast<double>(std::fmod(base * static_cast<long double>(d), two_pi));
          z = Complex(std::cos(r), std::sin(r));
        }
        q[static_cast<std::size_t>(d)] += w * z;
        z *= step;
      }
    }
    return q;
  }

  /// Entry (r, c) is a(k_r - k_c) q(|k_r|^2 - |k_c|^2) with a the Fourier
  /// coefficients of chi^2.
  Eigen::MatrixXcd assemble() const {
    const GridSpec& g = grid();
    Eigen::MatrixXcd S = multiplier_matrix(chi2_);
    long dmax = 0;
    for (Eigen::Index i = 0; i < dim(); ++i) dmax = std::max(dmax, mode_norm_sq(g, i));
    const std::vector<Complex> q = phase_sums(dmax);
    for (Eigen::Index c = 0; c < dim(); ++c) {
      const long dc = mode_norm_sq(g, c);
      for (Eigen::Index r = 0; r < dim(); ++r) {
        const long d = mode_norm_sq(g, r) - dc;
        S(r, c) *= d >= 0 ? q[static_cast<std::size_t>(d)] : std::conj(q[static_cast<std::size_t>(-d)]);
      }
    }
    return S;
  }

 private:
  GramianSpec spec_;
  TimeQuadrature quad_;
  CutoffWindow chi2_;
  struct Cache {
    std::once_flag once;
    Eigen::MatrixXcd S;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline FourierState apply_gramian(const GramianSpec& spec, const FourierState& phi0) {
  return Gramian(spec).apply(phi0);
}

}  // namespace schrocon
