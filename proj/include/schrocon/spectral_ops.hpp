#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "schrocon/state.hpp"
#include "schrocon/transform.hpp"
#include "schrocon/window.hpp"

namespace schrocon {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

/// -Laplacian eigenvalue (2 pi)^2 |k|^2 of mode position `idx` in storage order.
inline double laplace_symbol(const GridSpec& g, Eigen::Index idx) {
  const int n = g.modes_per_axis();
  if (g.dim() == 1) {
    const double k = g.mode_of(static_cast<int>(idx));
    return kFourPiSq * k * k;
  }
  const double k1 = g.mode_of(static_cast<int>(idx / n));
  const double k2 = g.mode_of(static_cast<int>(idx % n));
  return kFourPiSq * (k1 * k1 + k2 * k2);
}

/// Integer |k|^2 of a storage position.
inline long mode_norm_sq(const GridSpec& g, Eigen::Index idx) {
  const int n = g.modes_per_axis();
  if (g.dim() == 1) {
    const long k = g.mode_of(static_cast<int>(idx));
    return k * k;
  }
  const long k1 = g.mode_of(static_cast<int>(idx / n));
  const long k2 = g.mode_of(static_cast<int>(idx % n));
  return k1 * k1 + k2 * k2;
}

/// Table of exp(-i (2 pi m)^2 t) for m = 0..N/2. The phase is reduced modulo
/// 2 pi in extended precision, so long times keep full double accuracy.
class PropagatorPhases {
 public:
  PropagatorPhases(const GridSpec& g, double t) : grid_(g), axis_(static_cast<std::size_t>(g.modes_per_axis() / 2 + 1)) {
    constexpr long double pi = 3.141592653589793238462643383279502884L;
    constexpr long double two_pi = 2.0L * pi;
    const long double base = 4.0L * pi * pi * static_cast<long double>(t);
    for (std::size_t m = 0; m < axis_.size(); ++m) {
      const long double theta = std::fmod(base * static_cast<long double>(m * m), two_pi);
      const double r = static_cast<double>(theta);
      axis_[m] = Complex(std::cos(r), -std::sin(r));
    }
  }

  /// Phase of storage position idx.
  Complex at(Eigen::Index idx) const {
    const int n = grid_.modes_per_axis();
    if (grid_.dim() == 1) return axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(static_cast<int>(idx))))];
    return axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(static_cast<int>(idx / n))))] *
           axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(static_cast<int>(idx % n))))];
  }

  /// coeffs <- phase * coeffs (forward in time), or conj(phase) * coeffs.
  void apply(Eigen::VectorXcd& c, bool conjugate = false) const {
    const int n = grid_.modes_per_axis();
    if (grid_.dim() == 1) {
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        const Complex p = axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(static_cast<int>(i))))];
        c[i] *= conjugate ? std::conj(p) : p;
      }
      return;
    }
    for (int i1 = 0; i1 < n; ++i1) {
      const Complex p1 = axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(i1)))];
      for (int i2 = 0; i2 < n; ++i2) {
        const Complex p = p1 * axis_[static_cast<std::size_t>(std::abs(grid_.mode_of(i2)))];
        c[static_cast<Eigen::Index>(i1) * n + i2] *= conjugate ? std::conj(p) : p;
      }
    }
  }

 private:
  GridSpec grid_;
  std::vector<Complex> axis_;
};

struct PropagateOptions {
  /// Zero the unpaired mode -N/2 (on every axis) after propagating.
  bool zero_nyquist = false;
};

inline void zero_nyquist_modes(FourierState& u) {
  const GridSpec& g = u.grid();
  const int n = g.modes_per_axis();
  if (g.dim() == 1) {
    u.coeffs()[0] = 0.0;
    return;
  }
  for (int i = 0; i < n; ++i) {
    u.coeffs()[i] = 0.0;                                   // k1 = -N/2
    u.coeffs()[static_cast<Eigen::Index>(i) * n] = 0.0;    // k2 = -N/2
  }
}

/// Free Schroedinger flow e^{it Delta}: c_k -> exp(-i (2 pi k)^2 t) c_k.
inline FourierState free_propagate(FourierState u, double t, PropagateOptions opts = {}) {
  PropagatorPhases(u.grid(), t).apply(u.coeffs());
  if (opts.zero_nyquist) zero_nyquist_modes(u);
  return u;
}

/// D^r on T^1: mode n -> sgn(n) |n|^r c_n for n != 0, mode 0 unchanged.
/// Uses the bare integer |n|, not 2 pi |n|.
inline FourierState fractional_derivative(FourierState u, double r) {
  require_1d(u.grid(), "fractional_derivative");
  const GridSpec& g = u.grid();
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) {
    const int k = g.mode_of(static_cast<int>(i));
    if (k == 0) continue;
    const double mag = std::pow(static_cast<double>(std::abs(k)), r);
    u.coeffs()[i] *= (k > 0 ? mag : -mag);
  }
  return u;
}

/// ( sum_k (1 + |2 pi k|^2)^s |c_k|^2 )^{1/2}.
inline double sobolev_norm(const FourierState& u, double s) {
  if (s == 0.0) return u.l2_norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) {
    acc += std::pow(1.0 + laplace_symbol(u.grid(), i), s) * std::norm(u.coeffs()[i]);
  }
  return std::sqrt(acc);
}

/// Pointwise product with the window samples, back in mode space.
inline FourierState multiply_window(const FourierState& u, const CutoffWindow& w) {
  require_same_grid(u.grid(), w.grid, "multiply_window");
  Eigen::VectorXcd phys = to_physical(u);
  phys.array() *= w.samples.array().cast<Complex>();
  return from_physical(u.grid(), std::move(phys));
}

/// Physical complex conjugate: coefficient k becomes conj(u_{-k}), with -k
/// wrapped onto the grid (so the Nyquist mode maps to itself).
inline FourierState conjugate(const FourierState& u) {
  const GridSpec& g = u.grid();
  const int n = g.modes_per_axis();
  auto neg = [n](int i) { return i == 0 ? 0 : n - i; };  // storage index of -k
  FourierState out = FourierState::zeros(g);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out.coeffs()[neg(i)] = std::conj(u.coeffs()[i]);
  } else {
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        out.coeffs()[static_cast<Eigen::Index>(neg(i1)) * n + neg(i2)] =
            std::conj(u.coeffs()[static_cast<Eigen::Index>(i1) * n + i2]);
  }
  return out;
}

/// Dense matrix of u -> w u in mode coordinates: entry (r, c) is the
/// discrete Fourier coefficient of w at mode(r) - mode(c), wrapped to the grid.
inline Eigen::MatrixXcd multiplier_matrix(const CutoffWindow& w) {
  const GridSpec& g = w.grid;
  const int n = g.modes_per_axis();
  const Eigen::Index dim = static_cast<Eigen::Index>(g.size());
  const FourierState a = from_physical(g, w.samples.cast<Complex>());
  auto wrap = [n](int m) {
    m %= n;
    if (m < -n / 2) m += n;
    if (m > n / 2 - 1) m -= n;
    return m;
  };
  Eigen::MatrixXcd M(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (g.dim() == 1) {
        M(r, c) = a.mode(wrap(g.mode_of(static_cast<int>(r)) - g.mode_of(static_cast<int>(c))));
      } else {
        const int m1 = wrap(g.mode_of(static_cast<int>(r / n)) - g.mode_of(static_cast<int>(c / n)));
        const int m2 = wrap(g.mode_of(static_cast<int>(r % n)) - g.mode_of(static_cast<int>(c % n)));
        M(r, c) = a.mode(m1, m2);
      }
    }
  }
  return M;
}

/// [D^r, f] u = D^r(f u) - f D^r u.
inline FourierState commutator_apply(const FourierState& u, double r, const CutoffWindow& f) {
  require_1d(u.grid(), "commutator_apply");
  return fractional_derivative(multiply_window(u, f), r) -
         multiply_window(fractional_derivative(u, r), f);
}

}  // namespace schrocon
