#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "schrocon/spectral_ops.hpp"

namespace schrocon {

/// Amplitude profile for random test states.
struct SpectralEnvelope {
  enum class Kind { white, gaussian, sobolev };
  Kind kind = Kind::white;
  /// gaussian: width k0 in mode units, amplitude exp(-|k|^2 / (2 k0^2)).
  /// sobolev: exponent p, amplitude (1 + |2 pi k|^2)^(-p/2).
  double parameter = 0.0;

  static SpectralEnvelope white() { return {Kind::white, 0.0}; }
  static SpectralEnvelope gaussian(double k0) { return {Kind::gaussian, k0}; }
  static SpectralEnvelope sobolev(double p) { return {Kind::sobolev, p}; }

  double amplitude(const GridSpec& g, Eigen::Index idx) const {
    switch (kind) {
      case Kind::white: return 1.0;
      case Kind::gaussian: {
        const double k2 = static_cast<double>(mode_norm_sq(g, idx));
        return std::exp(-k2 / (2.0 * parameter * parameter));
      }
      case Kind::sobolev: return std::pow(1.0 + laplace_symbol(g, idx), -0.5 * parameter);
    }
    return 1.0;
  }
};

/// Complex Gaussian coefficients shaped by `env`. In 1D modes are drawn in
/// the order 0, 1, -1, 2, -2, ..., -N/2, so the low modes of a given seed
/// agree across resolutions.
inline FourierState random_state(const GridSpec& g, std::mt19937_64& rng,
                                 SpectralEnvelope env = SpectralEnvelope::white()) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FourierState u = FourierState::zeros(g);
  auto draw = [&](Eigen::Index idx) {
    const double re = normal(rng);
    const double im = normal(rng);
    u.coeffs()[idx] = env.amplitude(g, idx) * Complex(re, im);
  };
  if (g.dim() == 1) {
    const int h = g.modes_per_axis() / 2;
    draw(g.index_of(0));
    for (int k = 1; k < h; ++k) {
      draw(g.index_of(k));
      draw(g.index_of(-k));
    }
    draw(g.index_of(-h));
  } else {
    for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) draw(i);
  }
  return u;
}

/// u rescaled to the given H^s norm (L2 when s = 0).
inline FourierState with_norm(FourierState u, double norm, double s = 0.0) {
  const double cur = sobolev_norm(u, s);
  if (cur == 0.0) return u;
  u *= norm / cur;
  return u;
}

}  // namespace schrocon
