#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "schrocon/state.hpp"

namespace schrocon {

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  // kissfft caches twiddle tables per size, so one engine per thread.
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> e;
    e.SetFlag(Eigen::FFT<double>::Unscaled);
    return e;
  }();
  return engine;
}

// Ascending-mode storage <-> DFT bin order along one axis (an fftshift).
inline void to_bin_order(const Complex* src, Complex* dst, int n) {
  const int h = n / 2;
  for (int i = 0; i < n; ++i) dst[(i + h) % n] = src[i];
}
inline void from_bin_order(const Complex* src, Complex* dst, int n) {
  const int h = n / 2;
  for (int i = 0; i < n; ++i) dst[i] = src[(i + h) % n];
}

// In-place 1D transform of `count` contiguous lines of length n.
// inverse=true evaluates sum_m c_m e^{+2 pi i m j / n} (unscaled);
// inverse=false evaluates (1/n) sum_j u_j e^{-2 pi i m j / n}.
inline void transform_lines(Complex* data, int n, int count, int stride, int step, bool inverse) {
  auto& fft = fft_engine();
  std::vector<Complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  const double scale = inverse ? 1.0 : 1.0 / n;
  for (int line = 0; line < count; ++line) {
    Complex* base = data + static_cast<std::ptrdiff_t>(line) * step;
    for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = base[static_cast<std::ptrdiff_t>(j) * stride];
    if (inverse) {
      fft.inv(out.data(), in.data(), n);
    } else {
      fft.fwd(out.data(), in.data(), n);
    }
    for (int j = 0; j < n; ++j) base[static_cast<std::ptrdiff_t>(j) * stride] = out[static_cast<std::size_t>(j)] * scale;
  }
}

}  // namespace detail

/// Samples u(x_j) at the grid points x_j = j/N (row-major in 2D).
inline Eigen::VectorXcd to_physical(const FourierState& u) {
  const GridSpec& g = u.grid();
  const int n = g.modes_per_axis();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(g.size()));
  if (g.dim() == 1) {
    detail::to_bin_order(u.coeffs().data(), out.data(), n);
    detail::transform_lines(out.data(), n, 1, 1, n, true);
    return out;
  }
  // Reorder both axes into bin order, then transform rows and columns.
  Eigen::VectorXcd tmp(out.size());
  for (int i1 = 0; i1 < n; ++i1) {
    detail::to_bin_order(u.coeffs().data() + static_cast<std::ptrdiff_t>(i1) * n,
                         tmp.data() + static_cast<std::ptrdiff_t>(i1) * n, n);
  }
  const int h = n / 2;
  for (int i1 = 0; i1 < n; ++i1) {
    out.segment(static_cast<Eigen::Index>((i1 + h) % n) * n, n) = tmp.segment(static_cast<Eigen::Index>(i1) * n, n);
  }
  detail::transform_lines(out.data(), n, n, 1, n, true);
  detail::transform_lines(out.data(), n, n, n, 1, true);
  return out;
}

/// Exact discrete Fourier analysis of grid samples.
inline FourierState from_physical(const GridSpec& g, Eigen::VectorXcd samples) {
  if (static_cast<std::size_t>(samples.size()) != g.size()) {
    throw ValidationError("from_physical: sample count does not match " + g.describe());
  }
  const int n = g.modes_per_axis();
  Eigen::VectorXcd coeffs(samples.size());
  if (g.dim() == 1) {
    detail::transform_lines(samples.data(), n, 1, 1, n, false);
    detail::from_bin_order(samples.data(), coeffs.data(), n);
    return FourierState(g, std::move(coeffs));
  }
  detail::transform_lines(samples.data(), n, n, 1, n, false);
  detail::transform_lines(samples.data(), n, n, n, 1, false);
  const int h = n / 2;
  Eigen::VectorXcd tmp(samples.size());
  for (int i1 = 0; i1 < n; ++i1) {
    tmp.segment(static_cast<Eigen::Index>(i1) * n, n) = samples.segment(static_cast<Eigen::Index>((i1 + h) % n) * n, n);
  }
  for (int i1 = 0; i1 < n; ++i1) {
    detail::from_bin_order(tmp.data() + static_cast<std::ptrdiff_t>(i1) * n,
                           coeffs.data() + static_cast<std::ptrdiff_t>(i1) * n, n);
  }
  return FourierState(g, std::move(coeffs));
}

/// Mean of |u|^2 over the grid points; equals the L2 norm squared for
/// band-limited u (discrete Plancherel).
inline double physical_mass(const GridSpec& g, const Eigen::VectorXcd& samples) {
  return samples.squaredNorm() / static_cast<double>(g.size());
}

}  // namespace schrocon
