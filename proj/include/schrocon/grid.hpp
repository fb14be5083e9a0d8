#pragma once

#include <cstddef>
#include <string>

#include "schrocon/errors.hpp"

namespace schrocon {

/// Equispaced periodic grid on the torus [0,1)^dim.
///
/// Fourier modes per axis run over k = -N/2, ..., N/2-1. States store their
/// coefficients in ascending mode order (row-major in 2D: index = i1*N + i2,
/// with k_a = i_a - N/2). The symbol of the Laplacian on mode k is
/// -(2*pi)^2 |k|^2.
class GridSpec {
 public:
  int dim() const noexcept { return dim_; }
  int modes_per_axis() const noexcept { return n_; }
  /// Total number of modes (and of physical points).
  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(n_)
                     : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  int min_mode() const noexcept { return -n_ / 2; }
  int max_mode() const noexcept { return n_ / 2 - 1; }

  /// Mode index along one axis for storage position i (0 <= i < N).
  int mode_of(int i) const noexcept { return i - n_ / 2; }
  /// Storage position along one axis for mode k.
  int index_of(int k) const noexcept { return k + n_ / 2; }

  /// Physical coordinate of grid point j along one axis.
  double point(int j) const noexcept { return static_cast<double>(j) / n_; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }
  friend bool operator!=(const GridSpec& a, const GridSpec& b) noexcept { return !(a == b); }

  std::string describe() const {
    return std::to_string(dim_) + "D N=" + std::to_string(n_);
  }

 private:
  GridSpec(int dim, int n) : dim_(dim), n_(n) {}
  friend GridSpec make_grid(int dim, int n);

  int dim_;
  int n_;
};

inline GridSpec make_grid(int dim, int n) {
  if (dim != 1 && dim != 2) {
    throw ValidationError("grid: dim must be 1 or 2, got " + std::to_string(dim));
  }
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("grid: modes_per_axis must be even and >= 4, got " + std::to_string(n));
  }
  return GridSpec(dim, n);
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (a != b) {
    throw ValidationError(std::string(where) + ": grid mismatch (" + a.describe() + " vs " +
                          b.describe() + ")");
  }
}

inline void require_1d(const GridSpec& g, const char* where) {
  if (g.dim() != 1) {
    throw ValidationError(std::string(where) + ": defined on the one-dimensional torus only");
  }
}

}  // namespace schrocon
