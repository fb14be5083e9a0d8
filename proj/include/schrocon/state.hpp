#pragma once

#include <Eigen/Core>
#include <complex>
#include <utility>

#include "schrocon/grid.hpp"

namespace schrocon {

using Complex = std::complex<double>;

/// A function on the torus held by its Fourier coefficients,
/// u(x) = sum_k c_k exp(2 pi i k.x). The torus has unit measure, so the L2
/// norm is the Euclidean norm of the coefficient vector.
class FourierState {
 public:
  FourierState(GridSpec grid, Eigen::VectorXcd coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (static_cast<std::size_t>(coeffs_.size()) != grid_.size()) {
      throw ValidationError("FourierState: coefficient count does not match " + grid_.describe());
    }
  }

  static FourierState zeros(const GridSpec& grid) {
    return FourierState(grid, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size())));
  }

  /// amplitude * exp(2 pi i k x) in 1D.
  static FourierState plane_wave(const GridSpec& grid, int k, Complex amplitude = 1.0) {
    require_1d(grid, "plane_wave");
    FourierState u = zeros(grid);
    u.mode(k) = amplitude;
    return u;
  }

  /// amplitude * exp(2 pi i (k1 x1 + k2 x2)) in 2D.
  static FourierState plane_wave(const GridSpec& grid, int k1, int k2, Complex amplitude) {
    if (grid.dim() != 2) throw ValidationError("plane_wave(k1,k2): 2D grid required");
    FourierState u = zeros(grid);
    u.mode(k1, k2) = amplitude;
    return u;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  Eigen::VectorXcd& coeffs() noexcept { return coeffs_; }

  Complex& mode(int k) { return coeffs_[checked_index(k)]; }
  Complex mode(int k) const { return coeffs_[checked_index(k)]; }
  Complex& mode(int k1, int k2) { return coeffs_[checked_index(k1, k2)]; }
  Complex mode(int k1, int k2) const { return coeffs_[checked_index(k1, k2)]; }

  double l2_norm() const { return coeffs_.norm(); }
  double mass() const { return coeffs_.squaredNorm(); }

  FourierState& operator+=(const FourierState& o) {
    require_same_grid(grid_, o.grid_, "FourierState +=");
    coeffs_ += o.coeffs_;
    return *this;
  }
  FourierState& operator-=(const FourierState& o) {
    require_same_grid(grid_, o.grid_, "FourierState -=");
    coeffs_ -= o.coeffs_;
    return *this;
  }
  FourierState& operator*=(Complex s) {
    coeffs_ *= s;
    return *this;
  }

  friend FourierState operator+(FourierState a, const FourierState& b) { return a += b; }
  friend FourierState operator-(FourierState a, const FourierState& b) { return a -= b; }
  friend FourierState operator*(Complex s, FourierState a) { return a *= s; }
  friend FourierState operator*(FourierState a, Complex s) { return a *= s; }

 private:
  Eigen::Index checked_index(int k) const {
    require_1d(grid_, "FourierState::mode(k)");
    if (k < grid_.min_mode() || k > grid_.max_mode()) {
      throw ValidationError("FourierState: mode " + std::to_string(k) + " outside " +
                            grid_.describe());
    }
    return grid_.index_of(k);
  }
  Eigen::Index checked_index(int k1, int k2) const {
    if (grid_.dim() != 2) throw ValidationError("FourierState::mode(k1,k2): 2D grid required");
    for (int k : {k1, k2}) {
      if (k < grid_.min_mode() || k > grid_.max_mode()) {
        throw ValidationError("FourierState: mode " + std::to_string(k) + " outside " +
                              grid_.describe());
      }
    }
    return static_cast<Eigen::Index>(grid_.index_of(k1)) * grid_.modes_per_axis() +
           grid_.index_of(k2);
  }

  GridSpec grid_;
  Eigen::VectorXcd coeffs_;
};

/// <a, b> = sum_k a_k conj(b_k), linear in the first slot.
inline Complex inner(const FourierState& a, const FourierState& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  return b.coeffs().dot(a.coeffs());
}

}  // namespace schrocon
