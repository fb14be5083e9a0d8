#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "schrocon/errors.hpp"

namespace schrocon {

using LinearOp = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct CgResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for a Hermitian positive definite operator, stopped
/// on ||b - A x|| <= tol ||b||. An optional preconditioner applies M^{-1}.
inline CgResult conjugate_gradient(const LinearOp& A, const Eigen::VectorXcd& b, double tol,
                                   int max_iter, const LinearOp& precond = {}) {
  CgResult res;
  res.x = Eigen::VectorXcd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXcd r = b;
  Eigen::VectorXcd z = precond ? precond(r) : r;
  Eigen::VectorXcd p = z;
  std::complex<double> rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXcd Ap = A(p);
    const std::complex<double> pAp = p.dot(Ap);
    if (!(pAp.real() > 0.0)) {
      throw NumericalError("indefinite", "conjugate_gradient: operator is not positive definite");
    }
    const std::complex<double> alpha = rz / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    res.iterations = it;
    res.relative_residual = r.norm() / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    z = precond ? precond(r) : r;
    const std::complex<double> rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return res;
}

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXcd vector;
  int steps = 0;
  double residual = 0.0;
  bool converged = false;
};

enum class Extreme { smallest, largest };

/// Lanczos with full reorthogonalization for an extreme eigenpair of a
/// Hermitian operator of dimension `dim`. Stops when the Ritz residual
/// |beta_m y_m| drops below tol * max(|theta|, scale) or when the Krylov
/// space exhausts the dimension (then the answer is exact up to rounding).
inline LanczosResult lanczos_extreme(const LinearOp& A, Eigen::Index dim, Extreme which,
                                     double tol = 1e-12, int max_steps = -1,
                                     std::uint64_t seed = 12345) {
  if (dim <= 0) throw ValidationError("lanczos: empty operator");
  const int m_max = static_cast<int>(max_steps > 0 ? std::min<Eigen::Index>(max_steps, dim) : dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = {normal(rng), normal(rng)};
  v.normalize();

  Eigen::MatrixXcd V(dim, m_max);
  std::vector<double> alpha, beta;
  LanczosResult out;
  Eigen::VectorXd last_y;
  double scale = 0.0;
  for (int j = 0; j < m_max; ++j) {
    V.col(j) = v;
    Eigen::VectorXcd w = A(v);
    const double a = v.dot(w).real();
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
    }
    const double b = w.norm();
    scale = std::max(scale, std::abs(a) + b);

    const int m = j + 1;
    Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      Tm(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) Tm(i, i + 1) = Tm(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
    const Eigen::Index pick = which == Extreme::smallest ? 0 : m - 1;
    const double theta = es.eigenvalues()[pick];
    const Eigen::VectorXd y = es.eigenvectors().col(pick);
    const double resid = b * std::abs(y[m - 1]);
    out.value = theta;
    out.steps = m;
    out.residual = resid;
    last_y = y;
    const bool exhausted = (m == dim) || b <= 1e-14 * scale;
    if (resid <= tol * std::max(std::abs(theta), 1e-14 * scale) || exhausted) {
      out.vector = V.leftCols(m) * y.cast<std::complex<double>>();
      out.converged = true;
      return out;
    }
    beta.push_back(b);
    v = w / b;
  }
  out.vector = V.leftCols(out.steps) * last_y.cast<std::complex<double>>();
  return out;
}

}  // namespace schrocon
