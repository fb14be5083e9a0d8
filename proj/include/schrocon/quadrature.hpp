#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "schrocon/errors.hpp"

namespace schrocon {

enum class QuadRule { trapezoid, gauss_legendre };

inline std::string to_string(QuadRule r) {
  return r == QuadRule::trapezoid ? "trapezoid" : "gauss-legendre";
}

inline QuadRule parse_quad_rule(const std::string& s) {
  if (s == "trapezoid") return QuadRule::trapezoid;
  if (s == "gauss-legendre" || s == "gauss_legendre") return QuadRule::gauss_legendre;
  throw ValidationError("unknown quadrature rule '" + s + "'");
}

struct TimeQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term recurrence. Nodes ascend.
inline TimeQuadrature gauss_legendre_reference(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: need at least one node");
  TimeQuadrature q;
  q.nodes.assign(static_cast<std::size_t>(n), 0.0);
  q.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[static_cast<std::size_t>(i)] = -x;
    q.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    q.weights[static_cast<std::size_t>(i)] = w;
    q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) q.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return q;
}

/// Nodes per Gauss-Legendre panel in composite rules.
inline constexpr int kGaussPanelOrder = 32;

/// Quadrature on [0, T] with about n nodes.
///  - trapezoid: n equispaced nodes including both endpoints.
///  - gauss-legendre: n <= 32 gives a single n-point rule; larger n is a
///    composite rule of 32-point panels (n rounded up to a multiple of 32).
inline TimeQuadrature make_time_quadrature(QuadRule rule, int n, double T) {
  if (!(T > 0.0)) throw ValidationError("quadrature: horizon must be positive");
  if (n < 2) throw ValidationError("quadrature: need at least 2 nodes");
  TimeQuadrature q;
  if (rule == QuadRule::trapezoid) {
    const double h = T / (n - 1);
    for (int j = 0; j < n; ++j) {
      q.nodes.push_back(j == n - 1 ? T : j * h);
      q.weights.push_back((j == 0 || j == n - 1) ? 0.5 * h : h);
    }
    return q;
  }
  const int order = n <= kGaussPanelOrder ? n : kGaussPanelOrder;
  const int panels = (n + order - 1) / order;
  const TimeQuadrature ref = gauss_legendre_reference(order);
  const double width = T / panels;
  q.nodes.reserve(static_cast<std::size_t>(panels * order));
  q.weights.reserve(static_cast<std::size_t>(panels * order));
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    for (int j = 0; j < order; ++j) {
      q.nodes.push_back(a + 0.5 * width * (ref.nodes[static_cast<std::size_t>(j)] + 1.0));
      q.weights.push_back(0.5 * width * ref.weights[static_cast<std::size_t>(j)]);
    }
  }
  return q;
}

}  // namespace schrocon
