#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "schrocon/grid.hpp"

namespace schrocon {

/// Open arc (a, b) of the unit circle; b - a is its length, and endpoints are
/// read modulo 1 so (0.9, 1.1) wraps through 0.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const noexcept { return b - a; }
};

enum class WindowKind { sharp, smooth };

/// Transition profile for smooth windows. `exp` is the C-infinity
/// exp(-1/x) smoothstep; `polynomial` is the C^2 quintic smoothstep.
enum class WindowProfile { exp, polynomial };

inline std::string to_string(WindowKind k) { return k == WindowKind::sharp ? "sharp" : "smooth"; }
inline std::string to_string(WindowProfile p) { return p == WindowProfile::exp ? "exp" : "polynomial"; }

/// Sampled spatial cutoff chi_omega (or the indicator 1_omega) on a grid.
/// In 2D the window is a strip omega x T: samples depend on x1 only.
struct CutoffWindow {
  GridSpec grid;
  Eigen::VectorXd samples;
  std::vector<Interval> omega;
  double transition_width = 0.0;
  WindowKind kind = WindowKind::sharp;
  WindowProfile profile = WindowProfile::exp;

  double max() const { return samples.size() ? samples.maxCoeff() : 0.0; }
  double min() const { return samples.size() ? samples.minCoeff() : 0.0; }

  /// The window with every sample squared (the chi^2 multiplier).
  CutoffWindow squared() const {
    CutoffWindow w = *this;
    w.samples = samples.array().square().matrix();
    return w;
  }
};

namespace detail {

inline double exp_smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double f0 = std::exp(-1.0 / s);
  const double f1 = std::exp(-1.0 / (1.0 - s));
  return f0 / (f0 + f1);
}

inline double poly_smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

// Window value of one arc at x: 0 outside, 1 on [a+w, b-w], smooth ramps
// inside the arc.
inline double arc_profile(double x, const Interval& iv, double width, WindowKind kind,
                          WindowProfile profile) {
  const double len = iv.length();
  if (len >= 1.0) return 1.0;
  double y = std::fmod(x - iv.a, 1.0);
  if (y < 0.0) y += 1.0;
  if (!(y > 0.0 && y < len)) return 0.0;
  if (kind == WindowKind::sharp) return 1.0;
  const double d = std::min(y, len - y) / width;
  return profile == WindowProfile::exp ? exp_smoothstep(d) : poly_smoothstep(d);
}

}  // namespace detail

/// Builds chi_omega on the grid. A smooth window is 1 on the eroded core
/// [a+w, b-w] of each arc, vanishes outside the arc, and is monotone on the
/// two ramps of width w. Several arcs combine by pointwise max.
/// An arc of length >= 1 covers the whole torus.
inline CutoffWindow make_window(const GridSpec& grid, std::vector<Interval> omega,
                                double transition_width, WindowKind kind,
                                WindowProfile profile = WindowProfile::exp) {
  if (omega.empty()) throw ValidationError("window: omega must contain at least one interval");
  double total = 0.0;
  double shortest = 1.0;
  for (const auto& iv : omega) {
    if (!std::isfinite(iv.a) || !std::isfinite(iv.b) || !(iv.length() > 0.0)) {
      throw ValidationError("window: every interval needs finite endpoints with b > a");
    }
    total += iv.length();
    shortest = std::min(shortest, iv.length());
  }
  if (total > 1.0 + 1e-12) throw ValidationError("window: total interval length exceeds 1");
  if (kind == WindowKind::smooth) {
    if (!(transition_width > 0.0)) {
      throw ValidationError("window: smooth windows need transition_width > 0");
    }
    if (shortest < 1.0 && transition_width >= 0.5 * shortest) {
      throw ValidationError("window: transition_width must be below half the shortest interval");
    }
  }

  CutoffWindow w{grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())), omega,
                 kind == WindowKind::smooth ? transition_width : 0.0, kind, profile};
  const int n = grid.modes_per_axis();
  Eigen::VectorXd line(n);
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    for (const auto& iv : omega) {
      v = std::max(v, detail::arc_profile(grid.point(j), iv, transition_width, kind, profile));
    }
    line[j] = v;
  }
  if (grid.dim() == 1) {
    w.samples = line;
  } else {
    for (int j1 = 0; j1 < n; ++j1) w.samples.segment(static_cast<Eigen::Index>(j1) * n, n).setConstant(line[j1]);
  }
  return w;
}

/// chi == value everywhere (value in [0,1]). Constants are smooth, so the
/// kind is `smooth`; the 0 and 1 windows are also valid indicators.
inline CutoffWindow constant_window(const GridSpec& grid, double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw ValidationError("constant_window: value must lie in [0,1]");
  CutoffWindow w{grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), value),
                 {}, 0.0, WindowKind::smooth, WindowProfile::exp};
  if (value > 0.0) w.omega = {Interval{0.0, 1.0}};
  return w;
}

/// Wraps arbitrary samples in [0,1] (e.g. a smooth multiplier for commutator
/// studies). In 2D the samples are taken as given.
inline CutoffWindow window_from_samples(const GridSpec& grid, Eigen::VectorXd samples,
                                        WindowKind kind = WindowKind::smooth) {
  if (static_cast<std::size_t>(samples.size()) != grid.size()) {
    throw ValidationError("window_from_samples: sample count does not match grid");
  }
  if (samples.size() && (samples.minCoeff() < 0.0 || samples.maxCoeff() > 1.0)) {
    throw ValidationError("window_from_samples: samples must lie in [0,1]");
  }
  return CutoffWindow{grid, std::move(samples), {}, 0.0, kind, WindowProfile::exp};
}

}  // namespace schrocon
