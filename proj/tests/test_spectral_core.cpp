#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "schrocon/krylov.hpp"
#include "schrocon/quadrature.hpp"
#include "schrocon/random_state.hpp"
#include "schrocon/spectral_ops.hpp"

using namespace schrocon;
using std::numbers::pi;

namespace {

// Naive synthesis u(x_j) = sum_k c_k exp(2 pi i k x_j), independent of the FFT path.
Eigen::VectorXcd naive_synthesis(const FourierState& u) {
  const GridSpec& g = u.grid();
  const int n = g.modes_per_axis();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size()));
  if (g.dim() == 1) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out[j] += u.coeffs()[i] * std::polar(1.0, 2 * pi * g.mode_of(i) * j / double(n));
    return out;
  }
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          out[j1 * n + j2] += u.coeffs()[i1 * n + i2] *
                              std::polar(1.0, 2 * pi * (g.mode_of(i1) * j1 + g.mode_of(i2) * j2) / double(n));
  return out;
}

double exp_bump_oracle(double s) {
  if (s <= 0) return 0;
  if (s >= 1) return 1;
  const double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
  return a / (a + b);
}

CutoffWindow trig_window(const GridSpec& g, const std::vector<std::pair<int, Complex>>& modes, double offset) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(g.size()));
  for (int j = 0; j < g.modes_per_axis(); ++j) {
    Complex v = offset;
    for (auto [m, c] : modes) v += c * std::polar(1.0, 2 * pi * m * g.point(j)) + std::conj(c) * std::polar(1.0, -2 * pi * m * g.point(j));
    s[j] = v.real();
  }
  return window_from_samples(g, s);
}

}  // namespace

TEST(Grid, BuildsValidGrids) {
  const GridSpec g1 = make_grid(1, 64);
  EXPECT_EQ(g1.size(), 64u);
  EXPECT_EQ(g1.min_mode(), -32);
  EXPECT_EQ(g1.max_mode(), 31);
  const GridSpec g2 = make_grid(2, 16);
  EXPECT_EQ(g2.size(), 256u);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(1, 5), ValidationError);
  EXPECT_THROW(make_grid(1, 2), ValidationError);
  EXPECT_THROW(make_grid(3, 8), ValidationError);
  EXPECT_THROW(make_grid(1, 0), ValidationError);
}

TEST(FourierState, LengthMustMatchGrid) {
  EXPECT_THROW(FourierState(make_grid(1, 8), Eigen::VectorXcd::Zero(7)), ValidationError);
  EXPECT_THROW(FourierState::plane_wave(make_grid(1, 8), 4), ValidationError);
}

TEST(Transform, MatchesNaiveDftIn1DAnd2D) {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, dim == 1 ? 16 : 8);
    const FourierState u = random_state(g, rng);
    const Eigen::VectorXcd fast = to_physical(u);
    EXPECT_LT((fast - naive_synthesis(u)).norm(), 1e-12 * fast.norm());
    const FourierState back = from_physical(g, fast);
    EXPECT_LT((back.coeffs() - u.coeffs()).norm(), 1e-13 * u.l2_norm());
  }
}

TEST(Transform, DiscretePlancherel) {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, 32);
    const FourierState u = random_state(g, rng);
    EXPECT_NEAR(physical_mass(g, to_physical(u)) / u.mass(), 1.0, 1e-12);
    EXPECT_NEAR(std::pow(sobolev_norm(u, 0.0), 2) / physical_mass(g, to_physical(u)), 1.0, 1e-12);
  }
}

TEST(FreePropagate, SingleModePhase) {
  const GridSpec g = make_grid(1, 16);
  const double t = 0.37;
  const FourierState u = free_propagate(FourierState::plane_wave(g, 1), t);
  EXPECT_NEAR(std::abs(u.mode(1) - std::polar(1.0, -4 * pi * pi * t)), 0.0, 1e-14);
  const FourierState v = free_propagate(FourierState::plane_wave(g, -3), t);
  EXPECT_NEAR(std::abs(v.mode(-3) - std::polar(1.0, -4 * pi * pi * 9 * t)), 0.0, 1e-13);
  const GridSpec g2 = make_grid(2, 8);
  const FourierState w = free_propagate(FourierState::plane_wave(g2, 1, -2, 1.0), t);
  EXPECT_NEAR(std::abs(w.mode(1, -2) - std::polar(1.0, -4 * pi * pi * 5 * t)), 0.0, 1e-13);
}

TEST(FreePropagate, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(1);
  const FourierState u = random_state(make_grid(1, 32), rng);
  EXPECT_EQ((free_propagate(u, 0.0).coeffs() - u.coeffs()).norm(), 0.0);
}

TEST(FreePropagate, BackAndForthIsIdentity) {
  std::mt19937_64 rng(2);
  const FourierState u = random_state(make_grid(1, 64), rng);
  const FourierState v = free_propagate(free_propagate(u, 3.21), -3.21);
  EXPECT_LT((v - u).l2_norm(), 1e-13 * u.l2_norm());
}

TEST(FreePropagate, UnitaryInEverySobolevNorm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> time(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const GridSpec g = make_grid(trial % 2 ? 1 : 2, trial % 2 ? 64 : 16);
    const FourierState u = random_state(g, rng);
    const FourierState v = free_propagate(u, time(rng));
    EXPECT_LE(std::abs(v.l2_norm() - u.l2_norm()), 1e-12 * u.l2_norm());
    if (trial % 50 == 0) {
      for (double s : {-1.0, 0.5, 2.0}) EXPECT_NEAR(sobolev_norm(v, s) / sobolev_norm(u, s), 1.0, 1e-12);
    }
  }
}

TEST(FreePropagate, GroupLaw) {
  // Dyadic times make s + t exact in binary, so only the propagator is tested.
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> ticks(-(1 << 22), 1 << 22);
  for (int trial = 0; trial < 200; ++trial) {
    const GridSpec g = make_grid(1, 64);
    const FourierState u = random_state(g, rng);
    const double s = ticks(rng) / double(1 << 20), t = ticks(rng) / double(1 << 20);
    const FourierState a = free_propagate(u, s + t);
    const FourierState b = free_propagate(free_propagate(u, s), t);
    EXPECT_LE((a - b).l2_norm(), 1e-12 * u.l2_norm());
  }
}

TEST(FreePropagate, NyquistSymmetrizationOption) {
  const GridSpec g = make_grid(1, 8);
  const FourierState u = FourierState::plane_wave(g, -4) + FourierState::plane_wave(g, 1);
  const FourierState v = free_propagate(u, 0.1, PropagateOptions{true});
  EXPECT_EQ(v.mode(-4), Complex(0.0, 0.0));
  EXPECT_NEAR(std::abs(v.mode(1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(free_propagate(u, 0.1).mode(-4)), 1.0, 1e-15);
}

TEST(FractionalDerivative, Examples) {
  const GridSpec g = make_grid(1, 16);
  const FourierState c = FourierState::plane_wave(g, 0, 2.5);
  for (double r : {-1.0, 0.5, 3.0}) EXPECT_EQ((fractional_derivative(c, r) - c).l2_norm(), 0.0);
  const FourierState e1 = FourierState::plane_wave(g, 1);
  EXPECT_NEAR((fractional_derivative(e1, -1.0) - e1).l2_norm(), 0.0, 1e-15);
  const FourierState em1 = FourierState::plane_wave(g, -1);
  EXPECT_NEAR((fractional_derivative(em1, 2.0) + em1).l2_norm(), 0.0, 1e-15);
  // Direct evaluation sgn(n)|n|^r at n = -3, r = 1.5.
  const FourierState e = fractional_derivative(FourierState::plane_wave(g, -3), 1.5);
  EXPECT_NEAR(e.mode(-3).real(), -std::pow(3.0, 1.5), 1e-12);
}

TEST(FractionalDerivative, ComposesToIdentityOnMeanZeroStates) {
  std::mt19937_64 rng(7);
  const GridSpec g = make_grid(1, 64);
  for (double r : {0.5, 1.0, 2.0, 3.3}) {
    FourierState u = random_state(g, rng);
    u.mode(0) = 0.0;
    const FourierState v = fractional_derivative(fractional_derivative(u, r), -r);
    EXPECT_LT((v - u).l2_norm(), 1e-12 * u.l2_norm());
  }
}

TEST(FractionalDerivative, Rejects2D) {
  EXPECT_THROW(fractional_derivative(FourierState::zeros(make_grid(2, 8)), 1.0), ValidationError);
}

TEST(SobolevNorm, Examples) {
  const GridSpec g = make_grid(1, 16);
  const FourierState e1 = FourierState::plane_wave(g, 1);
  EXPECT_NEAR(sobolev_norm(e1, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(sobolev_norm(e1, 1.0), std::sqrt(1 + 4 * pi * pi), 1e-13);
  EXPECT_EQ(sobolev_norm(FourierState::zeros(g), 2.0), 0.0);
  std::mt19937_64 rng(1);
  const FourierState u = random_state(g, rng);
  EXPECT_NEAR(sobolev_norm(u, 0.0), u.l2_norm(), 1e-13 * u.l2_norm());
}

TEST(Window, FullTorusSharpIsAllOnes) {
  const GridSpec g = make_grid(1, 32);
  const CutoffWindow w = make_window(g, {{0.0, 1.0}}, 0.0, WindowKind::sharp);
  EXPECT_EQ(w.samples.minCoeff(), 1.0);
}

TEST(Window, SharpIndicatorOnGridPoints) {
  const GridSpec g = make_grid(1, 64);
  const CutoffWindow w = make_window(g, {{0.0, 0.2}}, 0.0, WindowKind::sharp);
  for (int j = 0; j < 64; ++j) {
    const double x = j / 64.0;
    EXPECT_EQ(w.samples[j], (x > 0.0 && x < 0.2) ? 1.0 : 0.0) << "x = " << x;
  }
}

TEST(Window, SmoothProfileMatchesBumpOracle) {
  const GridSpec g = make_grid(1, 64);
  const double a = 0.0, b = 0.2, wd = 0.02;
  const CutoffWindow w = make_window(g, {{a, b}}, wd, WindowKind::smooth);
  for (int j = 0; j < 64; ++j) {
    const double x = j / 64.0;
    const double expect = (x > a && x < b) ? exp_bump_oracle(std::min(x - a, b - x) / wd) : 0.0;
    EXPECT_NEAR(w.samples[j], expect, 1e-15);
    if (x >= 0.02 && x <= 0.18) EXPECT_GE(w.samples[j], 0.5);
  }
}

TEST(Window, InvariantsAcrossConfigurations) {
  for (auto profile : {WindowProfile::exp, WindowProfile::polynomial}) {
    const GridSpec g = make_grid(1, 256);
    const std::vector<Interval> om{{0.1, 0.4}, {0.7, 1.05}};
    const double wd = 0.05;
    const CutoffWindow w = make_window(g, om, wd, WindowKind::smooth, profile);
    EXPECT_GE(w.samples.minCoeff(), 0.0);
    EXPECT_LE(w.samples.maxCoeff(), 1.0);
    for (int j = 0; j < 256; ++j) {
      const double x = g.point(j);
      for (const auto& iv : om) {
        double y = std::fmod(x - iv.a + 2.0, 1.0);
        if (y > wd && y < iv.length() - wd) EXPECT_GE(w.samples[j], 0.5);
      }
    }
    // Monotone on the rising ramp of the first arc.
    for (int j = 0; g.point(j + 1) <= 0.15; ++j)
      if (g.point(j) >= 0.1) EXPECT_LE(w.samples[j], w.samples[j + 1]);
  }
  const CutoffWindow s = make_window(make_grid(1, 64), {{0.3, 0.6}}, 0.0, WindowKind::sharp);
  for (int j = 0; j < 64; ++j) EXPECT_TRUE(s.samples[j] == 0.0 || s.samples[j] == 1.0);
}

TEST(Window, StripIn2DDependsOnFirstAxisOnly) {
  const GridSpec g = make_grid(2, 16);
  const CutoffWindow w = make_window(g, {{0.0, 0.3}}, 0.05, WindowKind::smooth);
  const CutoffWindow w1 = make_window(make_grid(1, 16), {{0.0, 0.3}}, 0.05, WindowKind::smooth);
  for (int j1 = 0; j1 < 16; ++j1)
    for (int j2 = 0; j2 < 16; ++j2) EXPECT_EQ(w.samples[j1 * 16 + j2], w1.samples[j1]);
}

TEST(Window, RejectsInvalidInput) {
  const GridSpec g = make_grid(1, 32);
  EXPECT_THROW(make_window(g, {}, 0.01, WindowKind::smooth), ValidationError);
  EXPECT_THROW(make_window(g, {{0.0, 0.2}}, 0.1, WindowKind::smooth), ValidationError);
  EXPECT_THROW(make_window(g, {{0.0, 0.2}}, 0.0, WindowKind::smooth), ValidationError);
  EXPECT_THROW(make_window(g, {{0.3, 0.2}}, 0.01, WindowKind::smooth), ValidationError);
  EXPECT_THROW(make_window(g, {{0.0, 0.6}, {0.6, 1.2}}, 0.01, WindowKind::sharp), ValidationError);
  EXPECT_THROW(constant_window(g, 1.5), ValidationError);
}

TEST(MultiplyWindow, IdentityZeroAndBound) {
  std::mt19937_64 rng(9);
  const GridSpec g = make_grid(1, 64);
  const FourierState u = random_state(g, rng);
  EXPECT_LT((multiply_window(u, constant_window(g, 1.0)) - u).l2_norm(), 1e-13 * u.l2_norm());
  // Physical support of u inside [0.5, 1), window supported in (0, 0.4).
  Eigen::VectorXcd x = to_physical(u);
  for (int j = 0; j < 32; ++j) x[j] = 0.0;
  const FourierState v = from_physical(g, x);
  const CutoffWindow w = make_window(g, {{0.0, 0.4}}, 0.05, WindowKind::smooth);
  EXPECT_LT(multiply_window(v, w).l2_norm(), 1e-14 * v.l2_norm());
  for (int trial = 0; trial < 20; ++trial) {
    const FourierState z = random_state(g, rng);
    EXPECT_LE(multiply_window(z, w).l2_norm(), w.max() * z.l2_norm() * (1 + 1e-14));
  }
  EXPECT_THROW(multiply_window(u, constant_window(make_grid(1, 32), 1.0)), ValidationError);
}

TEST(Conjugate, MatchesPhysicalConjugation) {
  std::mt19937_64 rng(4);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, 16);
    const FourierState u = random_state(g, rng);
    const Eigen::VectorXcd expect = to_physical(u).conjugate();
    EXPECT_LT((to_physical(conjugate(u)) - expect).norm(), 1e-13 * expect.norm());
  }
}

TEST(MultiplierMatrix, ReproducesPhysicalProduct) {
  std::mt19937_64 rng(8);
  for (int dim : {1, 2}) {
    const GridSpec g = make_grid(dim, dim == 1 ? 32 : 8);
    const CutoffWindow w = make_window(g, {{0.1, 0.5}}, 0.05, WindowKind::smooth);
    const FourierState u = random_state(g, rng);
    const Eigen::VectorXcd viaMatrix = multiplier_matrix(w) * u.coeffs();
    EXPECT_LT((viaMatrix - multiply_window(u, w).coeffs()).norm(), 1e-13 * u.l2_norm());
  }
}

TEST(Commutator, ConstantsCommute) {
  std::mt19937_64 rng(10);
  const GridSpec g = make_grid(1, 64);
  const FourierState u = random_state(g, rng);
  for (double r : {-1.0, 0.5, 1.0, 2.0}) {
    EXPECT_LT(commutator_apply(u, r, constant_window(g, 1.0)).l2_norm(), 1e-12 * u.l2_norm());
  }
}

TEST(Commutator, OrderZeroUnrolledDefinition) {
  std::mt19937_64 rng(13);
  const GridSpec g = make_grid(1, 32);
  const FourierState u = random_state(g, rng);
  const CutoffWindow f = make_window(g, {{0.2, 0.7}}, 0.1, WindowKind::smooth);
  // D^0 = sign multiplier with identity on mode 0, applied by hand.
  auto d0 = [&](const FourierState& v) {
    FourierState o = v;
    for (int i = 0; i < 32; ++i) {
      const int k = g.mode_of(i);
      if (k < 0) o.coeffs()[i] = -o.coeffs()[i];
    }
    return o;
  };
  const FourierState expect = d0(multiply_window(u, f)) - multiply_window(d0(u), f);
  EXPECT_LT((commutator_apply(u, 0.0, f) - expect).l2_norm(), 1e-13 * u.l2_norm());
}

TEST(Commutator, RatioBoundedOverRandomStatesAndResolutions) {
  // Random smooth f (trigonometric polynomial), inputs band-limited so that
  // f u is alias-free on every grid.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::pair<int, Complex>> modes;
  double amp = 0.0;
  for (int m = 1; m <= 3; ++m) {
    modes.push_back({m, Complex(nd(rng), nd(rng))});
    amp += 2.0 * std::abs(modes.back().second);
  }
  for (auto& [m, c] : modes) c *= 0.45 / amp;  // keeps samples within [0,1]
  double worst = 0.0;
  std::vector<double> per_n;
  for (int n : {32, 64, 128}) {
    const GridSpec g = make_grid(1, n);
    const CutoffWindow f = trig_window(g, modes, 0.5);
    std::mt19937_64 local(99);
    double mx = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      FourierState u = random_state(g, local);
      for (int i = 0; i < n; ++i)
        if (std::abs(g.mode_of(i)) > n / 2 - 4) u.coeffs()[i] = 0.0;
      mx = std::max(mx, commutator_apply(u, 1.0, f).l2_norm() / u.l2_norm());
    }
    per_n.push_back(mx);
    worst = std::max(worst, mx);
  }
  // [D, f] is bounded on L2 by sum_m |m| |f_m| (bare-integer symbol).
  double bound = 0.0;
  for (auto [m, c] : modes) bound += 2.0 * m * std::abs(c);
  EXPECT_LE(worst, bound * (1 + 1e-12));
  EXPECT_LT(*std::max_element(per_n.begin(), per_n.end()) / *std::min_element(per_n.begin(), per_n.end()), 2.0);
}

TEST(Commutator, Rejects2D) {
  const GridSpec g = make_grid(2, 8);
  EXPECT_THROW(commutator_apply(FourierState::zeros(g), 1.0, constant_window(g, 1.0)), ValidationError);
}

TEST(Quadrature, GaussLegendreReferenceNodes) {
  const TimeQuadrature q = gauss_legendre_reference(2);
  EXPECT_NEAR(q.nodes[0], -1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(q.nodes[1], 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(q.weights[0], 1.0, 1e-15);
  const TimeQuadrature q3 = gauss_legendre_reference(3);
  EXPECT_NEAR(q3.nodes[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(q3.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(Quadrature, ExactForPolynomialsUpToDegree2nMinus1) {
  for (int n : {4, 17, 32}) {
    const TimeQuadrature q = make_time_quadrature(QuadRule::gauss_legendre, n, 2.0);
    for (int deg = 0; deg <= 2 * n - 1; deg += 3) {
      double s = 0;
      for (std::size_t j = 0; j < q.size(); ++j) s += q.weights[j] * std::pow(q.nodes[j] / 2.0, deg);
      EXPECT_NEAR(s, 2.0 / (deg + 1), 1e-13) << "n=" << n << " deg=" << deg;
    }
  }
}

TEST(Quadrature, CompositeAndTrapezoidLayouts) {
  const TimeQuadrature gl = make_time_quadrature(QuadRule::gauss_legendre, 100, 3.0);
  EXPECT_EQ(gl.size(), 128u);
  double sum = 0;
  for (double w : gl.weights) sum += w;
  EXPECT_NEAR(sum, 3.0, 1e-13);
  const TimeQuadrature tr = make_time_quadrature(QuadRule::trapezoid, 11, 1.0);
  EXPECT_EQ(tr.nodes.front(), 0.0);
  EXPECT_EQ(tr.nodes.back(), 1.0);
  EXPECT_NEAR(tr.weights.front(), 0.05, 1e-15);
  EXPECT_THROW(make_time_quadrature(QuadRule::trapezoid, 1, 1.0), ValidationError);
  EXPECT_THROW(make_time_quadrature(QuadRule::gauss_legendre, 8, 0.0), ValidationError);
  EXPECT_EQ(parse_quad_rule("trapezoid"), QuadRule::trapezoid);
  EXPECT_THROW(parse_quad_rule("simpson"), ValidationError);
}

TEST(Krylov, ConjugateGradientSolvesHermitianPositiveSystem) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  const int n = 40;
  Eigen::MatrixXcd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = Complex(nd(rng), nd(rng));
  const Eigen::MatrixXcd A = B * B.adjoint() + n * Eigen::MatrixXcd::Identity(n, n);
  Eigen::VectorXcd b(n);
  for (int i = 0; i < n; ++i) b[i] = Complex(nd(rng), nd(rng));
  const CgResult r = conjugate_gradient([&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(A * v); }, b, 1e-12, 200);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((A * r.x - b).norm(), 1e-11 * b.norm());
  const CgResult z = conjugate_gradient([&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(A * v); },
                                        Eigen::VectorXcd::Zero(n), 1e-12, 200);
  EXPECT_EQ(z.iterations, 0);
  EXPECT_EQ(z.x.norm(), 0.0);
}

TEST(Krylov, LanczosExtremesMatchDenseEigensolver) {
  std::mt19937_64 rng(18);
  std::normal_distribution<double> nd;
  const int n = 60;
  Eigen::MatrixXcd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = Complex(nd(rng), nd(rng));
  const Eigen::MatrixXcd A = B * B.adjoint() + 0.01 * Eigen::MatrixXcd::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  const LinearOp op = [&](const Eigen::VectorXcd& v) { return Eigen::VectorXcd(A * v); };
  const LanczosResult lo = lanczos_extreme(op, n, Extreme::smallest);
  const LanczosResult hi = lanczos_extreme(op, n, Extreme::largest);
  EXPECT_NEAR(lo.value / es.eigenvalues()(0), 1.0, 1e-8);
  EXPECT_NEAR(hi.value / es.eigenvalues()(n - 1), 1.0, 1e-10);
  EXPECT_LT((A * lo.vector - lo.value * lo.vector).norm(), 1e-6);
}

TEST(RandomState, SeededAndResolutionConsistent) {
  std::mt19937_64 a(42), b(42), c(42);
  const FourierState u = random_state(make_grid(1, 32), a);
  const FourierState v = random_state(make_grid(1, 32), b);
  EXPECT_EQ((u - v).l2_norm(), 0.0);
  const FourierState w = random_state(make_grid(1, 64), c);
  for (int k = -15; k <= 15; ++k) EXPECT_EQ(u.mode(k), w.mode(k));
  std::mt19937_64 e(1);
  EXPECT_NEAR(sobolev_norm(with_norm(random_state(make_grid(1, 32), e), 2.0, 1.0), 1.0), 2.0, 1e-13);
}
