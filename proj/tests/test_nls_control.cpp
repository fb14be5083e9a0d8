#include <gtest/gtest.h>

#include <random>

#include "schrocon/nls_control.hpp"
#include "schrocon/random_state.hpp"

using namespace schrocon;

namespace {

const GridSpec kGrid = make_grid(1, 32);

CutoffWindow arc() { return make_window(kGrid, {{0.0, 0.3}}, 0.05, WindowKind::smooth); }

const Gramian& gramian() {
  static const Gramian G(make_gramian_spec(1.0, arc()));
  return G;
}

FourierState smooth_state(double norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return with_norm(random_state(kGrid, rng, SpectralEnvelope::gaussian(2.0)), norm);
}

}  // namespace

TEST(ControlledFlow, LinearCaseMatchesImpulseDrive) {
  const Gramian& G = gramian();
  const FourierState u0 = smooth_state(1.0, 1);
  const FourierState phi = smooth_state(0.5, 2);
  const FourierState a = integrate_controlled(u0, KickSchedule::hum(G, phi), 0.0, 1e-3);
  const FourierState b = drive_linear(u0, G, phi).final_state;
  EXPECT_LT((a - b).l2_norm(), 1e-12);
}

TEST(ControlledFlow, BackwardRunInvertsForwardRun) {
  const Gramian& G = gramian();
  const FourierState u0 = smooth_state(0.3, 3);
  const KickSchedule k = KickSchedule::hum(G, smooth_state(0.2, 4));
  for (double sigma : {-1.0, 1.0}) {
    const FourierState uT = integrate_controlled(u0, k, sigma, 1e-3);
    const FourierState back = integrate_controlled(uT, k, sigma, 1e-3, /*backward=*/true);
    EXPECT_LT((back - u0).l2_norm(), 1e-12);
  }
}

TEST(ControlledFlow, ReversedConjugateScheduleRetracesTheRun) {
  const Gramian& G = gramian();
  const FourierState u0 = smooth_state(0.3, 5);
  const KickSchedule k = KickSchedule::hum(G, smooth_state(0.2, 6));
  const FourierState uT = integrate_controlled(u0, k, -1.0, 1e-3);
  const FourierState w = integrate_controlled(conjugate(uT), k.reversed_conjugate(), -1.0, 1e-3);
  EXPECT_LT((conjugate(w) - u0).l2_norm(), 1e-12);
}

TEST(LocalControl, ZeroDataConvergesImmediately) {
  const LocalControlResult r = local_control_nls(FourierState::zeros(kGrid), gramian(), -1.0, 1e-10, 5);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.phi0.l2_norm(), 0.0);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_TRUE(std::isnan(r.contraction_ratio));
}

TEST(LocalControl, LinearProblemReducesToHum) {
  const FourierState u0 = smooth_state(1.0, 7);
  const LocalControlResult r = local_control_nls(u0, gramian(), 0.0, 1e-10, 10);
  const ControlSolution hum = solve_hum(gramian(), u0, SolverOptions{1e-12, 500});
  EXPECT_LE(r.iterations, 3);
  EXPECT_LT((r.phi0 - hum.phi0).l2_norm(), 1e-9 * hum.phi0.l2_norm());
  EXPECT_LT(r.residual, 1e-8);
}

TEST(LocalControl, SmallDataIsSteeredToRest) {
  for (double sigma : {-1.0, 1.0}) {
    const FourierState u0 = smooth_state(0.05, 8);
    const LocalControlResult r = local_control_nls(u0, gramian(), sigma, 1e-10, 40);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.certified);
    EXPECT_LE(r.residual, 1e-8 * u0.l2_norm());
    EXPECT_LT(r.contraction_ratio, 0.5);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LT(r.history[i], r.history[i - 1]);
  }
}

TEST(LocalControl, LargeDataFailsLoudly) {
  const FourierState u0 = smooth_state(20.0, 9);
  EXPECT_THROW(local_control_nls(u0, gramian(), -1.0, 1e-10, 30), NumericalError);
}

TEST(LocalControl, InputValidation) {
  const FourierState u0 = smooth_state(0.1, 10);
  EXPECT_THROW(local_control_nls(u0, gramian(), -1.0, 0.0, 10), ValidationError);
  EXPECT_THROW(local_control_nls(u0, gramian(), -1.0, 1e-8, 0), ValidationError);
  EXPECT_THROW(local_control_nls(FourierState::zeros(make_grid(1, 16)), gramian(), -1.0, 1e-8, 10), ValidationError);
}

TEST(AdmissibleAmplitude, ScanStopsAtFirstFailure) {
  AmplitudeScanOptions scan;
  scan.start = 0.2;
  scan.factor = 2.0;
  scan.max_amplitude = 64.0;
  const AdmissibleAmplitude a = admissible_amplitude(gramian(), -1.0, smooth_state(1.0, 11), scan);
  ASSERT_GE(a.scan.size(), 2u);
  EXPECT_FALSE(a.scan.back().converged);
  for (std::size_t i = 0; i + 1 < a.scan.size(); ++i) {
    EXPECT_TRUE(a.scan[i].converged);
    EXPECT_NEAR(a.scan[i + 1].amplitude / a.scan[i].amplitude, 2.0, 1e-12);
  }
  EXPECT_EQ(a.delta, a.scan[a.scan.size() - 2].amplitude);
  EXPECT_THROW(admissible_amplitude(gramian(), -1.0, FourierState::zeros(kGrid)), ValidationError);
}

TEST(GlobalControl, TrivialEndpointsGiveEmptySchedule) {
  const ControlSchedule s =
      global_control(FourierState::zeros(kGrid), FourierState::zeros(kGrid), gramian(), -1.0, arc(), 0.2, 1e-10);
  EXPECT_TRUE(s.phases.empty());
  EXPECT_EQ(s.forward_error, 0.0);
  EXPECT_EQ(s.reverse_error, 0.0);
  EXPECT_EQ(s.total_time, 0.0);
}

TEST(GlobalControl, SmallDataSkipsDamping) {
  const FourierState u0 = smooth_state(0.05, 12);
  const ControlSchedule s = global_control(u0, FourierState::zeros(kGrid), gramian(), -1.0, arc(), 0.2, 1e-10);
  ASSERT_EQ(s.phases.size(), 1u);
  EXPECT_EQ(s.phases[0].type, PhaseType::control);
  EXPECT_EQ(s.forward_leg_phases, 1u);
  EXPECT_LE(s.forward_error, 1e-8);
  EXPECT_DOUBLE_EQ(s.total_time, 1.0);
}

TEST(GlobalControl, DampThenControlThenReverse) {
  const FourierState u0 = smooth_state(0.5, 13);
  const FourierState u1 = smooth_state(0.3, 14);
  const ControlSchedule s = global_control(u0, u1, gramian(), -1.0, arc(), 0.2, 1e-10);
  ASSERT_EQ(s.phases.size(), 4u);
  EXPECT_EQ(s.forward_leg_phases, 2u);
  EXPECT_EQ(s.phases[0].type, PhaseType::damped);
  EXPECT_EQ(s.phases[0].damping_sign, 1.0);
  EXPECT_EQ(s.phases[1].type, PhaseType::control);
  EXPECT_FALSE(s.phases[1].reversed_conjugate);
  EXPECT_EQ(s.phases[2].type, PhaseType::control);
  EXPECT_TRUE(s.phases[2].reversed_conjugate);
  EXPECT_EQ(s.phases[3].type, PhaseType::damped);
  EXPECT_EQ(s.phases[3].damping_sign, -1.0);
  for (std::size_t i = 1; i < s.phases.size(); ++i) EXPECT_DOUBLE_EQ(s.phases[i].t_start, s.phases[i - 1].t_end);
  EXPECT_DOUBLE_EQ(s.total_time, s.phases.back().t_end);
  EXPECT_LE(s.forward_error, 1e-8);
  EXPECT_LE(s.reverse_error, 1e-8);
  EXPECT_THROW(global_control(u0, u1, gramian(), -1.0, arc(), 0.0, 1e-10), ValidationError);
}
