#include "hk/analysis.hpp"
#include "hk/instances.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hk {
namespace {

using Q = Rational;
const SimParams kExact = SimParams::exact();
const SimParams kFloat = SimParams::float64();

TEST(Potential, Examples) {
  EXPECT_EQ(potential(Configuration<Q>::line({Q(0), Q(1, 2)})), Q(1, 2));
  EXPECT_EQ(potential(Configuration<Q>::line({Q(0), Q(1)})), Q(2));
  EXPECT_EQ(potential(Configuration<Q>::line({Q(0), Q(5)})), Q(2));
  EXPECT_EQ(potential(Configuration<Q>::line({Q(3)})), Q(0));
}

TEST(Potential, BoundedByPairCount) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    const std::size_t d = 1 + rng() % 3;
    const auto c = random_box<Q>(n, d, 3.0, rng());
    const Q v = potential(c);
    EXPECT_GE(v, 0);
    EXPECT_LE(v, Q(static_cast<long>(n * (n - 1))));
  }
}

TEST(PotentialDecrease, PairMergesWithZeroSlack) {
  const auto c = Configuration<Q>::line({Q(0), Q(1)});
  const auto r = potential_decrease_check(c, step(c, kExact).first);
  EXPECT_EQ(r.v_before, Q(2));
  EXPECT_EQ(r.v_after, Q(0));
  EXPECT_EQ(r.sum_sq_disp, Q(1, 2));
  EXPECT_EQ(r.slack, Q(0));
  EXPECT_TRUE(r.holds());
}

TEST(PotentialDecrease, FixedPointHasZeroSlack) {
  const auto c = Configuration<Q>::line({Q(0), Q(0), Q(3)});
  const auto r = potential_decrease_check(c, step(c, kExact).first);
  EXPECT_EQ(r.slack, Q(0));
  EXPECT_EQ(r.sum_sq_disp, Q(0));
}

TEST(PotentialDecrease, HoldsAlongRandomExactTrajectories) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    const std::size_t d = 1 + rng() % 3;
    MonitorList<Q> mons;
    mons.push_back(std::make_unique<PotentialMonitor<Q>>());
    auto p = kExact;
    p.max_steps = 40;
    const auto traj = simulate(random_box<Q>(n, d, 2.0, rng()), p, &mons);
    EXPECT_EQ(traj.monitor_failures(), 0u) << "n=" << n << " d=" << d;
    for (const auto& s : traj.steps) EXPECT_TRUE(s.potential.has_value());
  }
}

TEST(PotentialDecrease, HoldsInFloatModeWithSlack) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    const std::size_t d = 1 + rng() % 3;
    MonitorList<double> mons;
    mons.push_back(std::make_unique<PotentialMonitor<double>>());
    const auto traj = simulate(random_box<double>(n, d, 3.0, rng()), kFloat, &mons);
    EXPECT_EQ(traj.monitor_failures(), 0u);
  }
}

TEST(PotentialDecrease, MismatchedSizes) {
  EXPECT_THROW(potential_decrease_check(Configuration<Q>::line({Q(0)}),
                                        Configuration<Q>::line({Q(0), Q(1)})),
               std::invalid_argument);
}

TEST(GoodDirection, HorizontalPair) {
  const Configuration<double> c({{0.0, 0.0}, {1.0, 0.0}}, 2);
  const auto r = good_direction(c, 2000, 7, kFloat);
  ASSERT_TRUE(r.defined);
  EXPECT_GT(r.margin, 0.999);
  EXPECT_LE(r.margin, 1.0 + 1e-12);
  EXPECT_NEAR(r.normalized_margin, r.margin * 8.0, 1e-12);
}

TEST(GoodDirection, CollinearPoints) {
  const Configuration<double> c({{0.0, 0.0}, {1.0, 0.0}, {2.5, 0.0}}, 2);
  EXPECT_GT(good_direction(c, 2000, 8, kFloat).margin, 0.999);
}

TEST(GoodDirection, UndefinedWhenAllCoincide) {
  const Configuration<double> c({{1.0, 1.0}, {1.0, 1.0}}, 2);
  EXPECT_FALSE(good_direction(c, 100, 9, kFloat).defined);
  EXPECT_THROW(good_direction(c, 0, 9, kFloat), std::invalid_argument);
}

TEST(GoodDirection, DeterministicAndUnitLength) {
  const auto c = random_box<double>(12, 3, 2.0, 5);
  const auto a = good_direction(c, 300, 11, kFloat);
  const auto b = good_direction(c, 300, 11, kFloat);
  EXPECT_EQ(a.a, b.a);
  EXPECT_EQ(a.margin, b.margin);
  double norm = 0.0;
  for (double x : a.a) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(direction_margin(a.a, unit_differences(c, kFloat)), a.margin);
}

TEST(Movefar, PairMerges) {
  const auto c = Configuration<Q>::line({Q(0), Q(1)});
  const auto v = movefar_check(c, step(c, kExact).first, 1.0, kExact);
  EXPECT_EQ(v.kind, MovefarKind::merge);
  ASSERT_TRUE(v.merged);
  EXPECT_EQ(*v.merged, (AgentPair{0, 1}));
}

TEST(Movefar, ThreeAgentsMoveFar) {
  const auto c = Configuration<Q>::line({Q(0), Q(1), Q(2)});
  const auto next = step(c, kExact).first;
  // Largest displacement is 1/2 and n^4 d = 81, so any c <= 40.5 works.
  EXPECT_EQ(movefar_check(c, next, 40.5, kExact).kind, MovefarKind::big_move);
  EXPECT_EQ(movefar_check(c, next, 40.0, kExact).kind, MovefarKind::big_move);
  EXPECT_EQ(movefar_check(c, next, 41.0, kExact).kind, MovefarKind::violated);
  EXPECT_DOUBLE_EQ(movefar_check(c, next, 1.0, kExact).displacement, 0.5);
}

TEST(Movefar, ConvergedConfigurationThrows) {
  const auto c = Configuration<Q>::line({Q(0), Q(4)});
  EXPECT_THROW(movefar_check(c, c, 1.0, kExact), std::invalid_argument);
}

TEST(Movefar, MergeStepsBoundedOnRandomInstances) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const std::size_t d = 1 + rng() % 3;
    MonitorList<double> mons;
    mons.push_back(std::make_unique<MovefarMonitor<double>>(kFloat, 1e-6));
    const auto traj = simulate(random_box<double>(n, d, 2.5, rng()), kFloat, &mons);
    const auto* m = static_cast<MovefarMonitor<double>*>(mons[0].get());
    EXPECT_LE(m->merge_steps(), n);
    EXPECT_EQ(traj.monitor_failures(), 0u);
  }
}

TEST(PolyBudget, Values) {
  EXPECT_DOUBLE_EQ(poly_step_budget(2, 1), 1024.0);
  EXPECT_DOUBLE_EQ(poly_step_budget(10, 2), 4e10);
}

}  // namespace
}  // namespace hk
