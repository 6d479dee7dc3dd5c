#include "hk/instances.hpp"
#include "hk/one_dim.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hk {
namespace {

using Q = Rational;
using Idx = std::vector<std::size_t>;
const SimParams kExact = SimParams::exact();

Configuration<Q> line(std::initializer_list<Q> xs) { return Configuration<Q>::line(xs); }

TEST(SortedOrder, ByPositionThenIndex) {
  EXPECT_EQ(sorted_order(line({Q(2), Q(0), Q(1)})), (Idx{1, 2, 0}));
  EXPECT_EQ(sorted_order(line({Q(0), Q(0), Q(1)})), (Idx{0, 1, 2}));
  EXPECT_EQ(sorted_order(line({Q(1), Q(0), Q(0)})), (Idx{1, 2, 0}));
}

TEST(SortedOrder, WrongDimension) {
  const Configuration<Q> c({{Q(0), Q(0)}}, 2);
  EXPECT_THROW(sorted_order(c), std::invalid_argument);
  EXPECT_THROW(is_frozen(c, 0, kExact), std::invalid_argument);
  EXPECT_THROW(leftmost_active(c, kExact), std::invalid_argument);
  EXPECT_THROW(decompose(c, kExact), std::invalid_argument);
}

TEST(SortedOrder, StableAlongTrajectories) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    const auto traj = simulate(random_interval<Q>(n, static_cast<double>(n), rng()), kExact);
    const auto order0 = sorted_order(traj.initial);
    for (std::size_t t = 1; t <= traj.end_time(); ++t) {
      const auto& c = traj.config_at(t);
      for (std::size_t k = 0; k + 1 < n; ++k) EXPECT_LE(c.x(order0[k]), c.x(order0[k + 1]));
    }
  }
}

TEST(IsFrozen, Examples) {
  const auto far = line({Q(0), Q(2)});
  EXPECT_TRUE(is_frozen(far, 0, kExact));
  EXPECT_TRUE(is_frozen(far, 1, kExact));
  const auto near = line({Q(0), Q(1, 2)});
  EXPECT_FALSE(is_frozen(near, 0, kExact));
  EXPECT_FALSE(is_frozen(near, 1, kExact));
  const auto pair = line({Q(0), Q(0), Q(2)});
  EXPECT_TRUE(is_frozen(pair, 0, kExact));
  EXPECT_TRUE(is_frozen(pair, 1, kExact));
}

TEST(LeftmostActive, Examples) {
  EXPECT_EQ(leftmost_active(line({Q(0), Q(1), Q(2)}), kExact), std::optional<std::size_t>(0));
  EXPECT_EQ(leftmost_active(line({Q(0), Q(0), Q(2), Q(5, 2)}), kExact),
            std::optional<std::size_t>(2));
  EXPECT_EQ(leftmost_active(line({Q(0), Q(0), Q(3)}), kExact), std::nullopt);
}

TEST(LeftmostActive, AbsentExactlyWhenConverged) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto traj = simulate(random_interval<Q>(n, static_cast<double>(n), rng()), kExact);
    for (std::size_t t = 0; t <= traj.end_time(); ++t) {
      const auto& c = traj.config_at(t);
      EXPECT_EQ(leftmost_active(c, kExact).has_value(), !is_converged(c, kExact));
    }
  }
}

TEST(Decompose, Examples) {
  EXPECT_EQ(decompose(line({Q(0), Q(1, 2), Q(2)}), kExact).blocks,
            (std::vector<Idx>{{0, 1}, {2}}));
  EXPECT_EQ(decompose(line({Q(0), Q(1), Q(2)}), kExact).blocks, (std::vector<Idx>{{0, 1, 2}}));
}

// Simulating the whole system equals simulating each block on its own.
TEST(Decompose, BlocksEvolveIndependently) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 14;
    const auto c = random_interval<Q>(n, 1.5 * static_cast<double>(n), rng());
    const auto whole = simulate(c, kExact);
    for (const auto& block : decompose(c, kExact).blocks) {
      const auto part = simulate(restrict_to(c, block), kExact);
      for (std::size_t t = 0; t <= std::max(whole.end_time(), part.end_time()); ++t)
        for (std::size_t k = 0; k < block.size(); ++k)
          EXPECT_EQ(part.config_at(t).x(k), whole.config_at(t).x(block[k]));
    }
  }
}

TEST(LeftmoveCertificate, PairMovesRightByHalf) {
  const auto traj = simulate(line({Q(0), Q(1)}), kExact);
  const auto v = leftmove_certificate(traj, 0, kExact);
  EXPECT_EQ(v.ell, 0u);
  EXPECT_EQ(v.moved_amount, Q(1, 2));
  EXPECT_TRUE(v.holds(LeftmoveOutcome::moved_right));
  EXPECT_NE(v.outcome, LeftmoveOutcome::violated);
  EXPECT_EQ(leftmove_threshold<Q>(2), Q(1, 8));
}

TEST(LeftmoveCertificate, CollapseIncreasesWeight) {
  const auto traj = simulate(line({Q(0), Q(2, 5), Q(1, 2)}), kExact);
  ASSERT_EQ(traj.converged_at, std::optional<std::size_t>(1));
  const auto v = leftmove_certificate(traj, 0, kExact);
  EXPECT_TRUE(v.holds(LeftmoveOutcome::weight_increased));
  EXPECT_EQ(v.outcome, LeftmoveOutcome::weight_increased);
}

TEST(LeftmoveCertificate, Errors) {
  const auto converged = simulate(line({Q(0), Q(3)}), kExact);
  EXPECT_THROW(leftmove_certificate(converged, 0, kExact), std::invalid_argument);
  auto p = kExact;
  p.max_steps = 1;
  const auto cut = simulate(unit_line<Q>(6), p);
  EXPECT_THROW(leftmove_certificate(cut, 0, p), std::out_of_range);
}

TEST(LeftmoveCertificate, NeverViolatedOnRandomExactInstances) {
  std::mt19937_64 rng(24);
  std::size_t checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    const auto traj = simulate(random_interval<Q>(n, static_cast<double>(n), rng()), kExact);
    for (std::size_t t = 0; t < *traj.converged_at; t += 2) {
      const auto v = leftmove_certificate(traj, t, kExact);
      EXPECT_NE(v.outcome, LeftmoveOutcome::violated) << "n=" << n << " t=" << t;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(ConvergenceBound, UnitLines) {
  EXPECT_EQ(line_convergence_budget(10), 4022u);
  const auto ten = simulate(unit_line<Q>(10), kExact);
  EXPECT_TRUE(convergence_bound_check(ten));
  EXPECT_EQ(ten.converged_at, std::optional<std::size_t>(10));  // brute-force regression value
  const auto one = simulate(unit_line<Q>(1), kExact);
  EXPECT_EQ(one.converged_at, std::optional<std::size_t>(0));
  EXPECT_TRUE(convergence_bound_check(one));
  auto p = kExact;
  p.max_steps = 2;
  EXPECT_FALSE(convergence_bound_check(simulate(unit_line<Q>(10), p)));
}

TEST(Monitors, AllPassOnRandomInstances) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    MonitorList<Q> mons;
    mons.push_back(std::make_unique<OrderMonitor<Q>>(kExact));
    mons.push_back(std::make_unique<GapMonitor<Q>>(kExact));
    mons.push_back(std::make_unique<LeftmostProgressMonitor<Q>>(kExact));
    mons.push_back(CertificateMonitor<Q>::homogeneous(kExact));
    const auto traj = simulate(random_interval<Q>(n, static_cast<double>(n), rng()), kExact, &mons);
    EXPECT_EQ(traj.monitor_failures(), 0u);
    // The certificate monitor visits every even non-converged time.
    const auto* cert = static_cast<CertificateMonitor<Q>*>(mons[3].get());
    EXPECT_EQ(cert->verdicts().size(), (*traj.converged_at + 1) / 2);
  }
}

TEST(Monitors, OrderMonitorFlagsASwap) {
  MonitorList<Q> mons;
  mons.push_back(std::make_unique<OrderMonitor<Q>>(kExact));
  // Swap the two agents instead of averaging.
  const auto traj = simulate_with(
      line({Q(0), Q(1)}), kExact,
      [](const Configuration<Q>& c, const SimParams& p) {
        auto next = Configuration<Q>::line({c.x(1), c.x(0)}, c.time + 1);
        auto report = describe_step(c, next, p);
        return std::pair{next, report};
      },
      &mons);
  EXPECT_GT(traj.monitor_failures(), 0u);
  EXPECT_EQ(traj.steps[0].monitor_outcomes.at("order").kind, "order_broken");
}

TEST(FloatMode, CertificateUsesSlack) {
  const auto traj = simulate(Configuration<double>::line({0.0, 0.25, 1.0, 1.8}), SimParams::float64());
  ASSERT_TRUE(traj.converged_at);
  for (std::size_t t = 0; t < *traj.converged_at; t += 2)
    EXPECT_NE(leftmove_certificate(traj, t, SimParams::float64()).outcome, LeftmoveOutcome::violated);
}

}  // namespace
}  // namespace hk
