#pragma once

// Executable checks for the d-dimensional convergence argument: the pairwise
// potential and its quantified decrease, a projection direction that keeps
// pairwise differences away from orthogonal, and the merge / big-move
// dichotomy.

#include "hk/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace hk {

// V = sum over ordered pairs (i, j), diagonal included, of ||x_i - x_j||^2 when
// that distance is strictly below 1 and 1 otherwise.
template <Scalar S>
S potential(const Configuration<S>& c) {
  S v = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const S sq = squared_distance(c.positions[i], c.positions[j]);
      v += sq < 1 ? sq : S(1);
    }
  return v * 2;
}

template <Scalar S>
struct PotentialReport {
  S v_before{};
  S v_after{};
  S sum_sq_disp{};
  // Sum over pairs with ||x_i(t) - x_j(t)|| < 1 of ||dx_i + dx_j||^2. Logged only.
  S cross_term{};
  S slack{};  // (v_before - v_after) - 4 * sum_sq_disp

  bool holds() const {
    if constexpr (is_exact_v<S>) {
      return slack >= 0;
    } else {
      return slack >= -1e-9;
    }
  }
};

template <Scalar S>
PotentialReport<S> potential_decrease_check(const Configuration<S>& before,
                                            const Configuration<S>& after) {
  if (before.size() != after.size() || before.dim != after.dim)
    throw std::invalid_argument("configurations of mismatched size");
  PotentialReport<S> r;
  r.v_before = potential(before);
  r.v_after = potential(after);
  const std::size_t n = before.size();
  std::vector<Point<S>> delta(n, Point<S>(before.dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < before.dim; ++k)
      delta[i][k] = after.positions[i][k] - before.positions[i][k];
    r.sum_sq_disp += squared_distance(after.positions[i], before.positions[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!(squared_distance(before.positions[i], before.positions[j]) < 1)) continue;
      for (std::size_t k = 0; k < before.dim; ++k) {
        const S s = delta[i][k] + delta[j][k];
        r.cross_term += s * s;
      }
    }
  r.slack = (r.v_before - r.v_after) - r.sum_sq_disp * 4;
  return r;
}

struct DirectionReport {
  std::vector<double> a;
  double margin = std::numeric_limits<double>::quiet_NaN();
  double normalized_margin = std::numeric_limits<double>::quiet_NaN();  // margin * n^2 * d
  bool defined = false;  // false when all agents coincide
};

namespace detail {

// 53-bit uniform in [0, 1) from a 64-bit engine; portable across libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; portable, unlike std::normal_distribution.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::vector<double> random_unit_vector(std::size_t d, std::mt19937_64& rng) {
  for (;;) {
    std::vector<double> v(d);
    double norm = 0.0;
    for (auto& x : v) {
      x = standard_normal(rng);
      norm += x * x;
    }
    if (norm < 1e-24) continue;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
  }
}

}  // namespace detail

// Normalized pairwise difference vectors between agents at distinct positions.
template <Scalar S>
std::vector<std::vector<double>> unit_differences(const Configuration<S>& c, const SimParams& p) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (coincident(c.positions[i], c.positions[j], p)) continue;
      std::vector<double> d(c.dim);
      double norm = 0.0;
      for (std::size_t k = 0; k < c.dim; ++k) {
        d[k] = to_double(c.positions[i][k]) - to_double(c.positions[j][k]);
        norm += d[k] * d[k];
      }
      norm = std::sqrt(norm);
      for (auto& x : d) x /= norm;
      out.push_back(std::move(d));
    }
  return out;
}

// min over pairs of |a . d_ij|.
inline double direction_margin(const std::vector<double>& a,
                               const std::vector<std::vector<double>>& diffs) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& d : diffs) {
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * d[k];
    m = std::min(m, std::fabs(dot));
  }
  return m;
}

// Random search over `samples` uniform unit vectors for the one maximizing the
// pairwise margin. Deterministic given the seed.
template <Scalar S>
DirectionReport good_direction(const Configuration<S>& c, std::size_t samples, std::uint64_t seed,
                               const SimParams& p) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  DirectionReport best;
  const auto diffs = unit_differences(c, p);
  if (diffs.empty()) return best;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    auto a = detail::random_unit_vector(c.dim, rng);
    const double m = direction_margin(a, diffs);
    if (!best.defined || m > best.margin) {
      best.a = std::move(a);
      best.margin = m;
      best.defined = true;
    }
  }
  const double n = static_cast<double>(c.size());
  best.normalized_margin = best.margin * n * n * static_cast<double>(c.dim);
  return best;
}

enum class MovefarKind { merge, big_move, violated };

inline std::string_view to_string(MovefarKind k) {
  switch (k) {
    case MovefarKind::merge: return "merge";
    case MovefarKind::big_move: return "big_move";
    case MovefarKind::violated: return "violated";
  }
  return "?";
}

struct MovefarVerdict {
  MovefarKind kind = MovefarKind::violated;
  std::optional<AgentPair> merged;  // kind == merge
  std::size_t agent = 0;            // agent with the largest displacement
  double displacement = 0.0;
  double threshold = 0.0;  // c / (n^4 d)

  Verdict to_verdict() const {
    std::string detail = merged ? "pair " + std::to_string(merged->first) + "," +
                                      std::to_string(merged->second)
                                : "agent " + std::to_string(agent) + " moved " +
                                      std::to_string(displacement);
    return Verdict{kind != MovefarKind::violated, std::string(to_string(kind)), std::move(detail)};
  }
};

// Either two agents at distinct positions coincide after the step, or some
// agent moves by at least c / (n^4 d).
template <Scalar S>
MovefarVerdict movefar_check(const Configuration<S>& before, const Configuration<S>& after,
                             double c, const SimParams& p) {
  const auto report = describe_step(before, after, p);
  if (is_fixed_step(report, p))
    throw std::invalid_argument("movefar_check requires a configuration that has not converged");
  MovefarVerdict v;
  const double n = static_cast<double>(before.size());
  v.threshold = c / (n * n * n * n * static_cast<double>(before.dim));
  for (std::size_t i = 0; i < report.sq_displacements.size(); ++i)
    if (report.sq_displacements[i] == report.max_sq_displacement) {
      v.agent = i;
      break;
    }
  v.displacement = report.max_displacement();
  if (!report.merge_events.empty()) {
    v.kind = MovefarKind::merge;
    v.merged = report.merge_events.front();
    return v;
  }
  const long n4d = static_cast<long>(before.size() * before.size() * before.size() *
                                     before.size() * before.dim);
  const S th = ScalarTraits<S>::from_double(c) / S(n4d);
  v.kind = report.max_sq_displacement >= th * th ? MovefarKind::big_move : MovefarKind::violated;
  return v;
}

// n^10 d^2 as a double (overflows 64-bit integers for moderate n).
inline double poly_step_budget(std::size_t n, std::size_t d) {
  return std::pow(static_cast<double>(n), 10) * static_cast<double>(d * d);
}

// --- monitors ---------------------------------------------------------------

// Stores V(t+1) on each report and checks V(t) - V(t+1) >= 4 sum ||dx||^2.
template <Scalar S>
class PotentialMonitor final : public Monitor<S> {
 public:
  std::string name() const override { return "potential"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    auto& report = traj.steps.back();
    const auto r = potential_decrease_check(traj.config_at(report.time - 1), report.config);
    report.potential = r.v_after;
    reports_.push_back(r);
    return Verdict{r.holds(), r.holds() ? "decrease" : "violated",
                   "slack=" + format_scalar(r.slack)};
  }
  const std::vector<PotentialReport<S>>& reports() const { return reports_; }

 private:
  std::vector<PotentialReport<S>> reports_;
};

// Per-step merge/big-move verdicts, plus a final check that the number of
// steps containing a merge does not exceed n.
template <Scalar S>
class MovefarMonitor final : public Monitor<S> {
 public:
  MovefarMonitor(SimParams p, double c) : p_(std::move(p)), c_(c) {}
  std::string name() const override { return "movefar"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& report = traj.steps.back();
    auto v = movefar_check(traj.config_at(report.time - 1), report.config, c_, p_);
    merge_steps_ += v.kind == MovefarKind::merge ? 1 : 0;
    verdicts_.push_back(v);
    return v.to_verdict();
  }
  std::optional<Verdict> on_finish(const Trajectory<S>& traj) override {
    const bool ok = merge_steps_ <= traj.initial.size();
    return Verdict{ok, ok ? "merge_steps_bounded" : "too_many_merge_steps",
                   std::to_string(merge_steps_) + " merge steps"};
  }
  std::size_t merge_steps() const { return merge_steps_; }
  const std::vector<MovefarVerdict>& verdicts() const { return verdicts_; }

 private:
  SimParams p_;
  double c_;
  std::size_t merge_steps_ = 0;
  std::vector<MovefarVerdict> verdicts_;
};

}  // namespace hk
