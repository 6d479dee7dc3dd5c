#pragma once

// Configurations, the neighbor relation, the synchronous mass-center update
// and the simulation loop with monitor hooks.

#include "hk/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hk {

template <Scalar S>
using Point = std::vector<S>;

template <Scalar S>
struct Configuration {
  std::vector<Point<S>> positions;
  std::size_t dim = 1;
  std::size_t time = 0;

  Configuration() = default;
  Configuration(std::vector<Point<S>> pos, std::size_t d, std::size_t t = 0)
      : positions(std::move(pos)), dim(d), time(t) {
    validate();
  }

  static Configuration line(const std::vector<S>& xs, std::size_t t = 0) {
    std::vector<Point<S>> pos;
    pos.reserve(xs.size());
    for (const auto& x : xs) pos.push_back(Point<S>{x});
    return Configuration(std::move(pos), 1, t);
  }

  std::size_t size() const { return positions.size(); }

  // 1D coordinate of agent i.
  const S& x(std::size_t i) const { return positions[i][0]; }

  void validate() const {
    if (positions.empty()) throw std::invalid_argument("configuration needs at least one agent");
    if (dim == 0) throw std::invalid_argument("dimension must be positive");
    for (const auto& p : positions)
      if (p.size() != dim) throw std::invalid_argument("point dimension does not match configuration");
  }

  void require_agent(std::size_t i) const {
    if (i >= size())
      throw std::out_of_range("agent index " + std::to_string(i) + " out of range (n = " +
                              std::to_string(size()) + ")");
  }

  bool operator==(const Configuration&) const = default;
};

struct SimParams {
  NumericMode mode = NumericMode::float64;
  double neighbor_eps = 1e-9;  // added to the squared-distance threshold
  double conv_tol = 1e-12;     // fixed-point slack on per-agent displacement
  double merge_tol = 1e-9;     // coincidence test
  std::optional<std::size_t> max_steps;  // unset: default_max_steps(n, d)
  std::vector<std::string> monitors;
  bool stop_on_failure = false;  // end the run at the first failed monitor verdict

  static SimParams exact() {
    SimParams p;
    p.mode = NumericMode::exact;
    p.neighbor_eps = p.conv_tol = p.merge_tol = 0.0;
    return p;
  }
  static SimParams float64() { return SimParams{}; }
  static SimParams for_mode(NumericMode m) { return m == NumericMode::exact ? exact() : float64(); }

  void validate() const {
    if (neighbor_eps < 0 || conv_tol < 0 || merge_tol < 0)
      throw std::invalid_argument("tolerances must be nonnegative");
    if (mode == NumericMode::exact && (neighbor_eps != 0 || conv_tol != 0 || merge_tol != 0))
      throw std::invalid_argument("exact mode requires zero tolerances");
    if (max_steps && *max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
  }

  template <Scalar S>
  void validate_for() const {
    validate();
    if (mode != ScalarTraits<S>::mode)
      throw std::invalid_argument("SimParams mode does not match the scalar type");
  }
};

// 2(n + 2n^3) + 2 for the line, n^4 d^2 otherwise.
inline std::size_t default_max_steps(std::size_t n, std::size_t d) {
  if (d == 1) return 2 * (n + 2 * n * n * n) + 2;
  return n * n * n * n * d * d;
}

inline std::size_t resolved_max_steps(const SimParams& p, std::size_t n, std::size_t d) {
  return p.max_steps ? *p.max_steps : default_max_steps(n, d);
}

// Outcome recorded by a monitor for one step (or for the whole run).
struct Verdict {
  bool ok = true;
  std::string kind;
  std::string detail;

  bool operator==(const Verdict&) const = default;
};

using Outcomes = std::map<std::string, Verdict>;

using AgentPair = std::pair<std::size_t, std::size_t>;

template <Scalar S>
struct StepReport {
  std::size_t time = 0;      // time of `config`, i.e. the state after this step
  Configuration<S> config;
  // Squared per-agent displacements keep exact mode root-free.
  std::vector<S> sq_displacements;
  S max_sq_displacement{};
  std::vector<AgentPair> merge_events;
  std::optional<S> potential;
  Outcomes monitor_outcomes;
  std::size_t max_bits = 0;

  double max_displacement() const { return std::sqrt(to_double(max_sq_displacement)); }
};

template <Scalar S>
struct Trajectory {
  Configuration<S> initial;
  std::vector<StepReport<S>> steps;
  Configuration<S> final;
  std::optional<std::size_t> converged_at;
  std::size_t max_steps = 0;
  bool aborted = false;  // stopped early on a failed monitor (stop_on_failure)
  Outcomes final_outcomes;

  std::size_t start_time() const { return initial.time; }
  std::size_t end_time() const { return initial.time + steps.size(); }
  bool budget_exhausted() const { return !converged_at && !aborted; }

  // Whether the positions at time t are known. A converged trajectory is a
  // fixed point from converged_at onwards, so it covers every later time.
  bool covers(std::size_t t) const {
    return t >= start_time() && (t <= end_time() || converged_at.has_value());
  }

  // Valid during simulation as well as afterwards.
  const Configuration<S>& config_at(std::size_t t) const {
    if (!covers(t)) throw std::out_of_range("trajectory does not cover t = " + std::to_string(t));
    if (t == start_time()) return initial;
    if (t > end_time()) return steps.empty() ? initial : steps.back().config;
    return steps[t - start_time() - 1].config;
  }

  std::size_t monitor_failures() const {
    std::size_t count = 0;
    for (const auto& s : steps)
      for (const auto& [name, v] : s.monitor_outcomes) count += v.ok ? 0 : 1;
    for (const auto& [name, v] : final_outcomes) count += v.ok ? 0 : 1;
    return count;
  }

  std::size_t max_bits() const {
    std::size_t b = 0;
    for (const auto& s : steps) b = std::max(b, s.max_bits);
    return b;
  }
};

// --- tolerance-aware comparisons -----------------------------------------

template <Scalar S>
bool coincident(const Point<S>& a, const Point<S>& b, const SimParams& p) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
    return sq <= p.merge_tol * p.merge_tol;
  }
}

template <Scalar S>
S squared_distance(const Point<S>& a, const Point<S>& b) {
  S sq = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    S diff = a[k] - b[k];
    sq += diff * diff;
  }
  return sq;
}

// Closed unit ball test on squared distance (ties count as neighbors).
template <Scalar S>
bool within_unit(const Point<S>& a, const Point<S>& b, const SimParams& p) {
  if constexpr (is_exact_v<S>) {
    if (a.size() == 1) {
      S diff = a[0] - b[0];
      return diff <= 1 && diff >= -1;
    }
    return squared_distance(a, b) <= 1;
  } else {
    return squared_distance(a, b) <= 1.0 + p.neighbor_eps;
  }
}

// Adjacency lists, each sorted ascending and containing the agent itself.
using NeighborGraph = std::vector<std::vector<std::size_t>>;

template <Scalar S>
NeighborGraph neighbor_graph(const Configuration<S>& c, const SimParams& p) {
  const std::size_t n = c.size();
  NeighborGraph g(n);
  for (std::size_t i = 0; i < n; ++i) g[i].push_back(i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (within_unit(c.positions[i], c.positions[j], p)) {
        g[i].push_back(j);
        g[j].push_back(i);
      }
  for (auto& adj : g) std::sort(adj.begin(), adj.end());
  return g;
}

template <Scalar S>
std::vector<std::size_t> neighbors(const Configuration<S>& c, std::size_t i, const SimParams& p) {
  c.require_agent(i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j == i || within_unit(c.positions[i], c.positions[j], p)) out.push_back(j);
  return out;
}

// Number of agents located at x (exactly, or within merge_tol in float mode).
template <Scalar S>
std::size_t weight(const Configuration<S>& c, const Point<S>& x, const SimParams& p) {
  if (x.size() != c.dim) throw std::invalid_argument("weight query has wrong dimension");
  std::size_t w = 0;
  for (const auto& pos : c.positions) w += coincident(pos, x, p) ? 1 : 0;
  return w;
}

template <Scalar S>
std::size_t agent_weight(const Configuration<S>& c, std::size_t i, const SimParams& p) {
  return weight(c, c.positions[i], p);
}

namespace detail {

// Every agent moves to the mean of its adjacency list, read against `c`.
template <Scalar S>
Configuration<S> mean_update(const Configuration<S>& c, const NeighborGraph& g) {
  Configuration<S> next;
  next.dim = c.dim;
  next.time = c.time + 1;
  next.positions.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    Point<S> sum(c.dim, S(0));
    for (std::size_t j : g[i])
      for (std::size_t k = 0; k < c.dim; ++k) sum[k] += c.positions[j][k];
    const S count = S(static_cast<long>(g[i].size()));
    for (auto& v : sum) v /= count;
    next.positions[i] = std::move(sum);
  }
  return next;
}

}  // namespace detail

// Displacements, merge events and bit sizes for a transition before -> after.
template <Scalar S>
StepReport<S> describe_step(const Configuration<S>& before, Configuration<S> after,
                            const SimParams& p) {
  if (before.size() != after.size() || before.dim != after.dim)
    throw std::invalid_argument("configurations of mismatched size");
  StepReport<S> r;
  r.time = after.time;
  const std::size_t n = before.size();
  r.sq_displacements.resize(n);
  r.max_sq_displacement = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r.sq_displacements[i] = squared_distance(before.positions[i], after.positions[i]);
    if (r.sq_displacements[i] > r.max_sq_displacement) r.max_sq_displacement = r.sq_displacements[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!coincident(before.positions[i], before.positions[j], p) &&
          coincident(after.positions[i], after.positions[j], p))
        r.merge_events.emplace_back(i, j);
  if constexpr (is_exact_v<S>) {
    for (const auto& pos : after.positions)
      for (const auto& v : pos) r.max_bits = std::max(r.max_bits, ScalarTraits<S>::bit_size(v));
  }
  r.config = std::move(after);
  return r;
}

// One synchronous application of the mass-center rule.
template <Scalar S>
std::pair<Configuration<S>, StepReport<S>> step(const Configuration<S>& c, const SimParams& p) {
  c.validate();
  auto next = detail::mean_update(c, neighbor_graph(c, p));
  auto report = describe_step(c, next, p);
  return {std::move(next), std::move(report)};
}

// True when no displacement in the report exceeds conv_tol (exactly zero in
// exact mode).
template <Scalar S>
bool is_fixed_step(const StepReport<S>& r, const SimParams& p) {
  if constexpr (is_exact_v<S>) {
    return r.max_sq_displacement == 0;
  } else {
    return r.max_sq_displacement <= p.conv_tol * p.conv_tol;
  }
}

template <Scalar S>
bool is_converged(const Configuration<S>& c, const SimParams& p) {
  return is_fixed_step(step(c, p).second, p);
}

// Observes a simulation between steps. on_step is called right after the
// newest StepReport has been appended to the trajectory; the returned
// verdict (if any) is stored under name() in that report. A monitor may also
// annotate traj.steps.back() directly but must not touch anything else.
template <Scalar S>
class Monitor {
 public:
  virtual ~Monitor() = default;
  virtual std::string name() const = 0;
  virtual void on_start(const Trajectory<S>&) {}
  virtual std::optional<Verdict> on_step(Trajectory<S>& traj) = 0;
  // Called once after the loop; the verdict lands in traj.final_outcomes.
  virtual std::optional<Verdict> on_finish(const Trajectory<S>&) { return std::nullopt; }
};

template <Scalar S>
using MonitorList = std::vector<std::unique_ptr<Monitor<S>>>;

// Iterates `rule` from `initial` until a fixed point or the step budget.
// converged_at is the first time t whose one-step lookahead moves no agent;
// that lookahead step is not recorded.
template <Scalar S, class StepRule>
Trajectory<S> simulate_with(const Configuration<S>& initial, const SimParams& p, StepRule&& rule,
                            MonitorList<S>* monitors = nullptr) {
  p.validate_for<S>();
  initial.validate();
  Trajectory<S> traj;
  traj.initial = initial;
  traj.max_steps = resolved_max_steps(p, initial.size(), initial.dim);
  if (monitors)
    for (auto& m : *monitors) m->on_start(traj);

  Configuration<S> current = initial;
  for (std::size_t taken = 0;; ++taken) {
    auto [next, report] = rule(current, p);
    if (is_fixed_step(report, p)) {
      traj.converged_at = current.time;
      break;
    }
    if (taken == traj.max_steps) break;
    traj.steps.push_back(std::move(report));
    bool failed = false;
    if (monitors)
      for (auto& m : *monitors)
        if (auto v = m->on_step(traj)) {
          failed |= !v->ok;
          traj.steps.back().monitor_outcomes[m->name()] = std::move(*v);
        }
    current = std::move(next);
    if (failed && p.stop_on_failure) {
      traj.aborted = true;
      break;
    }
  }
  traj.final = std::move(current);
  if (monitors)
    for (auto& m : *monitors)
      if (auto v = m->on_finish(traj)) traj.final_outcomes[m->name()] = std::move(*v);
  return traj;
}

template <Scalar S>
Trajectory<S> simulate(const Configuration<S>& initial, const SimParams& p,
                       MonitorList<S>* monitors = nullptr) {
  return simulate_with(initial, p,
                       [](const Configuration<S>& c, const SimParams& q) { return step(c, q); },
                       monitors);
}

// --- core monitors ----------------------------------------------------------

// j in N_i iff i in N_j.
template <Scalar S>
class SymmetryMonitor final : public Monitor<S> {
 public:
  explicit SymmetryMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "symmetry"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& before = traj.config_at(traj.steps.back().time - 1);
    const std::size_t n = before.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (within_unit(before.positions[i], before.positions[j], p_) !=
            within_unit(before.positions[j], before.positions[i], p_))
          return Verdict{false, "asymmetric",
                         "agents " + std::to_string(i) + "," + std::to_string(j)};
    return Verdict{true, "symmetric", {}};
  }

 private:
  SimParams p_;
};

// Coincident agents stay coincident, so no agent's weight ever drops.
template <Scalar S>
class WeightMonitor final : public Monitor<S> {
 public:
  explicit WeightMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "weight"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& report = traj.steps.back();
    const auto& before = traj.config_at(report.time - 1);
    const auto& after = report.config;
    const std::size_t n = before.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coincident(before.positions[i], before.positions[j], p_) &&
            !coincident(after.positions[i], after.positions[j], p_))
          return Verdict{false, "split",
                         "agents " + std::to_string(i) + "," + std::to_string(j) + " separated"};
    return Verdict{true, "monotone", {}};
  }

 private:
  SimParams p_;
};

// Each new position lies in the bounding box of the old neighbor positions.
template <Scalar S>
class ContainmentMonitor final : public Monitor<S> {
 public:
  explicit ContainmentMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "containment"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& report = traj.steps.back();
    const auto& before = traj.config_at(report.time - 1);
    const auto g = neighbor_graph(before, p_);
    const S slack = S(ScalarTraits<S>::from_double(p_.merge_tol));
    for (std::size_t i = 0; i < before.size(); ++i)
      for (std::size_t k = 0; k < before.dim; ++k) {
        S lo = before.positions[g[i][0]][k];
        S hi = lo;
        for (std::size_t j : g[i]) {
          lo = std::min(lo, before.positions[j][k]);
          hi = std::max(hi, before.positions[j][k]);
        }
        const S& v = report.config.positions[i][k];
        if (v < lo - slack || v > hi + slack)
          return Verdict{false, "outside_hull", "agent " + std::to_string(i)};
      }
    return Verdict{true, "contained", {}};
  }

 private:
  SimParams p_;
};

}  // namespace hk
