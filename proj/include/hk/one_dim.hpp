#pragma once

// One-dimensional specialization: sorted order, frozen agents, the
// decomposition into non-interacting blocks, the leftmost active agent and
// its two-step progress certificate.

#include "hk/core.hpp"

#include <functional>
#include <numeric>
#include <set>

namespace hk {

template <Scalar S>
void require_line(const Configuration<S>& c) {
  if (c.dim != 1)
    throw std::invalid_argument("operation requires a one-dimensional configuration (d = " +
                                std::to_string(c.dim) + ")");
}

// Strictly left of x in float mode means by more than merge_tol.
template <Scalar S>
bool strictly_left(const S& a, const S& x, const SimParams& p) {
  if constexpr (is_exact_v<S>) {
    return a < x;
  } else {
    return a < x - p.merge_tol;
  }
}

// Agent indices sorted by position, ties broken by index.
template <Scalar S>
std::vector<std::size_t> sorted_order(const Configuration<S>& c) {
  require_line(c);
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c.x(a) < c.x(b); });
  return order;
}

// No neighbor strictly to either side: every neighbor sits at x_i.
template <Scalar S>
bool is_frozen(const Configuration<S>& c, std::size_t i, const SimParams& p) {
  require_line(c);
  c.require_agent(i);
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j != i && within_unit(c.positions[i], c.positions[j], p) &&
        !coincident(c.positions[i], c.positions[j], p))
      return false;
  return true;
}

// The leftmost non-frozen agent in sorted order; empty iff every agent is
// frozen, i.e. the system has converged.
template <Scalar S>
std::optional<std::size_t> leftmost_active(const Configuration<S>& c, const SimParams& p) {
  for (std::size_t i : sorted_order(c)) {
    if (is_frozen(c, i, p)) continue;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (within_unit(c.positions[i], c.positions[j], p) && strictly_left(c.x(j), c.x(i), p))
        throw std::logic_error("leftmost active agent has a neighbor strictly to its left");
    return i;
  }
  return std::nullopt;
}

struct Decomposition {
  std::vector<std::vector<std::size_t>> blocks;  // each in sorted order
};

// Maximal runs of the sorted order whose consecutive members are neighbors.
template <Scalar S>
Decomposition decompose(const Configuration<S>& c, const SimParams& p) {
  const auto order = sorted_order(c);
  Decomposition d;
  d.blocks.push_back({order.front()});
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!within_unit(c.positions[order[k - 1]], c.positions[order[k]], p)) d.blocks.emplace_back();
    d.blocks.back().push_back(order[k]);
  }
  return d;
}

// Sub-configuration holding the listed agents, in the listed order.
template <Scalar S>
Configuration<S> restrict_to(const Configuration<S>& c, const std::vector<std::size_t>& agents) {
  std::vector<Point<S>> pos;
  pos.reserve(agents.size());
  for (std::size_t i : agents) pos.push_back(c.positions[i]);
  return Configuration<S>(std::move(pos), c.dim, c.time);
}

enum class LeftmoveOutcome { weight_increased, froze, moved_right, early_exit, violated };

inline std::string_view to_string(LeftmoveOutcome o) {
  switch (o) {
    case LeftmoveOutcome::weight_increased: return "weight_increased";
    case LeftmoveOutcome::froze: return "froze";
    case LeftmoveOutcome::moved_right: return "moved_right";
    case LeftmoveOutcome::early_exit: return "early_exit";
    case LeftmoveOutcome::violated: return "violated";
  }
  return "?";
}

template <Scalar S>
struct LeftmoveVerdict {
  std::size_t t = 0;
  std::size_t ell = 0;
  LeftmoveOutcome outcome = LeftmoveOutcome::violated;  // first satisfied branch
  unsigned satisfied = 0;  // bit per branch that holds
  S moved_amount{};        // x_ell(t+2) - x_ell(t)

  bool holds(LeftmoveOutcome o) const { return (satisfied >> static_cast<unsigned>(o)) & 1u; }

  // Marks branch o as holding; the first one marked becomes the outcome.
  void mark(LeftmoveOutcome o, bool cond) {
    if (!cond) return;
    if (satisfied == 0) outcome = o;
    satisfied |= 1u << static_cast<unsigned>(o);
  }

  Verdict to_verdict() const {
    return Verdict{outcome != LeftmoveOutcome::violated, std::string(to_string(outcome)),
                   "t=" + std::to_string(t) + " ell=" + std::to_string(ell) +
                       " moved=" + format_scalar(moved_amount)};
  }
};

// 1/(2n^2), lowered by 1e-12 in float mode.
template <Scalar S>
S leftmove_threshold(std::size_t n) {
  S th = S(1) / S(static_cast<long>(2 * n * n));
  if constexpr (!is_exact_v<S>) th -= 1e-12;
  return th;
}

// 2(n + 2n^3) + 2: the step count by which a line of n agents has converged.
inline std::size_t line_convergence_budget(std::size_t n) { return default_max_steps(n, 1); }

// Evaluates, for the leftmost active agent ell at time t, whether by t+2 it
// gained weight, froze, or moved right by at least 1/(2n^2).
template <Scalar S>
LeftmoveVerdict<S> leftmove_certificate(const Trajectory<S>& traj, std::size_t t,
                                        const SimParams& p) {
  if (!traj.covers(t) || !traj.covers(t + 2))
    throw std::out_of_range("trajectory too short for a certificate at t = " + std::to_string(t));
  const auto& c0 = traj.config_at(t);
  const auto& c1 = traj.config_at(t + 1);
  const auto& c2 = traj.config_at(t + 2);
  require_line(c0);
  const auto ell = leftmost_active(c0, p);
  if (!ell) throw std::invalid_argument("system already converged at t = " + std::to_string(t));

  LeftmoveVerdict<S> v;
  v.t = t;
  v.ell = *ell;
  v.moved_amount = c2.x(*ell) - c0.x(*ell);
  const std::size_t w0 = agent_weight(c0, *ell, p);
  v.mark(LeftmoveOutcome::weight_increased,
         agent_weight(c1, *ell, p) > w0 || agent_weight(c2, *ell, p) > w0);
  v.mark(LeftmoveOutcome::froze, is_frozen(c1, *ell, p) || is_frozen(c2, *ell, p));
  v.mark(LeftmoveOutcome::moved_right, v.moved_amount >= leftmove_threshold<S>(c0.size()));
  return v;
}

// converged_at (relative to the start) <= 2(n + 2n^3) + 2.
template <Scalar S>
bool convergence_bound_check(const Trajectory<S>& traj) {
  require_line(traj.initial);
  if (!traj.converged_at) return false;
  return *traj.converged_at - traj.start_time() <= line_convergence_budget(traj.initial.size());
}

// --- monitors ---------------------------------------------------------------

// Runs a two-step certificate at every even time (relative to the start) at
// which the system is still active. Windows that end past a converged
// trajectory's last step are evaluated in on_finish.
template <Scalar S>
class CertificateMonitor final : public Monitor<S> {
 public:
  using Evaluator = std::function<LeftmoveVerdict<S>(const Trajectory<S>&, std::size_t)>;
  using ActiveTest = std::function<bool(const Configuration<S>&)>;

  CertificateMonitor(std::string name, Evaluator eval, ActiveTest active)
      : name_(std::move(name)), eval_(std::move(eval)), active_(std::move(active)) {}

  static std::unique_ptr<CertificateMonitor> homogeneous(const SimParams& p) {
    return std::make_unique<CertificateMonitor>(
        "leftmove",
        [p](const Trajectory<S>& tr, std::size_t t) { return leftmove_certificate(tr, t, p); },
        [p](const Configuration<S>& c) { return leftmost_active(c, p).has_value(); });
  }

  std::string name() const override { return name_; }

  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const std::size_t now = traj.steps.back().time;
    if (now < traj.start_time() + 2) return std::nullopt;
    const std::size_t t = now - 2;
    if ((t - traj.start_time()) % 2 != 0 || !active_(traj.config_at(t))) return std::nullopt;
    return record(eval_(traj, t));
  }

  std::optional<Verdict> on_finish(const Trajectory<S>& traj) override {
    if (!traj.converged_at) return std::nullopt;
    const std::size_t end = traj.end_time();
    std::optional<Verdict> out;
    for (std::size_t t = end >= traj.start_time() + 1 ? end - 1 : end; t < end; ++t) {
      if ((t - traj.start_time()) % 2 != 0 || !active_(traj.config_at(t))) continue;
      Verdict v = record(eval_(traj, t));
      if (!out || !v.ok) out = v;
    }
    return out;
  }

  const std::vector<LeftmoveVerdict<S>>& verdicts() const { return verdicts_; }
  std::size_t violations() const {
    std::size_t k = 0;
    for (const auto& v : verdicts_) k += v.outcome == LeftmoveOutcome::violated ? 1 : 0;
    return k;
  }

 private:
  Verdict record(LeftmoveVerdict<S> v) {
    Verdict out = v.to_verdict();
    verdicts_.push_back(std::move(v));
    return out;
  }

  std::string name_;
  Evaluator eval_;
  ActiveTest active_;
  std::vector<LeftmoveVerdict<S>> verdicts_;
};

// x_i(0) <= x_j(0) implies x_i(t) <= x_j(t); ties at time 0 stay tied.
template <Scalar S>
class OrderMonitor final : public Monitor<S> {
 public:
  explicit OrderMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "order"; }
  void on_start(const Trajectory<S>& traj) override {
    initial_ = traj.initial;
    order_ = sorted_order(initial_);
  }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& c = traj.steps.back().config;
    for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
      const std::size_t a = order_[k], b = order_[k + 1];
      const bool tied = initial_.x(a) == initial_.x(b);
      const bool ok = tied ? coincident(c.positions[a], c.positions[b], p_)
                           : !strictly_left(c.x(b), c.x(a), p_);
      if (!ok)
        return Verdict{false, "order_broken",
                       "agents " + std::to_string(a) + "," + std::to_string(b)};
    }
    return Verdict{true, "preserved", {}};
  }

 private:
  SimParams p_;
  Configuration<S> initial_;
  std::vector<std::size_t> order_;
};

// Once two sorted-adjacent agents are more than 1 apart they stay apart.
template <Scalar S>
class GapMonitor final : public Monitor<S> {
 public:
  explicit GapMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "gaps"; }
  void on_start(const Trajectory<S>& traj) override {
    order_ = sorted_order(traj.initial);
    open_.clear();
    collect(traj.initial);
  }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& c = traj.steps.back().config;
    for (std::size_t k : open_)
      if (within_unit(c.positions[order_[k]], c.positions[order_[k + 1]], p_))
        return Verdict{false, "gap_closed",
                       "agents " + std::to_string(order_[k]) + "," + std::to_string(order_[k + 1])};
    collect(c);
    return Verdict{true, "persistent", std::to_string(open_.size()) + " gaps"};
  }

 private:
  void collect(const Configuration<S>& c) {
    for (std::size_t k = 0; k + 1 < order_.size(); ++k)
      if (!within_unit(c.positions[order_[k]], c.positions[order_[k + 1]], p_)) open_.insert(k);
  }

  SimParams p_;
  std::vector<std::size_t> order_;
  std::set<std::size_t> open_;
};

// The sorted rank of the leftmost active agent never decreases, its position
// never decreases, and its total rightward travel stays within the initial
// span.
template <Scalar S>
class LeftmostProgressMonitor final : public Monitor<S> {
 public:
  explicit LeftmostProgressMonitor(SimParams p) : p_(std::move(p)) {}
  std::string name() const override { return "leftmost_progress"; }

  void on_start(const Trajectory<S>& traj) override {
    order_ = sorted_order(traj.initial);
    const auto& c = traj.initial;
    span_ = c.x(order_.back()) - c.x(order_.front());
    rank_ = active_rank(c);
    if (rank_ < order_.size()) start_pos_ = last_pos_ = c.x(order_[rank_]);
  }

  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& c = traj.steps.back().config;
    const std::size_t r = active_rank(c);
    if (r == order_.size()) return Verdict{true, "converged", {}};
    const S pos = c.x(order_[r]);
    const S slack = S(ScalarTraits<S>::from_double(p_.merge_tol));
    if (r < rank_)
      return Verdict{false, "rank_decreased",
                     std::to_string(rank_) + " -> " + std::to_string(r)};
    if (pos < last_pos_ - slack)
      return Verdict{false, "moved_left", format_scalar(S(pos - last_pos_))};
    if (pos - start_pos_ > span_ + slack)
      return Verdict{false, "travel_exceeds_span", format_scalar(S(pos - start_pos_))};
    rank_ = r;
    last_pos_ = pos;
    return Verdict{true, "monotone", "rank=" + std::to_string(r)};
  }

 private:
  std::size_t active_rank(const Configuration<S>& c) const {
    for (std::size_t k = 0; k < order_.size(); ++k)
      if (!is_frozen(c, order_[k], p_)) return k;
    return order_.size();
  }

  SimParams p_;
  std::vector<std::size_t> order_;
  std::size_t rank_ = 0;
  S span_{};
  S start_pos_{};
  S last_pos_{};
};

}  // namespace hk
