#pragma once

// HK_eta: one-dimensional dynamics where agent i listens to the asymmetric
// window -1 + eta_i <= x_j - x_i <= 1, with 0 < eta_i < eta < 1.
//
// The neighbor relation is not symmetric and sorted order is not preserved,
// so none of the homogeneous order/gap/weight monitors apply here.

#include "hk/one_dim.hpp"

namespace hk {

template <Scalar S>
struct NoisyParams {
  S eta;
  std::vector<S> etas;

  void validate(std::size_t n) const {
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("eta must lie in (0, 1)");
    if (etas.size() != n)
      throw std::invalid_argument("expected " + std::to_string(n) + " per-agent etas, got " +
                                  std::to_string(etas.size()));
    for (std::size_t i = 0; i < etas.size(); ++i)
      if (!(etas[i] > 0 && etas[i] < eta))
        throw std::invalid_argument("eta_" + std::to_string(i) + " must lie in (0, eta)");
  }
};

// Float mode widens both window edges by neighbor_eps.
template <Scalar S>
bool noisy_within(const Configuration<S>& c, std::size_t i, std::size_t j,
                  const NoisyParams<S>& noisy, const SimParams& p) {
  const S diff = c.x(j) - c.x(i);
  if constexpr (is_exact_v<S>) {
    return diff >= noisy.etas[i] - 1 && diff <= 1;
  } else {
    return diff >= noisy.etas[i] - 1.0 - p.neighbor_eps && diff <= 1.0 + p.neighbor_eps;
  }
}

template <Scalar S>
std::vector<std::size_t> noisy_neighbors(const Configuration<S>& c, std::size_t i,
                                         const NoisyParams<S>& noisy, const SimParams& p) {
  require_line(c);
  c.require_agent(i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j == i || noisy_within(c, i, j, noisy, p)) out.push_back(j);
  return out;
}

template <Scalar S>
NeighborGraph noisy_graph(const Configuration<S>& c, const NoisyParams<S>& noisy,
                          const SimParams& p) {
  NeighborGraph g(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) g[i] = noisy_neighbors(c, i, noisy, p);
  return g;
}

template <Scalar S>
std::pair<Configuration<S>, StepReport<S>> noisy_step(const Configuration<S>& c,
                                                      const NoisyParams<S>& noisy,
                                                      const SimParams& p) {
  require_line(c);
  noisy.validate(c.size());
  auto next = detail::mean_update(c, noisy_graph(c, noisy, p));
  auto report = describe_step(c, next, p);
  return {std::move(next), std::move(report)};
}

template <Scalar S>
Trajectory<S> noisy_simulate(const Configuration<S>& initial, const NoisyParams<S>& noisy,
                             const SimParams& p, MonitorList<S>* monitors = nullptr) {
  require_line(initial);
  noisy.validate(initial.size());
  return simulate_with(
      initial, p,
      [&noisy](const Configuration<S>& c, const SimParams& q) { return noisy_step(c, noisy, q); },
      monitors);
}

// Every noisy neighbor sits at x_i, so one noisy step leaves i in place.
template <Scalar S>
bool noisy_is_frozen(const Configuration<S>& c, std::size_t i, const NoisyParams<S>& noisy,
                     const SimParams& p) {
  for (std::size_t j : noisy_neighbors(c, i, noisy, p))
    if (!coincident(c.positions[i], c.positions[j], p)) return false;
  return true;
}

// Leftmost agent (ties by index) with a noisy neighbor strictly to its right.
template <Scalar S>
std::optional<std::size_t> noisy_leftmost_active(const Configuration<S>& c,
                                                 const NoisyParams<S>& noisy,
                                                 const SimParams& p) {
  for (std::size_t i : sorted_order(c))
    for (std::size_t j : noisy_neighbors(c, i, noisy, p))
      if (strictly_left(c.x(i), c.x(j), p)) return i;
  return std::nullopt;
}

// Same trichotomy as the homogeneous certificate with the noisy ell(t), plus
// the early exit x_ell(t+1) - x_ell(t) > (1 - eta)/n.
template <Scalar S>
LeftmoveVerdict<S> noisy_leftmove_certificate(const Trajectory<S>& traj, std::size_t t,
                                              const NoisyParams<S>& noisy, const SimParams& p) {
  if (!traj.covers(t) || !traj.covers(t + 2))
    throw std::out_of_range("trajectory too short for a certificate at t = " + std::to_string(t));
  const auto& c0 = traj.config_at(t);
  const auto& c1 = traj.config_at(t + 1);
  const auto& c2 = traj.config_at(t + 2);
  const auto ell = noisy_leftmost_active(c0, noisy, p);
  if (!ell) throw std::invalid_argument("system already converged at t = " + std::to_string(t));

  const std::size_t n = c0.size();
  LeftmoveVerdict<S> v;
  v.t = t;
  v.ell = *ell;
  v.moved_amount = c2.x(*ell) - c0.x(*ell);
  S early = (S(1) - noisy.eta) / S(static_cast<long>(n));
  if constexpr (!is_exact_v<S>) early -= 1e-12;
  const std::size_t w0 = agent_weight(c0, *ell, p);
  v.mark(LeftmoveOutcome::weight_increased,
         agent_weight(c1, *ell, p) > w0 || agent_weight(c2, *ell, p) > w0);
  v.mark(LeftmoveOutcome::froze,
         noisy_is_frozen(c1, *ell, noisy, p) || noisy_is_frozen(c2, *ell, noisy, p));
  v.mark(LeftmoveOutcome::moved_right, v.moved_amount >= leftmove_threshold<S>(n));
  v.mark(LeftmoveOutcome::early_exit, c1.x(*ell) - c0.x(*ell) > early);
  return v;
}

template <Scalar S>
std::unique_ptr<CertificateMonitor<S>> noisy_certificate_monitor(NoisyParams<S> noisy,
                                                                 const SimParams& p) {
  auto shared = std::make_shared<const NoisyParams<S>>(std::move(noisy));
  return std::make_unique<CertificateMonitor<S>>(
      "noisy_leftmove",
      [shared, p](const Trajectory<S>& tr, std::size_t t) {
        return noisy_leftmove_certificate(tr, t, *shared, p);
      },
      [shared, p](const Configuration<S>& c) {
        return noisy_leftmost_active(c, *shared, p).has_value();
      });
}

// If i is in N_j but j is not in N_i, then x_j - x_i lies in [-1, -1 + eta_i).
template <Scalar S>
class AsymmetryMonitor final : public Monitor<S> {
 public:
  AsymmetryMonitor(NoisyParams<S> noisy, SimParams p) : noisy_(std::move(noisy)), p_(std::move(p)) {}
  std::string name() const override { return "noisy_asymmetry"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& c = traj.config_at(traj.steps.back().time - 1);
    const S tol = S(ScalarTraits<S>::from_double(p_.neighbor_eps));
    std::size_t one_sided = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (i == j || noisy_within(c, i, j, noisy_, p_) || !noisy_within(c, j, i, noisy_, p_))
          continue;
        ++one_sided;
        const S diff = c.x(j) - c.x(i);
        if (diff < S(-1) - tol || diff >= noisy_.etas[i] - 1 + tol)
          return Verdict{false, "unbounded_asymmetry",
                         "i=" + std::to_string(i) + " j=" + std::to_string(j)};
      }
    return Verdict{true, "bounded", std::to_string(one_sided) + " one-sided pairs"};
  }

 private:
  NoisyParams<S> noisy_;
  SimParams p_;
};

// Informational: records whether the sorted order changed in this step.
template <Scalar S>
class OrderSwapMonitor final : public Monitor<S> {
 public:
  std::string name() const override { return "order_swap"; }
  std::optional<Verdict> on_step(Trajectory<S>& traj) override {
    const auto& report = traj.steps.back();
    const auto& before = traj.config_at(report.time - 1);
    for (std::size_t a = 0; a < before.size(); ++a)
      for (std::size_t b = 0; b < before.size(); ++b)
        if (before.x(a) < before.x(b) && report.config.x(a) > report.config.x(b)) {
          ++swaps_;
          return Verdict{true, "swapped", "agents " + std::to_string(a) + "," + std::to_string(b)};
        }
    return Verdict{true, "preserved", {}};
  }
  std::size_t swaps() const { return swaps_; }

 private:
  std::size_t swaps_ = 0;
};

}  // namespace hk
