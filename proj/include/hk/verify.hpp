#pragma once

// Property suites over fixed, seeded instance distributions. Each suite
// simulates its instances with the relevant monitors attached and tallies
// every verdict per property.
//
//   one_dim    200 exact 1D instances, n in [2, 30], positions in [0, n]
//   noisy      100 exact HK_eta instances, eta = 1/2, n in [2, 20]
//   potential  100 float instances (n <= 20, d <= 3) + 50 exact 1D
//   movefar    60 exact instances (1D n <= 30, d <= 3 n <= 10) + the float
//              potential instances; good_direction on 100 float instances
//              (n <= 15, d <= 4, 10^4 samples)
//   ngon       regular n-gons for n in {8, 16, 32}

#include "hk/instances.hpp"
#include "hk/io.hpp"
#include "hk/monitors.hpp"

#include <functional>
#include <map>
#include <ostream>

namespace hk {

struct PropertyCount {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string first_failure;

  void record(bool ok, const std::string& where) {
    ++checked;
    if (!ok && failed++ == 0) first_failure = where;
  }
};

struct SuiteReport {
  std::string suite;
  std::size_t instances = 0;
  std::map<std::string, PropertyCount> properties;

  bool passed() const {
    for (const auto& [name, c] : properties)
      if (c.failed) return false;
    return !properties.empty();
  }

  void merge(const SuiteReport& other) {
    instances += other.instances;
    for (const auto& [name, c] : other.properties) {
      auto& mine = properties[other.suite + "." + name];
      mine.checked += c.checked;
      if (c.failed && !mine.failed) mine.first_failure = c.first_failure;
      mine.failed += c.failed;
    }
  }

  void print(std::ostream& out) const {
    out << "suite " << suite << ": " << instances << " instances\n";
    for (const auto& [name, c] : properties) {
      out << "  " << name << ": " << (c.checked - c.failed) << "/" << c.checked << " passed";
      if (c.failed) out << "  first failure: " << c.first_failure;
      out << "\n";
    }
    out << "suite " << suite << ": " << (passed() ? "PASS" : "FAIL") << "\n";
  }
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  Calibration calibration;
  std::size_t gooddir_samples = 10000;
  // Test-only negative control: agents with other neighbors drop themselves
  // from their own average.
  bool corrupt_step = false;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {"one_dim", "noisy", "potential", "movefar", "ngon",
                                                 "all"};
  return names;
}

// splitmix64 finalizer; derives independent per-instance seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream * 0x100000001ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --- instance distributions ------------------------------------------------------

struct InstanceSpec {
  std::string label;
  std::size_t n = 1;
  std::size_t d = 1;
  double side = 1.0;
  std::uint64_t seed = 0;

  template <Scalar S>
  Configuration<S> make() const {
    return random_box<S>(n, d, side, seed);
  }
};

// Box side giving roughly one agent per unit volume, never below 1.5.
inline double unit_density_side(std::size_t n, std::size_t d) {
  return std::max(1.5, std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d)));
}

inline std::vector<InstanceSpec> line_instances(std::uint64_t base, std::uint64_t stream,
                                                std::size_t count, std::size_t max_n) {
  std::vector<InstanceSpec> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t s = derive_seed(base, stream, k);
    const std::size_t n = 2 + s % (max_n - 1);
    out.push_back({"line#" + std::to_string(k), n, 1, static_cast<double>(n), derive_seed(s, 0, 0)});
  }
  return out;
}

inline std::vector<InstanceSpec> box_instances(std::uint64_t base, std::uint64_t stream,
                                               std::size_t count, std::size_t max_n,
                                               std::size_t max_d) {
  std::vector<InstanceSpec> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t s = derive_seed(base, stream, k);
    const std::size_t n = 2 + s % (max_n - 1);
    const std::size_t d = 1 + (s >> 20) % max_d;
    out.push_back({"box#" + std::to_string(k), n, d, unit_density_side(n, d), derive_seed(s, 0, 0)});
  }
  return out;
}

enum : std::uint64_t {
  kStreamLine = 1,
  kStreamNoisy = 2,
  kStreamFloatBox = 3,
  kStreamPotentialLine = 4,
  kStreamMovefarLine = 5,
  kStreamMovefarBox = 6,
  kStreamGoodDir = 7,
  kStreamEtas = 8,
};

struct NoisyInstanceSpec {
  InstanceSpec instance;
  std::uint64_t eta_seed = 0;
};

inline std::vector<InstanceSpec> one_dim_instances(std::uint64_t seed) {
  return line_instances(seed, kStreamLine, 200, 30);
}
inline std::vector<NoisyInstanceSpec> noisy_instances(std::uint64_t seed) {
  std::vector<NoisyInstanceSpec> out;
  for (auto& spec : line_instances(seed, kStreamNoisy, 100, 20))
    out.push_back({spec, derive_seed(spec.seed, kStreamEtas, 0)});
  return out;
}
inline std::vector<InstanceSpec> float_box_instances(std::uint64_t seed) {
  return box_instances(seed, kStreamFloatBox, 100, 20, 3);
}
inline std::vector<InstanceSpec> potential_line_instances(std::uint64_t seed) {
  return line_instances(seed, kStreamPotentialLine, 50, 30);
}
inline std::vector<InstanceSpec> movefar_exact_instances(std::uint64_t seed) {
  auto out = line_instances(seed, kStreamMovefarLine, 30, 30);
  for (auto& s : box_instances(seed, kStreamMovefarBox, 30, 10, 3)) out.push_back(s);
  return out;
}
inline std::vector<InstanceSpec> gooddir_instances(std::uint64_t seed) {
  return box_instances(seed, kStreamGoodDir, 100, 15, 4);
}

inline const std::vector<std::size_t>& ngon_sizes() {
  static const std::vector<std::size_t> sizes = {8, 16, 32};
  return sizes;
}

// --- step rules ------------------------------------------------------------------

template <Scalar S>
using StepRule =
    std::function<std::pair<Configuration<S>, StepReport<S>>(const Configuration<S>&, const SimParams&)>;

namespace detail {

template <Scalar S>
std::pair<Configuration<S>, StepReport<S>> corrupted_step(const Configuration<S>& c,
                                                          const SimParams& p) {
  auto g = neighbor_graph(c, p);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i].size() > 1) std::erase(g[i], i);
  auto next = mean_update(c, g);
  auto report = describe_step(c, next, p);
  return {std::move(next), std::move(report)};
}

}  // namespace detail

template <Scalar S>
StepRule<S> step_rule(const VerifyOptions& opts) {
  if (opts.corrupt_step) return detail::corrupted_step<S>;
  return [](const Configuration<S>& c, const SimParams& p) { return step(c, p); };
}

template <Scalar S>
bool same_trajectory(const Trajectory<S>& a, const Trajectory<S>& b) {
  if (a.initial != b.initial || a.converged_at != b.converged_at || a.steps.size() != b.steps.size())
    return false;
  for (std::size_t k = 0; k < a.steps.size(); ++k)
    if (a.steps[k].config != b.steps[k].config) return false;
  return true;
}

// Runs one instance with the named monitors, tallying each verdict under the
// monitor's name, plus convergence within budget and determinism.
template <Scalar S>
Trajectory<S> run_checked(SuiteReport& report, const std::string& label,
                          const Configuration<S>& initial, const SimParams& p,
                          const std::vector<std::string>& monitor_names, const VerifyOptions& opts,
                          const NoisyParams<S>* noisy = nullptr) {
  const MonitorRequest req{monitor_names, initial.dim, noisy != nullptr,
                           opts.calibration.movefar_c};
  auto run = [&] {
    auto mons = make_monitors<S>(req, p, noisy);
    if (noisy) return noisy_simulate(initial, *noisy, p, &mons);
    return simulate_with(initial, p, step_rule<S>(opts), &mons);
  };
  auto traj = run();
  ++report.instances;
  for (const auto& s : traj.steps)
    for (const auto& [name, v] : s.monitor_outcomes)
      report.properties[name].record(v.ok, label + " t=" + std::to_string(s.time) + " " + v.kind +
                                               (v.detail.empty() ? "" : " (" + v.detail + ")"));
  for (const auto& [name, v] : traj.final_outcomes)
    report.properties[name].record(v.ok, label + " final " + v.kind + " " + v.detail);
  if (!traj.aborted)
    report.properties["converged_within_budget"].record(
        traj.converged_at.has_value(),
        label + " not converged after " + std::to_string(traj.max_steps) + " steps");
  report.properties["determinism"].record(same_trajectory(traj, run()), label + " rerun differs");
  return traj;
}

// --- suites ------------------------------------------------------------------------

inline SuiteReport verify_one_dim(const VerifyOptions& opts) {
  SuiteReport r{"one_dim", 0, {}};
  auto p = SimParams::exact();
  p.stop_on_failure = true;
  for (const auto& spec : one_dim_instances(opts.seed))
    run_checked<Rational>(r, spec.label + " n=" + std::to_string(spec.n), spec.make<Rational>(), p,
                          {"symmetry", "weight", "order", "gaps", "leftmove", "leftmost_progress"},
                          opts);
  return r;
}

inline SuiteReport verify_noisy(const VerifyOptions& opts) {
  SuiteReport r{"noisy", 0, {}};
  auto p = SimParams::exact();
  p.stop_on_failure = true;
  for (const auto& spec : noisy_instances(opts.seed)) {
    const auto c = spec.instance.make<Rational>();
    const auto noisy = random_etas<Rational>(c.size(), Rational(1, 2), spec.eta_seed);
    run_checked<Rational>(r, spec.instance.label + " n=" + std::to_string(c.size()), c, p,
                          {"noisy_leftmove", "noisy_asymmetry"}, opts, &noisy);
  }
  return r;
}

inline SuiteReport verify_potential(const VerifyOptions& opts) {
  SuiteReport r{"potential", 0, {}};
  auto pf = SimParams::float64();
  pf.stop_on_failure = true;
  for (const auto& spec : float_box_instances(opts.seed))
    run_checked<double>(r, spec.label + " n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d),
                        spec.make<double>(), pf, {"potential", "symmetry", "weight", "containment"},
                        opts);
  auto pe = SimParams::exact();
  pe.stop_on_failure = true;
  for (const auto& spec : potential_line_instances(opts.seed))
    run_checked<Rational>(r, spec.label + " n=" + std::to_string(spec.n), spec.make<Rational>(), pe,
                          {"potential", "symmetry", "weight", "containment"}, opts);
  return r;
}

inline SuiteReport verify_movefar(const VerifyOptions& opts) {
  SuiteReport r{"movefar", 0, {}};
  auto pe = SimParams::exact();
  pe.stop_on_failure = true;
  for (const auto& spec : movefar_exact_instances(opts.seed))
    run_checked<Rational>(r, spec.label + " n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d),
                          spec.make<Rational>(), pe, {"movefar"}, opts);
  auto pf = SimParams::float64();
  pf.stop_on_failure = true;
  for (const auto& spec : float_box_instances(opts.seed))
    run_checked<double>(r, spec.label + " n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d),
                        spec.make<double>(), pf, {"movefar"}, opts);
  for (const auto& spec : gooddir_instances(opts.seed)) {
    const auto c = spec.make<double>();
    const auto dir = good_direction(c, opts.gooddir_samples, derive_seed(spec.seed, kStreamGoodDir, 0), pf);
    r.properties["good_direction"].record(
        dir.defined && dir.normalized_margin >= opts.calibration.gooddir_c0,
        spec.label + " normalized margin " + std::to_string(dir.normalized_margin));
  }
  return r;
}

struct NGonCheck {
  std::size_t n = 0;
  std::optional<std::size_t> converged_at;
  std::size_t lower_bound = 0;
  double worst_spread = 0.0;        // over t <= n^2/28
  double worst_side_margin = 0.0;   // min of side(t) - (1 - 14/n^2)^t over t <= n^2/28
  double worst_oracle_error = 0.0;  // relative, over the validity horizon
  std::size_t horizon = 0;          // last t compared with the oracle
};

inline NGonCheck check_ngon(std::size_t n, const SimParams& p) {
  NGonCheck out;
  out.n = n;
  out.lower_bound = ngon_lower_bound(n);
  const auto traj = simulate(ngon<double>(n), p);
  out.converged_at = traj.converged_at;
  const double nn = static_cast<double>(n);
  out.worst_side_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; static_cast<double>(t) <= nn * nn / 28.0 && traj.covers(t); ++t) {
    const auto shape = polygon_shape(traj.config_at(t));
    out.worst_spread = std::max(out.worst_spread, shape.spread());
    out.worst_side_margin = std::min(
        out.worst_side_margin, shape.min_side - std::pow(1.0 - 14.0 / (nn * nn), static_cast<double>(t)));
  }
  for (auto s = ngon_oracle_start(n); s.valid && traj.covers(s.t + 1);) {
    s = ngon_oracle_step(s);
    const double side = polygon_shape(traj.config_at(s.t)).mean_side;
    out.worst_oracle_error = std::max(out.worst_oracle_error, std::fabs(side - s.side) / s.side);
    out.horizon = s.t;
  }
  return out;
}

inline SuiteReport verify_ngon(const VerifyOptions&) {
  SuiteReport r{"ngon", 0, {}};
  const auto p = SimParams::float64();
  for (std::size_t n : ngon_sizes()) {
    const auto c = check_ngon(n, p);
    ++r.instances;
    const std::string label = "n=" + std::to_string(n);
    r.properties["lower_bound"].record(c.converged_at && *c.converged_at >= c.lower_bound,
                                       label + " converged_at below " + std::to_string(c.lower_bound));
    r.properties["stays_regular"].record(c.worst_spread <= 1e-6,
                                         label + " spread " + std::to_string(c.worst_spread));
    r.properties["side_shrink_bound"].record(c.worst_side_margin >= -1e-6,
                                             label + " margin " + std::to_string(c.worst_side_margin));
    r.properties["oracle_agreement"].record(c.worst_oracle_error <= 1e-6,
                                            label + " rel error " + std::to_string(c.worst_oracle_error));
  }
  return r;
}

inline SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  if (name == "one_dim") return verify_one_dim(opts);
  if (name == "noisy") return verify_noisy(opts);
  if (name == "potential") return verify_potential(opts);
  if (name == "movefar") return verify_movefar(opts);
  if (name == "ngon") return verify_ngon(opts);
  if (name == "all") {
    SuiteReport all{"all", 0, {}};
    for (const char* s : {"one_dim", "noisy", "potential", "movefar", "ngon"}) all.merge(run_suite(s, opts));
    return all;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace hk
