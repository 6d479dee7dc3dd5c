#pragma once

// Name-based monitor construction for the command-line runner.

#include "hk/analysis.hpp"
#include "hk/noisy.hpp"

namespace hk {

struct MonitorRequest {
  std::vector<std::string> names;
  std::size_t dim = 1;
  bool noisy = false;
  double movefar_c = 0.0;
};

inline const std::vector<std::string>& known_monitors() {
  static const std::vector<std::string> names = {
      "symmetry",  "weight",    "containment",    "order",           "gaps",
      "leftmove",  "leftmost_progress",            "potential",       "movefar",
      "noisy_leftmove", "noisy_asymmetry",         "order_swap"};
  return names;
}

// The monitors that apply to a run of this shape ("all" on the command line).
inline std::vector<std::string> applicable_monitors(std::size_t dim, bool noisy) {
  if (noisy) return {"noisy_leftmove", "noisy_asymmetry", "order_swap"};
  std::vector<std::string> out = {"symmetry", "weight", "containment", "potential", "movefar"};
  if (dim == 1)
    for (const char* m : {"order", "gaps", "leftmove", "leftmost_progress"}) out.push_back(m);
  return out;
}

template <Scalar S>
MonitorList<S> make_monitors(const MonitorRequest& req, const SimParams& p,
                             const NoisyParams<S>* noisy = nullptr) {
  static const std::set<std::string> line_only = {"order", "gaps", "leftmove", "leftmost_progress"};
  static const std::set<std::string> noisy_only = {"noisy_leftmove", "noisy_asymmetry",
                                                   "order_swap"};
  std::vector<std::string> names = req.names;
  if (names.size() == 1 && names[0] == "all") names = applicable_monitors(req.dim, req.noisy);

  MonitorList<S> out;
  for (const auto& name : names) {
    if (std::find(known_monitors().begin(), known_monitors().end(), name) == known_monitors().end())
      throw std::invalid_argument("unknown monitor '" + name + "'");
    if (line_only.count(name) && req.dim != 1)
      throw std::invalid_argument("monitor '" + name + "' needs a one-dimensional instance");
    if (noisy_only.count(name) != static_cast<std::size_t>(req.noisy))
      throw std::invalid_argument(req.noisy ? "monitor '" + name + "' does not apply to HK_eta runs"
                                            : "monitor '" + name + "' needs HK_eta parameters");
    if (name == "symmetry") out.push_back(std::make_unique<SymmetryMonitor<S>>(p));
    else if (name == "weight") out.push_back(std::make_unique<WeightMonitor<S>>(p));
    else if (name == "containment") out.push_back(std::make_unique<ContainmentMonitor<S>>(p));
    else if (name == "order") out.push_back(std::make_unique<OrderMonitor<S>>(p));
    else if (name == "gaps") out.push_back(std::make_unique<GapMonitor<S>>(p));
    else if (name == "leftmove") out.push_back(CertificateMonitor<S>::homogeneous(p));
    else if (name == "leftmost_progress") out.push_back(std::make_unique<LeftmostProgressMonitor<S>>(p));
    else if (name == "potential") out.push_back(std::make_unique<PotentialMonitor<S>>());
    else if (name == "movefar") out.push_back(std::make_unique<MovefarMonitor<S>>(p, req.movefar_c));
    else if (name == "noisy_leftmove") out.push_back(noisy_certificate_monitor<S>(*noisy, p));
    else if (name == "noisy_asymmetry") out.push_back(std::make_unique<AsymmetryMonitor<S>>(*noisy, p));
    else if (name == "order_swap") out.push_back(std::make_unique<OrderSwapMonitor<S>>());
  }
  return out;
}

}  // namespace hk
