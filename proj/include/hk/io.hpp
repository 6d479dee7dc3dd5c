#pragma once

// File formats: instance files, the HK_eta sidecar, trajectory JSONL/CSV,
// bench CSV, the n-gon oracle CSV and the calibration-constant config.
// Every format opens with a version header line or record.

#include "hk/instances.hpp"

#include "json.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hk {

inline constexpr int kFormatVersion = 1;

// --- instance files ---------------------------------------------------------
//
//   # hk-instance v1 mode=exact n=3 d=1
//   0
//   1/2
//   2
//
// One agent per line, whitespace-separated coordinates; '#' lines and blank
// lines are skipped. The dimension is taken from the first agent line.

template <Scalar S>
void write_instance(std::ostream& out, const Configuration<S>& c) {
  out << "# hk-instance v" << kFormatVersion << " mode=" << to_string(ScalarTraits<S>::mode)
      << " n=" << c.size() << " d=" << c.dim << "\n";
  for (const auto& p : c.positions) {
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << format_scalar(p[k]);
    out << "\n";
  }
}

template <Scalar S>
Configuration<S> read_instance(std::istream& in) {
  std::vector<Point<S>> pos;
  std::size_t dim = 0;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::istringstream tokens{std::string(view)};
    Point<S> p;
    for (std::string tok; tokens >> tok;) {
      try {
        p.push_back(parse_scalar<S>(tok));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (dim == 0) dim = p.size();
    if (p.size() != dim)
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                       " coordinates, got " + std::to_string(p.size()));
    pos.push_back(std::move(p));
  }
  if (pos.empty()) throw ParseError("instance contains no agents");
  return Configuration<S>(std::move(pos), dim);
}

template <Scalar S>
Configuration<S> load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return read_instance<S>(in);
}

template <Scalar S>
void save_instance(const std::string& path, const Configuration<S>& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_instance(out, c);
}

// --- HK_eta sidecar ---------------------------------------------------------

template <Scalar S>
S scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_scalar<S>(j.get<std::string>());
  if (j.is_number()) return ScalarTraits<S>::from_double(j.get<double>());
  throw ParseError("expected a number or numeric string, got " + j.dump());
}

template <Scalar S>
nlohmann::json noisy_to_json(const NoisyParams<S>& noisy) {
  nlohmann::json etas = nlohmann::json::array();
  for (const auto& e : noisy.etas) etas.push_back(format_scalar(e));
  return {{"format", "hk-noisy-params"},
          {"version", kFormatVersion},
          {"mode", std::string(to_string(ScalarTraits<S>::mode))},
          {"eta", format_scalar(noisy.eta)},
          {"etas", etas}};
}

template <Scalar S>
NoisyParams<S> noisy_from_json(const nlohmann::json& j) {
  NoisyParams<S> out{scalar_from_json<S>(j.at("eta")), {}};
  for (const auto& e : j.at("etas")) out.etas.push_back(scalar_from_json<S>(e));
  return out;
}

template <Scalar S>
NoisyParams<S> load_noisy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open eta sidecar '" + path + "'");
  try {
    return noisy_from_json<S>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad eta sidecar '" + path + "': " + e.what());
  }
}

template <Scalar S>
void save_noisy(const std::string& path, const NoisyParams<S>& noisy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << noisy_to_json(noisy).dump(2) << "\n";
}

// --- trajectory JSONL ---------------------------------------------------------
//
// Record 1: {"record":"header","format":"hk-trajectory","version":1,...,"positions":...}
// One {"record":"step",...} per executed step, then {"record":"summary",...}.
// Positions are strings: "p/q" in exact mode, shortest round-trip decimals in
// float mode.

inline nlohmann::json verdict_to_json(const Verdict& v) {
  return {{"ok", v.ok}, {"kind", v.kind}, {"detail", v.detail}};
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
  return Verdict{j.at("ok").get<bool>(), j.at("kind").get<std::string>(),
                 j.at("detail").get<std::string>()};
}

inline nlohmann::json outcomes_to_json(const Outcomes& o) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : o) j[name] = verdict_to_json(v);
  return j;
}

template <Scalar S>
nlohmann::json positions_to_json(const Configuration<S>& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : c.positions) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& v : p) row.push_back(format_scalar(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <Scalar S>
Configuration<S> positions_from_json(const nlohmann::json& rows, std::size_t dim, std::size_t t) {
  std::vector<Point<S>> pos;
  for (const auto& row : rows) {
    Point<S> p;
    for (const auto& v : row) p.push_back(scalar_from_json<S>(v));
    pos.push_back(std::move(p));
  }
  return Configuration<S>(std::move(pos), dim, t);
}

template <Scalar S>
void write_trajectory_jsonl(std::ostream& out, const Trajectory<S>& traj,
                            const nlohmann::json& extra_header = nlohmann::json::object()) {
  nlohmann::json header = {{"record", "header"},
                           {"format", "hk-trajectory"},
                           {"version", kFormatVersion},
                           {"mode", std::string(to_string(ScalarTraits<S>::mode))},
                           {"n", traj.initial.size()},
                           {"d", traj.initial.dim},
                           {"t", traj.initial.time},
                           {"max_steps", traj.max_steps},
                           {"positions", positions_to_json(traj.initial)}};
  for (const auto& [k, v] : extra_header.items()) header[k] = v;
  out << header.dump() << "\n";
  for (const auto& s : traj.steps) {
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& [i, j] : s.merge_events) merges.push_back({i, j});
    nlohmann::json rec = {{"record", "step"},
                          {"t", s.time},
                          {"positions", positions_to_json(s.config)},
                          {"max_displacement", s.max_displacement()},
                          {"max_sq_displacement", format_scalar(s.max_sq_displacement)},
                          {"merge_events", merges},
                          {"monitor_outcomes", outcomes_to_json(s.monitor_outcomes)}};
    if (s.potential) rec["potential"] = format_scalar(*s.potential);
    if constexpr (is_exact_v<S>) rec["max_bits"] = s.max_bits;
    out << rec.dump() << "\n";
  }
  nlohmann::json summary = {{"record", "summary"},
                            {"converged", traj.converged_at.has_value()},
                            {"converged_at", traj.converged_at ? nlohmann::json(*traj.converged_at)
                                                               : nlohmann::json(nullptr)},
                            {"steps", traj.steps.size()},
                            {"budget_exhausted", traj.budget_exhausted()},
                            {"aborted", traj.aborted},
                            {"monitor_failures", traj.monitor_failures()},
                            {"final_outcomes", outcomes_to_json(traj.final_outcomes)}};
  if constexpr (is_exact_v<S>) summary["max_bits"] = traj.max_bits();
  out << summary.dump() << "\n";
}

// Rebuilds positions, merge events, potentials and monitor outcomes.
template <Scalar S>
Trajectory<S> read_trajectory_jsonl(std::istream& in) {
  Trajectory<S> traj;
  std::string line;
  bool have_header = false, have_summary = false;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto kind = j.at("record").get<std::string>();
    if (kind == "header") {
      if (j.at("format") != "hk-trajectory" || j.at("version").get<int>() != kFormatVersion)
        throw ParseError("unsupported trajectory format");
      if (j.at("mode").get<std::string>() != to_string(ScalarTraits<S>::mode))
        throw ParseError("trajectory numeric mode does not match the reader");
      dim = j.at("d").get<std::size_t>();
      traj.initial = positions_from_json<S>(j.at("positions"), dim, j.at("t").get<std::size_t>());
      traj.max_steps = j.value("max_steps", std::size_t{0});
      have_header = true;
    } else if (kind == "step") {
      if (!have_header) throw ParseError("step record before header");
      StepReport<S> s;
      s.time = j.at("t").get<std::size_t>();
      s.config = positions_from_json<S>(j.at("positions"), dim, s.time);
      s.max_sq_displacement = parse_scalar<S>(j.at("max_sq_displacement").get<std::string>());
      for (const auto& m : j.at("merge_events"))
        s.merge_events.emplace_back(m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>());
      if (j.contains("potential")) s.potential = parse_scalar<S>(j["potential"].get<std::string>());
      for (const auto& [name, v] : j.at("monitor_outcomes").items())
        s.monitor_outcomes[name] = verdict_from_json(v);
      s.max_bits = j.value("max_bits", std::size_t{0});
      traj.steps.push_back(std::move(s));
    } else if (kind == "summary") {
      if (!j.at("converged_at").is_null()) traj.converged_at = j["converged_at"].get<std::size_t>();
      traj.aborted = j.value("aborted", false);
      for (const auto& [name, v] : j.at("final_outcomes").items())
        traj.final_outcomes[name] = verdict_from_json(v);
      have_summary = true;
    } else {
      throw ParseError("unknown record kind '" + kind + "'");
    }
  }
  if (!have_header || !have_summary) throw ParseError("trajectory is missing header or summary");
  traj.final = traj.steps.empty() ? traj.initial : traj.steps.back().config;
  // Per-agent displacements are not serialized; recompute them.
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const auto& before = k == 0 ? traj.initial : traj.steps[k - 1].config;
    auto& s = traj.steps[k];
    s.sq_displacements.clear();
    for (std::size_t i = 0; i < before.size(); ++i)
      s.sq_displacements.push_back(squared_distance(before.positions[i], s.config.positions[i]));
  }
  return traj;
}

// Long format: one row per (t, agent).
template <Scalar S>
void write_trajectory_csv(std::ostream& out, const Trajectory<S>& traj) {
  out << "# hk-trajectory-csv v" << kFormatVersion << " mode=" << to_string(ScalarTraits<S>::mode)
      << " converged_at=" << (traj.converged_at ? std::to_string(*traj.converged_at) : "none")
      << "\n";
  out << "t,agent";
  for (std::size_t k = 0; k < traj.initial.dim; ++k) out << ",x" << k;
  out << "\n";
  auto rows = [&](const Configuration<S>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      out << c.time << "," << i;
      for (const auto& v : c.positions[i]) out << "," << format_scalar(v);
      out << "\n";
    }
  };
  rows(traj.initial);
  for (const auto& s : traj.steps) rows(s.config);
}

// --- bench CSV -----------------------------------------------------------------

struct BenchRecord {
  std::string generator;
  std::size_t n = 0;
  std::size_t d = 1;
  std::uint64_t seed = 0;
  std::string mode;
  std::optional<std::size_t> converged_at;
  std::size_t max_steps = 0;
  double wall_time = 0.0;  // seconds
  std::size_t max_bits = 0;
  std::optional<std::size_t> lower_bound;  // ngon rows

  bool budget_exhausted() const { return !converged_at; }
};

inline constexpr const char* kBenchHeader =
    "generator,n,d,seed,mode,converged_at,budget_exhausted,max_steps,wall_time_s,max_bits,"
    "lower_bound";

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << "# hk-bench v" << kFormatVersion << "\n" << kBenchHeader << "\n";
  for (const auto& r : rows) {
    out << r.generator << "," << r.n << "," << r.d << "," << r.seed << "," << r.mode << ","
        << (r.converged_at ? std::to_string(*r.converged_at) : "") << ","
        << (r.budget_exhausted() ? 1 : 0) << "," << r.max_steps << ","
        << ScalarTraits<double>::to_string(r.wall_time) << "," << r.max_bits << ","
        << (r.lower_bound ? std::to_string(*r.lower_bound) : "") << "\n";
  }
}

// --- n-gon oracle CSV ------------------------------------------------------------

inline void write_oracle_csv(std::ostream& out, const std::vector<NGonOracleState>& states) {
  out << "# hk-ngon-oracle v" << kFormatVersion;
  if (!states.empty()) out << " n=" << states.front().n;
  out << "\nt,side,valid\n";
  for (const auto& s : states)
    out << s.t << "," << ScalarTraits<double>::to_string(s.side) << "," << (s.valid ? 1 : 0)
        << "\n";
}

// Oracle states from t = 0 through the first invalid state, or `steps` states.
inline std::vector<NGonOracleState> ngon_oracle_run(std::size_t n,
                                                    std::optional<std::size_t> steps = {}) {
  std::vector<NGonOracleState> out{ngon_oracle_start(n)};
  while (out.back().valid && (!steps || out.back().t < *steps))
    out.push_back(ngon_oracle_step(out.back()));
  return out;
}

// --- calibration constants -------------------------------------------------------
//
//   # hk-calibration v1
//   movefar_c = 0.0123
//   gooddir_c0 = 0.0456

struct Calibration {
  double movefar_c = 0.0;
  double gooddir_c0 = 0.0;
};

inline Calibration read_calibration(std::istream& in) {
  Calibration c;
  bool versioned = false, have_movefar = false, have_gooddir = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.find("hk-calibration v1") != std::string_view::npos) versioned = true;
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("bad calibration line '" + line + "'");
    const auto key = detail::trim(view.substr(0, eq));
    const double value = ScalarTraits<double>::parse(view.substr(eq + 1));
    if (key == "movefar_c") {
      c.movefar_c = value;
      have_movefar = true;
    } else if (key == "gooddir_c0") {
      c.gooddir_c0 = value;
      have_gooddir = true;
    }
  }
  if (!versioned) throw ParseError("calibration file lacks the '# hk-calibration v1' header");
  if (!have_movefar || !have_gooddir) throw ParseError("calibration file is missing a constant");
  return c;
}

inline Calibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file '" + path + "'");
  return read_calibration(in);
}

}  // namespace hk
