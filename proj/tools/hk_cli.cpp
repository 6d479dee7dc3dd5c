// hk: generate instances, run simulations, verify property suites, benchmark
// convergence time, and print the n-gon recurrence.

#include "hk/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace {

using hk::Rational;

struct GeneratorArgs {
  std::string name;
  std::size_t n = 0;
  std::size_t d = 1;
  std::optional<double> side;
  std::uint64_t seed = 0;

  double resolved_side() const { return side ? *side : hk::unit_density_side(n, d); }
};

const std::vector<std::string> kGenerators = {"unit_line", "ngon", "random_interval", "random_box"};

template <hk::Scalar S>
hk::Configuration<S> generate(const GeneratorArgs& g) {
  if (g.n == 0) throw std::invalid_argument("--n must be at least 1");
  if (g.name == "unit_line") return hk::unit_line<S>(g.n);
  if (g.name == "ngon") return hk::ngon<S>(g.n);
  if (g.name == "random_interval") return hk::random_interval<S>(g.n, g.resolved_side(), g.seed);
  if (g.name == "random_box") return hk::random_box<S>(g.n, g.d, g.resolved_side(), g.seed);
  throw std::invalid_argument("unknown generator '" + g.name + "'");
}

std::size_t generator_dim(const GeneratorArgs& g) {
  if (g.name == "ngon") return 2;
  if (g.name == "random_box") return g.d;
  return 1;
}

struct SimArgs {
  std::string mode = "exact";
  std::optional<double> neighbor_eps, conv_tol, merge_tol;
  std::optional<std::size_t> max_steps;

  hk::SimParams params() const {
    auto p = hk::SimParams::for_mode(hk::parse_mode(mode));
    if (neighbor_eps) p.neighbor_eps = *neighbor_eps;
    if (conv_tol) p.conv_tol = *conv_tol;
    if (merge_tol) p.merge_tol = *merge_tol;
    p.max_steps = max_steps;
    p.validate();
    return p;
  }
};

void add_sim_options(CLI::App* cmd, SimArgs& s) {
  cmd->add_option("--mode", s.mode, "Numeric mode: exact or float")
      ->check(CLI::IsMember({"exact", "float", "float64"}))
      ->capture_default_str();
  cmd->add_option("--neighbor-eps", s.neighbor_eps,
                  "Slack on the squared unit threshold (float default 1e-9, exact 0)");
  cmd->add_option("--conv-tol", s.conv_tol,
                  "Max displacement treated as a fixed point (float default 1e-12, exact 0)");
  cmd->add_option("--merge-tol", s.merge_tol,
                  "Distance at which agents count as coincident (float default 1e-9, exact 0)");
  cmd->add_option("--max-steps", s.max_steps,
                  "Step budget (default 2(n+2n^3)+2 for d = 1, n^4 d^2 otherwise)");
}

void add_generator_options(CLI::App* cmd, GeneratorArgs& g) {
  cmd->add_option("--n", g.n, "Number of agents");
  cmd->add_option("--d", g.d, "Dimension (random_box)")->capture_default_str();
  cmd->add_option("--side", g.side,
                  "Interval length / box side for random generators (default max(1.5, n^(1/d)))");
  cmd->add_option("--seed", g.seed, "Generator seed")->capture_default_str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Writes to a file, or to stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// --- run -----------------------------------------------------------------------

struct RunArgs {
  std::string instance;
  GeneratorArgs gen;
  SimArgs sim;
  std::string out = "-";
  std::string format = "jsonl";
  std::string monitors = "all";
  std::optional<std::string> eta;
  std::string etas_file;
  std::uint64_t eta_seed = 0;
  std::string calibration = HK_DEFAULT_CALIBRATION;
};

template <hk::Scalar S>
int run_typed(const RunArgs& a, const hk::SimParams& p) {
  const auto initial = a.instance.empty() ? generate<S>(a.gen) : hk::load_instance<S>(a.instance);

  std::optional<hk::NoisyParams<S>> noisy;
  if (!a.etas_file.empty()) {
    noisy = hk::load_noisy<S>(a.etas_file);
    if (a.eta) noisy->eta = hk::parse_scalar<S>(*a.eta);
  } else if (a.eta) {
    noisy = hk::random_etas<S>(initial.size(), hk::parse_scalar<S>(*a.eta), a.eta_seed);
  }
  if (noisy) {
    if (initial.dim != 1) throw std::invalid_argument("noisy parameters need a one-dimensional instance");
    noisy->validate(initial.size());
  }

  const auto names = split_list(a.monitors);
  const bool wants_movefar =
      std::find(names.begin(), names.end(), "movefar") != names.end() ||
      (names == std::vector<std::string>{"all"} && !noisy);
  hk::MonitorRequest req{names, initial.dim, noisy.has_value(), 0.0};
  if (wants_movefar) req.movefar_c = hk::load_calibration(a.calibration).movefar_c;
  if (names.empty() || names == std::vector<std::string>{"none"}) req.names.clear();
  auto mons = hk::make_monitors<S>(req, p, noisy ? &*noisy : nullptr);

  const auto traj = noisy ? hk::noisy_simulate(initial, *noisy, p, &mons)
                          : hk::simulate(initial, p, &mons);

  Output out(a.out);
  if (a.format == "csv") {
    hk::write_trajectory_csv(out.stream(), traj);
  } else {
    nlohmann::json extra = {{"monitors", req.names}};
    if (noisy) extra["noisy"] = hk::noisy_to_json(*noisy);
    hk::write_trajectory_jsonl(out.stream(), traj, extra);
  }
  out.stream().flush();
  return 0;
}

int cmd_run(const RunArgs& a) {
  if (a.instance.empty() == a.gen.name.empty())
    throw std::invalid_argument("give exactly one instance source: a file or --generator");
  const auto p = a.sim.params();
  return p.mode == hk::NumericMode::exact ? run_typed<Rational>(a, p) : run_typed<double>(a, p);
}

// --- generate --------------------------------------------------------------------

struct GenerateArgs {
  GeneratorArgs gen;
  std::string mode = "exact";
  std::string out = "-";
  std::optional<std::string> eta;
  std::string etas_out;
};

template <hk::Scalar S>
int generate_typed(const GenerateArgs& a) {
  const auto c = generate<S>(a.gen);
  Output out(a.out);
  hk::write_instance(out.stream(), c);
  if (a.eta) {
    if (c.dim != 1) throw std::invalid_argument("noisy parameters need a one-dimensional instance");
    if (a.etas_out.empty()) throw std::invalid_argument("--eta needs --etas-out");
    hk::save_noisy(a.etas_out,
                   hk::random_etas<S>(c.size(), hk::parse_scalar<S>(*a.eta), hk::derive_seed(a.gen.seed, hk::kStreamEtas, 0)));
  }
  return 0;
}

int cmd_generate(const GenerateArgs& a) {
  return hk::parse_mode(a.mode) == hk::NumericMode::exact ? generate_typed<Rational>(a)
                                                          : generate_typed<double>(a);
}

// --- verify ------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 0;
  std::string calibration = HK_DEFAULT_CALIBRATION;
  bool corrupt_step = false;
};

int cmd_verify(const VerifyArgs& a) {
  if (std::find(hk::known_suites().begin(), hk::known_suites().end(), a.suite) ==
      hk::known_suites().end())
    throw std::invalid_argument("unknown suite '" + a.suite + "'");
  hk::VerifyOptions o;
  o.seed = a.seed;
  o.calibration = hk::load_calibration(a.calibration);
  o.corrupt_step = a.corrupt_step;
  const auto report = hk::run_suite(a.suite, o);
  report.print(std::cout);
  return report.passed() ? 0 : 1;
}

// --- bench -------------------------------------------------------------------------

struct BenchArgs {
  std::string generator = "unit_line";
  std::string ns = "10,20,40,80";
  std::string ds = "1";
  std::string seeds = "0";
  std::optional<double> side;
  SimArgs sim;
  std::string out = "-";
  unsigned threads = 0;
  bool no_timing = false;
};

template <class T>
std::vector<T> parse_numbers(const std::string& list, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(list)) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad ") + what + " list entry '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
  return out;
}

template <hk::Scalar S>
hk::BenchRecord bench_row(const GeneratorArgs& g, const hk::SimParams& p, bool timing) {
  hk::BenchRecord r;
  r.generator = g.name;
  r.n = g.n;
  r.d = generator_dim(g);
  r.seed = g.seed;
  r.mode = std::string(hk::to_string(p.mode));
  const auto initial = generate<S>(g);
  const auto t0 = std::chrono::steady_clock::now();
  const auto traj = hk::simulate(initial, p);
  if (timing) r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.converged_at = traj.converged_at;
  r.max_steps = traj.max_steps;
  r.max_bits = traj.max_bits();
  if (g.name == "ngon" && g.n >= 8) r.lower_bound = hk::ngon_lower_bound(g.n);
  return r;
}

int cmd_bench(const BenchArgs& a) {
  const auto p = a.sim.params();
  if (std::find(kGenerators.begin(), kGenerators.end(), a.generator) == kGenerators.end())
    throw std::invalid_argument("unknown generator '" + a.generator + "'");
  std::vector<GeneratorArgs> rows;
  for (auto n : parse_numbers<std::size_t>(a.ns, "n"))
    for (auto d : parse_numbers<std::size_t>(a.ds, "d"))
      for (auto seed : parse_numbers<std::uint64_t>(a.seeds, "seed")) {
        GeneratorArgs g{a.generator, n, d, a.side, seed};
        if (a.generator != "random_box" && d != 1 && a.generator != "ngon")
          throw std::invalid_argument(a.generator + " is one-dimensional; use --d 1");
        rows.push_back(g);
      }

  std::vector<hk::BenchRecord> records(rows.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < rows.size();) {
      try {
        records[k] = p.mode == hk::NumericMode::exact ? bench_row<Rational>(rows[k], p, !a.no_timing)
                                                      : bench_row<double>(rows[k], p, !a.no_timing);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!error.empty()) throw std::runtime_error(error);

  Output out(a.out);
  hk::write_bench_csv(out.stream(), records);
  out.stream().flush();
  return 0;
}

// --- oracle ------------------------------------------------------------------------

struct OracleArgs {
  std::size_t n = 8;
  std::optional<std::size_t> steps;
  std::string out = "-";
};

int cmd_oracle(const OracleArgs& a) {
  Output out(a.out);
  hk::write_oracle_csv(out.stream(), hk::ngon_oracle_run(a.n, a.steps));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hegselmann-Krause bounded-confidence dynamics"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Write an instance file");
  gen->add_option("generator", gen_args.gen.name, "unit_line | ngon | random_interval | random_box")
      ->required()
      ->check(CLI::IsMember(kGenerators));
  add_generator_options(gen, gen_args.gen);
  gen->add_option("--mode", gen_args.mode, "Numeric mode: exact or float")
      ->check(CLI::IsMember({"exact", "float", "float64"}))
      ->capture_default_str();
  gen->add_option("-o,--out", gen_args.out, "Output path ('-' for stdout)")->capture_default_str();
  gen->add_option("--eta", gen_args.eta, "Also draw per-agent noisy etas below this eta");
  gen->add_option("--etas-out", gen_args.etas_out, "Path for the noisy parameter sidecar");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Simulate an instance and write its trajectory");
  run->add_option("instance", run_args.instance, "Instance file");
  run->add_option("--generator", run_args.gen.name, "Generate the instance instead of reading a file")
      ->check(CLI::IsMember(kGenerators));
  add_generator_options(run, run_args.gen);
  add_sim_options(run, run_args.sim);
  run->add_option("-o,--out", run_args.out, "Output path ('-' for stdout)")->capture_default_str();
  run->add_option("--format", run_args.format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  run->add_option("--monitors", run_args.monitors,
                  "Comma list of monitors, 'all' (applicable ones) or 'none'")
      ->capture_default_str();
  run->add_option("--eta", run_args.eta, "Run the noisy model; draws per-agent etas below eta");
  run->add_option("--etas-file", run_args.etas_file, "Noisy parameter sidecar (JSON)");
  run->add_option("--eta-seed", run_args.eta_seed, "Seed for drawn etas")->capture_default_str();
  run->add_option("--calibration", run_args.calibration, "Calibration constants file")
      ->capture_default_str();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run a property suite; nonzero exit on failure");
  verify->add_option("suite", verify_args.suite, "one_dim | noisy | potential | movefar | ngon | all")
      ->required();
  verify->add_option("--seed", verify_args.seed, "Base seed of the instance distribution")
      ->capture_default_str();
  verify->add_option("--calibration", verify_args.calibration, "Calibration constants file")
      ->capture_default_str();
  verify->add_flag("--corrupt-step", verify_args.corrupt_step)->group("");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Convergence-time sweep written as CSV");
  bench->add_option("--generator", bench_args.generator, "Instance generator")
      ->check(CLI::IsMember(kGenerators))
      ->capture_default_str();
  bench->add_option("--n", bench_args.ns, "Comma list of agent counts")->capture_default_str();
  bench->add_option("--d", bench_args.ds, "Comma list of dimensions")->capture_default_str();
  bench->add_option("--seeds", bench_args.seeds, "Comma list of seeds")->capture_default_str();
  bench->add_option("--side", bench_args.side, "Side for random generators");
  add_sim_options(bench, bench_args.sim);
  bench->add_option("-o,--out", bench_args.out, "Output path ('-' for stdout)")->capture_default_str();
  bench->add_option("--threads", bench_args.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  bench->add_flag("--no-timing", bench_args.no_timing, "Write 0 for wall time (byte-stable output)");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Analytic n-gon side recurrence as CSV");
  oracle->add_option("--n", oracle_args.n, "Polygon size (>= 4)")->capture_default_str();
  oracle->add_option("--steps", oracle_args.steps, "Stop after this many steps");
  oracle->add_option("-o,--out", oracle_args.out, "Output path ('-' for stdout)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_args);
    if (*run) return cmd_run(run_args);
    if (*verify) return cmd_verify(verify_args);
    if (*bench) return cmd_bench(bench_args);
    if (*oracle) return cmd_oracle(oracle_args);
  } catch (const std::exception& e) {
    std::cerr << "hk: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
