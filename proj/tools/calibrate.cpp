// Derives the movefar and good-direction constants from the verify-suite
// instance distributions and writes them as a calibration file.
//
// movefar_c  = safety * min over non-merge steps of  max_displacement * n^4 * d
// gooddir_c0 = safety * min over instances of  normalized margin (10^4 samples)

#include "hk/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

struct Minimum {
  double value = std::numeric_limits<double>::infinity();
  std::string where;

  void offer(double v, const std::string& label) {
    if (v < value) {
      value = v;
      where = label;
    }
  }
};

template <hk::Scalar S>
void scan_movefar(Minimum& m, std::size_t& steps, const std::vector<hk::InstanceSpec>& specs,
                  const hk::SimParams& p) {
  for (const auto& spec : specs) {
    const auto traj = hk::simulate(spec.make<S>(), p);
    const double n = static_cast<double>(spec.n);
    for (const auto& s : traj.steps) {
      if (!s.merge_events.empty()) continue;
      ++steps;
      m.offer(s.max_displacement() * n * n * n * n * static_cast<double>(spec.d),
              spec.label + " n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d) +
                  " t=" + std::to_string(s.time));
    }
  }
}

// Three significant digits, rounded down.
double round_down(double v) {
  if (!(v > 0)) return 0.0;
  const double scale = std::pow(10.0, std::floor(std::log10(v)) - 2);
  return std::floor(v / scale) * scale;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the movefar and good-direction constants"};
  std::string out_path = "config/calibration.txt";
  std::uint64_t seeds = 5;
  double safety = 0.5;
  std::size_t samples = 10000;
  app.add_option("-o,--out", out_path, "Output calibration file")->capture_default_str();
  app.add_option("--seeds", seeds, "Suite seeds 0..seeds-1 to scan")->capture_default_str();
  app.add_option("--safety", safety, "Factor applied to each observed minimum")->capture_default_str();
  app.add_option("--samples", samples, "good_direction samples per instance")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  Minimum movefar, gooddir;
  std::size_t steps = 0, instances = 0;
  const auto pe = hk::SimParams::exact();
  const auto pf = hk::SimParams::float64();
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    scan_movefar<hk::Rational>(movefar, steps, hk::one_dim_instances(seed), pe);
    scan_movefar<hk::Rational>(movefar, steps, hk::potential_line_instances(seed), pe);
    scan_movefar<hk::Rational>(movefar, steps, hk::movefar_exact_instances(seed), pe);
    scan_movefar<double>(movefar, steps, hk::float_box_instances(seed), pf);
    for (const auto& spec : hk::gooddir_instances(seed)) {
      const auto dir = hk::good_direction(spec.make<double>(), samples,
                                          hk::derive_seed(spec.seed, hk::kStreamGoodDir, 0), pf);
      ++instances;
      if (dir.defined) gooddir.offer(dir.normalized_margin, spec.label + " seed=" + std::to_string(seed));
    }
  }

  const double c = round_down(safety * movefar.value);
  const double c0 = round_down(safety * gooddir.value);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << "# hk-calibration v1\n"
      << "# produced by hk_calibrate --seeds " << seeds << " --safety " << safety << " --samples "
      << samples << "\n"
      << "# movefar: min displacement*n^4*d = " << movefar.value << " over " << steps
      << " non-merge steps (" << movefar.where << ")\n"
      << "# good_direction: min normalized margin = " << gooddir.value << " over " << instances
      << " instances (" << gooddir.where << ")\n"
      << "movefar_c = " << c << "\n"
      << "gooddir_c0 = " << c0 << "\n";
  std::cout << "movefar_c = " << c << "  (min " << movefar.value << " at " << movefar.where << ")\n"
            << "gooddir_c0 = " << c0 << "  (min " << gooddir.value << " at " << gooddir.where << ")\n";
  return 0;
}
