#include "hk/instances.hpp"
#include "hk/io.hpp"
#include "hk/monitors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

namespace hk {
namespace {

using Q = Rational;
const SimParams kExact = SimParams::exact();
const SimParams kFloat = SimParams::float64();

TEST(InstanceFile, WriteThenRead) {
  const auto c = Configuration<Q>({{Q(0), Q(1, 3)}, {Q(-7, 2), Q(5)}}, 2);
  std::stringstream ss;
  write_instance(ss, c);
  EXPECT_EQ(ss.str(), "# hk-instance v1 mode=exact n=2 d=2\n0 1/3\n-7/2 5\n");
  EXPECT_EQ(read_instance<Q>(ss), c);
}

TEST(InstanceFile, CommentsBlanksAndDecimals) {
  std::istringstream in("# header\n\n  0.25\n# note\n1e-1\n3/4\r\n");
  const auto c = read_instance<Q>(in);
  EXPECT_EQ(c.positions, (std::vector<Point<Q>>{{Q(1, 4)}, {Q(1, 10)}, {Q(3, 4)}}));
}

TEST(InstanceFile, FloatRoundTripIsExact) {
  const auto c = random_box<double>(30, 3, 7.0, 5);
  std::stringstream ss;
  write_instance(ss, c);
  EXPECT_EQ(read_instance<double>(ss), c);
}

TEST(InstanceFile, Errors) {
  std::istringstream ragged("0 1\n2\n");
  try {
    read_instance<Q>(ragged);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream junk("0\nabc\n");
  EXPECT_THROW(read_instance<Q>(junk), ParseError);
  std::istringstream zero("1/0\n");
  EXPECT_THROW(read_instance<Q>(zero), ParseError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_instance<Q>(empty), ParseError);
  EXPECT_THROW(load_instance<Q>("/nonexistent/instance.txt"), std::runtime_error);
}

TEST(NoisySidecar, RoundTrip) {
  const auto noisy = random_etas<Q>(5, Q(1, 2), 3);
  const auto j = noisy_to_json(noisy);
  EXPECT_EQ(j.at("format"), "hk-noisy-params");
  EXPECT_EQ(j.at("version"), 1);
  const auto back = noisy_from_json<Q>(j);
  EXPECT_EQ(back.eta, noisy.eta);
  EXPECT_EQ(back.etas, noisy.etas);
  const auto plain = noisy_from_json<Q>(nlohmann::json::parse(R"({"eta":0.5,"etas":["1/10",0.25]})"));
  EXPECT_EQ(plain.etas, (std::vector<Q>{Q(1, 10), Q(1, 4)}));
}

TEST(NoisySidecar, FileErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "hk_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bad.json").string();
  std::ofstream(path) << "{not json";
  EXPECT_THROW(load_noisy<Q>(path), ParseError);
  EXPECT_THROW(load_noisy<Q>((dir / "missing.json").string()), std::runtime_error);
}

template <class S>
std::string dump(const Trajectory<S>& t) {
  std::ostringstream out;
  write_trajectory_jsonl(out, t);
  return out.str();
}

TEST(TrajectoryJsonl, RecordsForUnitLine) {
  const auto traj = simulate(unit_line<Q>(3), kExact);
  std::istringstream in(dump(traj));
  std::vector<nlohmann::json> recs;
  for (std::string line; std::getline(in, line);) recs.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[0]["record"], "header");
  EXPECT_EQ(recs[0]["format"], "hk-trajectory");
  EXPECT_EQ(recs[1]["record"], "step");
  EXPECT_EQ(recs[1]["t"], 1);
  EXPECT_EQ(recs[1]["positions"], nlohmann::json::parse(R"([["1/2"],["1"],["3/2"]])"));
  EXPECT_EQ(recs[1]["max_sq_displacement"], "1/4");
  EXPECT_DOUBLE_EQ(recs[1]["max_displacement"].get<double>(), 0.5);
  EXPECT_EQ(recs[3]["record"], "summary");
  EXPECT_EQ(recs[3]["converged_at"], 2);
  EXPECT_EQ(recs[3]["budget_exhausted"], false);
}

TEST(TrajectoryJsonl, ExactRoundTripIsStringExact) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    auto mons = make_monitors<Q>({{"all"}, 1, false, 1e-6}, kExact);
    const auto traj = simulate(random_interval<Q>(n, static_cast<double>(n), rng()), kExact, &mons);
    const std::string text = dump(traj);
    std::istringstream in(text);
    const auto back = read_trajectory_jsonl<Q>(in);
    EXPECT_EQ(dump(back), text);
    EXPECT_EQ(back.initial, traj.initial);
    EXPECT_EQ(back.final, traj.final);
    EXPECT_EQ(back.converged_at, traj.converged_at);
    ASSERT_EQ(back.steps.size(), traj.steps.size());
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
      EXPECT_EQ(back.steps[k].config, traj.steps[k].config);
      EXPECT_EQ(back.steps[k].sq_displacements, traj.steps[k].sq_displacements);
      EXPECT_EQ(back.steps[k].monitor_outcomes.size(), traj.steps[k].monitor_outcomes.size());
    }
  }
}

TEST(TrajectoryJsonl, FloatRoundTripIsBitExact) {
  const auto traj = simulate(random_box<double>(12, 2, 2.0, 4), kFloat);
  const std::string text = dump(traj);
  std::istringstream in(text);
  const auto back = read_trajectory_jsonl<double>(in);
  EXPECT_EQ(back.final, traj.final);
  EXPECT_EQ(dump(back), text);
}

TEST(TrajectoryJsonl, Errors) {
  std::istringstream no_summary(R"({"record":"header","format":"hk-trajectory","version":1,"mode":"exact","n":1,"d":1,"t":0,"positions":[["0"]]})");
  EXPECT_THROW(read_trajectory_jsonl<Q>(no_summary), ParseError);
  std::istringstream wrong_mode(R"({"record":"header","format":"hk-trajectory","version":1,"mode":"float","n":1,"d":1,"t":0,"positions":[["0"]]})");
  EXPECT_THROW(read_trajectory_jsonl<Q>(wrong_mode), ParseError);
  std::istringstream bad_version(R"({"record":"header","format":"hk-trajectory","version":9,"mode":"exact","n":1,"d":1,"t":0,"positions":[["0"]]})");
  EXPECT_THROW(read_trajectory_jsonl<Q>(bad_version), ParseError);
}

TEST(TrajectoryCsv, LongFormat) {
  const auto traj = simulate(Configuration<Q>::line({Q(0), Q(1)}), kExact);
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  EXPECT_EQ(out.str(),
            "# hk-trajectory-csv v1 mode=exact converged_at=1\n"
            "t,agent,x0\n0,0,0\n0,1,1\n1,0,1/2\n1,1,1/2\n");
}

TEST(BenchCsv, HeaderAndRows) {
  std::vector<BenchRecord> rows(2);
  rows[0] = {"unit_line", 1, 1, 0, "exact", 0, 8, 0.5, 2, std::nullopt};
  rows[1] = {"ngon", 8, 2, 0, "float", std::nullopt, 16384, 0.25, 0, 3};
  std::ostringstream out;
  write_bench_csv(out, rows);
  EXPECT_EQ(out.str(),
            "# hk-bench v1\n"
            "generator,n,d,seed,mode,converged_at,budget_exhausted,max_steps,wall_time_s,max_bits,"
            "lower_bound\n"
            "unit_line,1,1,0,exact,0,0,8,0.5,2,\n"
            "ngon,8,2,0,float,,1,16384,0.25,0,3\n");
}

TEST(OracleCsv, OctagonHorizon) {
  const auto states = ngon_oracle_run(8);
  ASSERT_EQ(states.size(), 4u);
  std::ostringstream out;
  write_oracle_csv(out, states);
  EXPECT_EQ(out.str().substr(0, 35), "# hk-ngon-oracle v1 n=8\nt,side,vali");
  EXPECT_EQ(ngon_oracle_run(8, 1).size(), 2u);
}

TEST(CalibrationFile, ParseAndErrors) {
  std::istringstream ok("# hk-calibration v1\nmovefar_c = 0.25\n\ngooddir_c0=1e-3\n");
  const auto c = read_calibration(ok);
  EXPECT_EQ(c.movefar_c, 0.25);
  EXPECT_EQ(c.gooddir_c0, 1e-3);
  std::istringstream unversioned("movefar_c = 1\ngooddir_c0 = 1\n");
  EXPECT_THROW(read_calibration(unversioned), ParseError);
  std::istringstream missing("# hk-calibration v1\nmovefar_c = 1\n");
  EXPECT_THROW(read_calibration(missing), ParseError);
  std::istringstream garbage("# hk-calibration v1\nmovefar_c 1\n");
  EXPECT_THROW(read_calibration(garbage), ParseError);
}

TEST(Monitors, MakeByName) {
  EXPECT_EQ(make_monitors<Q>({{"all"}, 1, false, 1.0}, kExact).size(), 9u);
  EXPECT_EQ(make_monitors<double>({{"all"}, 3, false, 1.0}, kFloat).size(), 5u);
  EXPECT_THROW(make_monitors<Q>({{"nope"}, 1, false, 1.0}, kExact), std::invalid_argument);
  EXPECT_THROW(make_monitors<double>({{"order"}, 2, false, 1.0}, kFloat), std::invalid_argument);
  EXPECT_THROW(make_monitors<Q>({{"noisy_leftmove"}, 1, false, 1.0}, kExact), std::invalid_argument);
  const auto noisy = random_etas<Q>(3, Q(1, 2), 1);
  EXPECT_EQ(make_monitors<Q>({{"all"}, 1, true, 1.0}, kExact, &noisy).size(), 3u);
  EXPECT_THROW(make_monitors<Q>({{"weight"}, 1, true, 1.0}, kExact, &noisy), std::invalid_argument);
}

}  // namespace
}  // namespace hk
