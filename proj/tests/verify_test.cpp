#include "hk/verify.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace hk {
namespace {

VerifyOptions calibrated() {
  VerifyOptions o;
  o.calibration = load_calibration(HK_DEFAULT_CALIBRATION);
  return o;
}

TEST(Verify, CalibrationFileShipsPositiveConstants) {
  const auto c = load_calibration(HK_DEFAULT_CALIBRATION);
  EXPECT_GT(c.movefar_c, 0.0);
  EXPECT_GT(c.gooddir_c0, 0.0);
}

TEST(Verify, SeedDerivationIsStable) {
  EXPECT_EQ(derive_seed(0, 1, 0), derive_seed(0, 1, 0));
  EXPECT_NE(derive_seed(0, 1, 0), derive_seed(0, 1, 1));
  EXPECT_NE(derive_seed(0, 1, 0), derive_seed(0, 2, 0));
  const auto a = one_dim_instances(0);
  ASSERT_EQ(a.size(), 200u);
  for (const auto& s : a) {
    EXPECT_GE(s.n, 2u);
    EXPECT_LE(s.n, 30u);
    EXPECT_EQ(s.side, static_cast<double>(s.n));
  }
  EXPECT_EQ(a[17].make<Rational>(), one_dim_instances(0)[17].make<Rational>());
}

class SuitePasses : public ::testing::TestWithParam<std::string> {};

TEST_P(SuitePasses, WithShippedCalibration) {
  const auto r = run_suite(GetParam(), calibrated());
  std::ostringstream out;
  r.print(out);
  EXPECT_TRUE(r.passed()) << out.str();
  EXPECT_GT(r.instances, 0u);
}

INSTANTIATE_TEST_SUITE_P(All, SuitePasses,
                         ::testing::Values("one_dim", "noisy", "potential", "movefar", "ngon"));

TEST(Verify, SuiteSizes) {
  const auto o = calibrated();
  EXPECT_EQ(verify_potential(o).properties.at("potential").checked > 0, true);
  EXPECT_EQ(verify_potential(o).instances, 150u);
  EXPECT_EQ(verify_noisy(o).instances, 100u);
  EXPECT_EQ(verify_ngon(o).instances, 3u);
}

TEST(Verify, CorruptedStepFailsOneDim) {
  auto o = calibrated();
  o.corrupt_step = true;
  const auto r = verify_one_dim(o);
  EXPECT_FALSE(r.passed());
  std::ostringstream out;
  r.print(out);
  EXPECT_NE(out.str().find("suite one_dim: FAIL"), std::string::npos);
}

TEST(Verify, TooLargeMovefarConstantFails) {
  auto o = calibrated();
  o.calibration.movefar_c = 1e6;
  EXPECT_FALSE(verify_movefar(o).passed());
}

TEST(Verify, UnknownSuite) {
  EXPECT_THROW(run_suite("bogus", calibrated()), std::invalid_argument);
}

TEST(Verify, EmptyReportDoesNotPass) {
  EXPECT_FALSE(SuiteReport{}.passed());
}

}  // namespace
}  // namespace hk
