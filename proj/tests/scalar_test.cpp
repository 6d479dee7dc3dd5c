#include "hk/scalar.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hk {
namespace {

TEST(RationalParse, AcceptsFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_scalar<Rational>("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_scalar<Rational>("-7/2"), Rational(-7, 2));
  EXPECT_EQ(parse_scalar<Rational>("42"), Rational(42));
  EXPECT_EQ(parse_scalar<Rational>("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_scalar<Rational>("-1.5e-1"), Rational(-3, 20));
  EXPECT_EQ(parse_scalar<Rational>(" 2e3 "), Rational(2000));
}

TEST(RationalParse, RejectsMalformed) {
  EXPECT_THROW(parse_scalar<Rational>("1/0"), ParseError);
  EXPECT_THROW(parse_scalar<Rational>("abc"), ParseError);
  EXPECT_THROW(parse_scalar<Rational>("1/2/3"), ParseError);
  EXPECT_THROW(parse_scalar<Rational>(""), ParseError);
}

TEST(RationalFormat, LowestTerms) {
  EXPECT_EQ(format_scalar(Rational(6, 4)), "3/2");
  EXPECT_EQ(format_scalar(Rational(5)), "5");
}

TEST(FloatParse, DecimalsAndFractions) {
  EXPECT_DOUBLE_EQ(parse_scalar<double>("0.1"), 0.1);
  EXPECT_DOUBLE_EQ(parse_scalar<double>("1/4"), 0.25);
  EXPECT_THROW(parse_scalar<double>("1.2.3"), ParseError);
}

TEST(Exactness, DoubleToRationalIsExact) {
  EXPECT_EQ(ScalarTraits<Rational>::from_double(0.5), Rational(1, 2));
  const Rational tenth = ScalarTraits<Rational>::from_double(0.1);
  EXPECT_NE(tenth, Rational(1, 10));
  EXPECT_EQ(tenth.get_d(), 0.1);
}

// Formatting then parsing is the identity in both modes.
TEST(RoundTrip, RandomValues) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const double d = std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 80)) *
                     ((rng() & 1) ? 1 : -1);
    EXPECT_EQ(parse_scalar<double>(format_scalar(d)), d);
    Rational q(mpz_class(static_cast<long>(rng() % 1000000) - 500000),
               mpz_class(static_cast<long>(rng() % 999999) + 1));
    q.canonicalize();
    EXPECT_EQ(parse_scalar<Rational>(format_scalar(q)), q);
  }
}

TEST(BitSize, CountsNumeratorAndDenominator) {
  EXPECT_EQ(ScalarTraits<Rational>::bit_size(Rational(3, 4)), 5u);
  EXPECT_EQ(ScalarTraits<double>::bit_size(0.75), 0u);
}

}  // namespace
}  // namespace hk
