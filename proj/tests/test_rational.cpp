#include "tanlock/rational.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using tanlock::Rational;

TEST(Rational, NormalizesToLowestTerms) {
    const Rational r(10, -4);
    EXPECT_EQ(r.num(), -5);
    EXPECT_EQ(r.den(), 2);
    EXPECT_EQ(Rational(2, 10), Rational(1, 5));
}

TEST(Rational, ArithmeticAndOrdering) {
    EXPECT_EQ(Rational(1, 5) + Rational(4, 5), Rational(1, 1));
    EXPECT_EQ(Rational(1, 8) - Rational(3, 8), Rational(-1, 4));
    EXPECT_LT(Rational(1, 8), Rational(1, 5));
    EXPECT_GE(Rational(5, 4), Rational(1, 1));
}

TEST(Rational, ParsesFractionsAndIntegers) {
    EXPECT_EQ(Rational::parse("1/8"), Rational(1, 8));
    EXPECT_EQ(Rational::parse(" 3 / 6 "), Rational(1, 2));
    EXPECT_EQ(Rational::parse("2"), Rational(2, 1));
    EXPECT_EQ(Rational(7, 3).to_string(), "7/3");
}

TEST(Rational, RejectsMalformedText) {
    EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("x/2"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("1/"), std::invalid_argument);
    EXPECT_THROW(Rational::parse(""), std::invalid_argument);
}
