#include "svcp/rational.hpp"

#include <gtest/gtest.h>

using namespace svcp;

TEST(Rational, FractionStringIsLowestTerms) {
    EXPECT_EQ(to_fraction_string(make_rational(2, 6)), "1/3");
    EXPECT_EQ(to_fraction_string(make_rational(4, 2)), "2/1");
    EXPECT_EQ(to_fraction_string(make_rational(0, 5)), "0/1");
    EXPECT_EQ(to_fraction_string(make_rational(-3, 9)), "-1/3");
}

TEST(Rational, DecimalUsesTwelveSignificantDigits) {
    EXPECT_EQ(to_decimal_string(make_rational(1, 3)), "0.333333333333");
    EXPECT_EQ(to_decimal_string(make_rational(2, 3)), "0.666666666667");
    EXPECT_EQ(to_decimal_string(make_rational(1, 2)), "0.5");
    EXPECT_EQ(to_decimal_string(make_rational(0)), "0");
    EXPECT_EQ(to_decimal_string(make_rational(100)), "100");
    EXPECT_EQ(to_decimal_string(make_rational(-1, 8)), "-0.125");
    EXPECT_EQ(to_decimal_string(make_rational(1, 1000)), "0.001");
    EXPECT_EQ(to_decimal_string(make_rational(1, 7000)), "0.000142857142857");
    EXPECT_EQ(to_decimal_string(make_rational(123456789, 1000)), "123456.789");
}

TEST(Rational, DecimalRoundsHalfToEven) {
    EXPECT_EQ(to_decimal_string(make_rational(5, 2), 1), "2");
    EXPECT_EQ(to_decimal_string(make_rational(7, 2), 1), "4");
    EXPECT_EQ(to_decimal_string(make_rational(25, 100), 1), "0.2");
    EXPECT_EQ(to_decimal_string(make_rational(35, 100), 1), "0.4");
    EXPECT_EQ(to_decimal_string(make_rational(999999, 100000), 2), "10");
    // 1/8 = 0.125 exactly: tie at three digits goes to the even 0.12
    EXPECT_EQ(to_decimal_string(make_rational(1, 8), 2), "0.12");
}

TEST(Rational, LargeIntegersRenderWithoutExponent) {
    EXPECT_EQ(to_decimal_string(Rational{mpz_class{"123456789012345678"}}), "123456789012000000");
}

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
    EXPECT_EQ(parse_rational("1/3"), make_rational(1, 3));
    EXPECT_EQ(parse_rational("6/4"), make_rational(3, 2));
    EXPECT_EQ(parse_rational("7"), make_rational(7));
    EXPECT_EQ(parse_rational("3.25"), make_rational(13, 4));
    EXPECT_EQ(parse_rational("-0.5"), make_rational(-1, 2));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
    EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

TEST(Rational, PositivePart) {
    EXPECT_EQ(positive_part(make_rational(-1, 2)), 0);
    EXPECT_EQ(positive_part(make_rational(1, 2)), make_rational(1, 2));
}
