#include <catch2/catch_amalgamated.hpp>

#include "mlsg/rational.hpp"

using mlsg::Rational;

TEST_CASE("rational normalization and arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0));

    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
    CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
    CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
    CHECK(-Rational(3, 7) == Rational(-3, 7));
    CHECK(Rational(-3, 7).abs() == Rational(3, 7));
}

TEST_CASE("rational ordering") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(0));
    CHECK(Rational(7, 3) > Rational(2));
    CHECK(Rational(2, 6) <= Rational(1, 3));
    CHECK(Rational(2, 6) >= Rational(1, 3));
}

TEST_CASE("rational parsing") {
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("-3/4") == Rational(-3, 4));
    CHECK(Rational::parse("7") == Rational(7));
    CHECK(Rational::parse("2.5") == Rational(5, 2));
    CHECK(Rational::parse("-0.125") == Rational(-1, 8));
    CHECK(Rational::parse("1.250") == Rational(5, 4));
    CHECK(Rational::parse("10/4") == Rational(5, 2));

    CHECK_THROWS_AS(Rational::parse(""), mlsg::RationalParseError);
    CHECK_THROWS_AS(Rational::parse("1/0"), mlsg::RationalParseError);
    CHECK_THROWS_AS(Rational::parse("1.2.3"), mlsg::RationalParseError);
    CHECK_THROWS_AS(Rational::parse("a/b"), mlsg::RationalParseError);
    CHECK_THROWS_AS(Rational::parse("1/"), mlsg::RationalParseError);
    CHECK_THROWS_AS(Rational::parse("--2"), mlsg::RationalParseError);
}

TEST_CASE("rational round trip through text") {
    for (std::int64_t n = -12; n <= 12; ++n)
        for (std::int64_t d = 1; d <= 9; ++d) {
            Rational r(n, d);
            CHECK(Rational::parse(r.str()) == r);
        }
}

TEST_CASE("rational overflow is detected, not wrapped") {
    Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * Rational(8), mlsg::RationalOverflow);
    CHECK_THROWS_AS(Rational(INT64_MAX, 1) + Rational(INT64_MAX, 1), mlsg::RationalOverflow);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("field laws on a small grid") {
    std::vector<Rational> vals;
    for (int n = -3; n <= 3; ++n)
        for (int d = 1; d <= 3; ++d) vals.push_back(Rational(n, d));
    for (const Rational& a : vals)
        for (const Rational& b : vals) {
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK(a + b - b == a);
            if (!b.is_zero()) CHECK(a / b * b == a);
        }
}
