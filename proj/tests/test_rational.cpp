#include <doctest.h>

#include "besic/error.hpp"
#include "besic/rational.hpp"

using namespace besic;

TEST_SUITE("rational") {

TEST_CASE("powers of two")
{
    CHECK(pow2(0) == 1);
    CHECK(pow2(3) == 8);
    CHECK(pow2(-4) == Rational(1, 16));
    CHECK(exact_log2(pow2(-200)).value() == -200);
    CHECK_FALSE(exact_log2(Rational(3, 16)).has_value());
    CHECK(is_dyadic(Rational(3, 16)));
    CHECK_FALSE(is_dyadic(Rational(1, 3)));
    CHECK(log2_den(Rational(3, 16)) == 4);
}

TEST_CASE("parsing")
{
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("2^-4") == Rational(1, 16));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("-3") == Rational(-3));
    CHECK(parse_rational("2^3") == Rational(8));
    CHECK(parse_rational("010/3") == Rational(10, 3));
    CHECK(parse_rational("-0.5") == Rational(-1, 2));
    CHECK(parse_rational("1.5e+01") == Rational(15));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
    CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
}

TEST_CASE("floor and ceil")
{
    CHECK(floor(Rational(7, 2)) == 3);
    CHECK(ceil(Rational(7, 2)) == 4);
    CHECK(floor(Rational(-7, 2)) == -4);
    CHECK(ceil(Rational(-7, 2)) == -3);
    CHECK(ceil(Rational(4)) == 4);
}

TEST_CASE("conversion of extreme dyadics")
{
    CHECK(to_real(pow2(-1000)) == std::ldexp(1.0L, -1000));
    CHECK(to_real(Rational(3) * pow2(-5000)) == 3 * std::ldexp(1.0L, -5000));
    const Rational third(1, 3);
    CHECK(std::abs(to_real(third) - 1.0L / 3) <= 1e-19L);
}

TEST_CASE("dyadic json round trip")
{
    for (const Rational& r : {Rational(0), Rational(5, 8), pow2(-300), Rational(BigInt(1) << 90) + 1}) {
        const auto j = dyadic_to_json(r);
        CHECK(dyadic_from_json(j) == r);
    }
    CHECK_THROWS(dyadic_to_json(Rational(1, 3)));
}

}
