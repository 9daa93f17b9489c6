#include <doctest.h>

#include "besic/error.hpp"
#include "besic/sequence.hpp"

using namespace besic;

namespace {

Rational rpow(const Rational& x, long e)
{
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= x;
    return r;
}

// Direct search over exponents, written against the defining inequalities:
// Delta_{n+1} largest 2^-k <= c delta_n^{e}; delta_{n+1} largest c 2^-b with
// delta_{n+1} <= c Delta_{n+1}^{1/s_{n+1}} and delta_{n+1} <= c Delta_{n+1} delta_n.
struct Oracle {
    std::vector<Rational> delta, Delta, theta;
};

Oracle oracle(const Rational& s, const Rational& c, int depth, bool demo)
{
    Oracle o;
    o.delta = {1};
    o.Delta = {1};
    o.theta = {c};
    for (int n = 1; n < depth; ++n) {
        const Rational dn = o.delta.back();
        const Rational cap = c * rpow(dn, demo ? 2 : n + 1);
        long k = 0;
        while (pow2(-k) > cap) ++k;
        const Rational D = pow2(-k);
        const int m = n + 1;
        const Rational sm = s == 0 ? Rational(1, m) : s * m / (m + 1);
        const long p = static_cast<long>(numerator(sm));
        const long q = static_cast<long>(denominator(sm));
        long b = 0;
        for (;; ++b) {
            const Rational d = c * pow2(-b);
            // d <= c D^{q/p}  <=>  (d/c)^p <= D^q
            if (rpow(d / c, p) <= rpow(D, q) && d <= c * D * dn) break;
        }
        o.Delta.push_back(D);
        o.delta.push_back(c * pow2(-b));
        o.theta.push_back(c * D * dn);
    }
    return o;
}

void check_against_oracle(const Rational& s, int depth, Profile prof)
{
    const Rational c = pow2(-4);
    const SequenceTable t = derive_sequences(build_schedule(s, depth), c, prof);
    const Oracle o = oracle(s, c, depth, prof == Profile::demo);
    REQUIRE(t.depth() == depth);
    for (int n = 1; n <= depth; ++n) {
        CAPTURE(n);
        CHECK(t.delta(n) == o.delta[n - 1]);
        CHECK(t.Delta(n) == o.Delta[n - 1]);
        CHECK(t.theta(n) == o.theta[n - 1]);
    }
}

} // namespace

TEST_SUITE("sequence") {

TEST_CASE("schedule exponents")
{
    const auto a = build_schedule(Rational(1), 3);
    CHECK(a.at(1) == Rational(1, 2));
    CHECK(a.at(2) == Rational(2, 3));
    CHECK(a.at(3) == Rational(3, 4));
    const auto z = build_schedule(Rational(0), 3);
    CHECK(z.at(2) == Rational(1, 2));
    CHECK(z.at(3) == Rational(1, 3));
    CHECK_THROWS_AS(build_schedule(Rational(2), 3), ConfigError);
    CHECK_THROWS_AS(build_schedule(Rational(1), 0), ConfigError);
}

TEST_CASE("default strict table")
{
    const SequenceTable t = derive_sequences(build_schedule(Rational(1), 3), pow2(-4), Profile::strict);
    CHECK(t.delta(1) == 1);
    CHECK(t.Delta(1) == 1);
    CHECK(t.theta(1) == pow2(-4));
    CHECK(t.delta(2) == pow2(-10));
    CHECK(t.Delta(2) == pow2(-4));
    CHECK(t.theta(2) == pow2(-8));
    CHECK(t.delta(3) == pow2(-50));
    CHECK(t.Delta(3) == pow2(-34));
    CHECK(t.theta(3) == pow2(-48));
    CHECK(t.c2 == Rational(3, 4));
    CHECK(validate_sequences(t).passed());
}

TEST_CASE("tables agree with the exponent search")
{
    check_against_oracle(Rational(1), 3, Profile::strict);
    check_against_oracle(Rational(1, 2), 3, Profile::strict);
    check_against_oracle(Rational(0), 3, Profile::strict);
    check_against_oracle(Rational(1), 4, Profile::demo);
    check_against_oracle(Rational(1, 2), 4, Profile::demo);
}

TEST_CASE("theta ratios are integers and every constraint holds")
{
    for (const Rational& s : {Rational(0), Rational(1, 2), Rational(1)})
        for (Profile p : {Profile::strict, Profile::demo}) {
            const SequenceTable t = derive_sequences(build_schedule(s, 3), pow2(-4), p);
            const auto rep = validate_sequences(t);
            CHECK(rep.passed());
            CHECK(rep.failures() == 0);
            for (int n = 1; n < t.depth(); ++n) CHECK(is_integer(t.theta(n) / t.theta(n + 1)));
        }
}

TEST_CASE("invalid constants")
{
    const auto sch = build_schedule(Rational(1), 3);
    CHECK_THROWS_AS(derive_sequences(sch, Rational(1, 8), Profile::strict), ConfigError);
    CHECK_THROWS_AS(derive_sequences(sch, Rational(3, 64), Profile::strict), ConfigError);
    CHECK_THROWS_AS(derive_sequences(sch, Rational(1, 3), Profile::strict), ConfigError);
    CHECK_THROWS_AS(derive_sequences(sch, pow2(-4), Profile::strict, Rational(1)), ConfigError);
}

TEST_CASE("depth beyond the exponent range")
{
    bool threw = false;
    try {
        derive_sequences(build_schedule(Rational(1), 7), pow2(-4), Profile::strict);
    } catch (const DepthUnreachable& e) {
        threw = true;
        CHECK(e.max_depth() == 6);
        CHECK(e.code() == ExitCode::resource_cap);
    }
    CHECK(threw);
}

TEST_CASE("corrupted table fails validation")
{
    SequenceTable t = derive_sequences(build_schedule(Rational(1), 3), pow2(-4), Profile::strict);
    t.delta_seq[2] = t.delta_seq[2] * 1024 * 1024 * 1024;
    CHECK_FALSE(validate_sequences(t).passed());
}

TEST_CASE("json round trip")
{
    const SequenceTable t = derive_sequences(build_schedule(Rational(1, 2), 3), pow2(-4), Profile::demo);
    const SequenceTable u = table_from_json(to_json(t));
    CHECK(u.profile == t.profile);
    CHECK(u.delta_seq == t.delta_seq);
    CHECK(u.Delta_seq == t.Delta_seq);
    CHECK(u.theta_seq == t.theta_seq);
    CHECK(u.schedule.s == t.schedule.s);
    CHECK(to_json(u).dump() == to_json(t).dump());
}

}
