#include "besic/sequence.hpp"

#include <limits>

#include "besic/error.hpp"

namespace besic {

namespace mp = boost::multiprecision;

Profile parse_profile(const std::string& text)
{
    if (text == "strict") return Profile::strict;
    if (text == "demo") return Profile::demo;
    throw ConfigError("unknown profile '" + text + "' (expected strict|demo)");
}

const char* to_string(Profile p) { return p == Profile::strict ? "strict" : "demo"; }

const Rational& DimensionSchedule::at(int n) const
{
    if (n < 1 || n > depth()) throw ConfigError("schedule level " + std::to_string(n) + " out of range");
    return exponents[static_cast<std::size_t>(n - 1)];
}

DimensionSchedule build_schedule(const Rational& s, int depth)
{
    if (s < 0 || s > 1) throw ConfigError("target dimension s = " + to_string(s) + " outside [0, 1]");
    if (depth < 1) throw ConfigError("schedule depth must be >= 1");
    DimensionSchedule out;
    out.s = s;
    out.exponents.reserve(static_cast<std::size_t>(depth));
    for (int n = 1; n <= depth; ++n) {
        if (s == 0)
            out.exponents.emplace_back(Rational(1, n));
        else
            out.exponents.emplace_back(s * n / (n + 1));
    }
    return out;
}

namespace {

const Rational& at_level(const std::vector<Rational>& v, int n, const char* what)
{
    if (n < 1 || n > static_cast<int>(v.size()))
        throw ConfigError(std::string(what) + " level " + std::to_string(n) + " out of range");
    return v[static_cast<std::size_t>(n - 1)];
}

// Smallest exponent e for which 2^-e still leaves headroom for the
// products formed by the geometry code.
constexpr long kMaxExponent = -(std::numeric_limits<Real>::min_exponent + 64);

} // namespace

const Rational& SequenceTable::delta(int n) const { return at_level(delta_seq, n, "delta"); }
const Rational& SequenceTable::Delta(int n) const { return at_level(Delta_seq, n, "Delta"); }
const Rational& SequenceTable::theta(int n) const { return at_level(theta_seq, n, "theta"); }

long SequenceTable::theta_exponent(int n) const
{
    auto e = exact_log2(theta(n));
    if (!e) throw ConfigError("theta_" + std::to_string(n) + " is not a power of two");
    return -*e;
}

SequenceTable derive_sequences(const DimensionSchedule& schedule, const Rational& c, Profile profile,
                               const Rational& c1, Real tube_constant)
{
    const auto c_exp = exact_log2(c);
    if (!c_exp) throw ConfigError("c = " + to_string(c) + " must be a power of two");
    if (c >= Rational(1, 10)) throw ConfigError("c = " + to_string(c) + " must be < 1/10");
    if (c1 * c1 < 2) throw ConfigError("c1 = " + to_string(c1) + " must be >= sqrt(2)");
    const Rational c2 = 4 * c * (c1 + 1);
    if (c * (1 + c2) >= 1) throw ConfigError("c(1 + 4c(c1 + 1)) must be < 1");
    if (3 * c * c1 >= Rational(1, 2)) throw ConfigError("3 c c1 must be < 1/2");
    if (!(tube_constant > 1)) throw ConfigError("tube constant C must be > 1");

    SequenceTable t;
    t.profile = profile;
    t.schedule = schedule;
    t.c = c;
    t.c1 = c1;
    t.c2 = c2;
    t.tube_constant = tube_constant;

    const long gamma = -*c_exp;
    // delta_n = 2^-d, Delta_n = 2^-D.
    std::vector<long> d{0};
    std::vector<long> D{0};
    for (int n = 1; n < schedule.depth(); ++n) {
        const long dn = d.back();
        const long e = profile == Profile::strict ? n + 1 : 2;
        const long D_next = gamma + e * dn;
        const Rational& s_next = schedule.at(n + 1);
        const long by_schedule = static_cast<long>(ceil(Rational(D_next) / s_next));
        const long by_width = D_next + dn;
        const long d_next = gamma + std::max(by_schedule, by_width);
        const long theta_exp = gamma + D_next + dn;
        if (D_next > kMaxExponent || d_next > kMaxExponent || theta_exp > kMaxExponent || D_next < 0)
            throw DepthUnreachable("depth " + std::to_string(schedule.depth()) +
                                       " unreachable: level " + std::to_string(n + 1) +
                                       " exponents leave the representable range; max achievable depth is " +
                                       std::to_string(n),
                                   n);
        d.push_back(d_next);
        D.push_back(D_next);
    }

    for (std::size_t i = 0; i < d.size(); ++i) {
        t.delta_seq.push_back(pow2(-d[i]));
        t.Delta_seq.push_back(pow2(-D[i]));
        if (i == 0)
            t.theta_seq.push_back(c);
        else
            t.theta_seq.push_back(c * t.Delta_seq[i] * t.delta_seq[i - 1]);
    }
    return t;
}

bool ConstraintReport::passed() const { return failures() == 0; }

std::size_t ConstraintReport::failures() const
{
    std::size_t n = 0;
    for (const auto& ch : checks)
        if (!ch.skipped && !ch.passed) ++n;
    return n;
}

namespace {

Rational frac(const Rational& r) { return r - Rational(floor(r)); }

ConstraintCheck le(std::string name, int level, const Rational& lhs, const Rational& rhs, std::string detail = {})
{
    ConstraintCheck ch{std::move(name), level, lhs <= rhs, false, lhs, rhs, rhs - lhs, std::move(detail)};
    return ch;
}

ConstraintCheck lt(std::string name, int level, const Rational& lhs, const Rational& rhs, std::string detail = {})
{
    ConstraintCheck ch{std::move(name), level, lhs < rhs, false, lhs, rhs, rhs - lhs, std::move(detail)};
    return ch;
}

ConstraintCheck eq(std::string name, int level, const Rational& lhs, const Rational& rhs)
{
    ConstraintCheck ch{std::move(name), level, lhs == rhs, false, lhs, rhs, rhs - lhs, {}};
    return ch;
}

ConstraintCheck natural(std::string name, int level, const Rational& value)
{
    ConstraintCheck ch{std::move(name), level, value >= 1 && is_integer(value), false, value, Rational(0),
                       frac(value), {}};
    return ch;
}

Rational rpow(const Rational& base, long e)
{
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace

ConstraintReport validate_sequences(const SequenceTable& t)
{
    ConstraintReport rep;
    auto& out = rep.checks;
    const Rational& c = t.c;

    out.push_back(lt("c < 1/10", 0, c, Rational(1, 10)));
    out.push_back(eq("c2 = 4c(c1+1)", 0, t.c2, 4 * c * (t.c1 + 1)));
    out.push_back(lt("c(1+c2) < 1", 0, c * (1 + t.c2), Rational(1)));
    out.push_back(lt("3 c c1 < 1/2", 0, 3 * c * t.c1, Rational(1, 2)));
    out.push_back(le("c1^2 >= 2", 0, Rational(2), t.c1 * t.c1));
    {
        ConstraintCheck ch{"dyadic c", 0, is_dyadic(c), false, c, Rational(0), Rational(0), {}};
        out.push_back(ch);
    }
    if (t.depth() < 1) return rep;

    out.push_back(eq("initial: delta_1 = 1", 1, t.delta(1), Rational(1)));
    out.push_back(eq("initial: Delta_1 = 1", 1, t.Delta(1), Rational(1)));
    out.push_back(eq("theta_1 = c", 1, t.theta(1), c));

    for (int n = 1; n <= t.depth(); ++n) {
        for (auto [label, value] : {std::pair<const char*, const Rational*>{"delta", &t.delta(n)},
                                    {"Delta", &t.Delta(n)},
                                    {"theta", &t.theta(n)}}) {
            ConstraintCheck ch{std::string("dyadic ") + label, n, is_dyadic(*value) && *value > 0, false, *value,
                               Rational(0), Rational(0), is_dyadic(*value) ? "" : "non-dyadic entry"};
            out.push_back(ch);
        }
    }

    for (int n = 1; n < t.depth(); ++n) {
        const Rational& dn = t.delta(n);
        const Rational& Dn = t.Delta(n);
        const Rational& d1 = t.delta(n + 1);
        const Rational& D1 = t.Delta(n + 1);
        const int m = n + 1;

        if (t.profile == Profile::strict) {
            out.push_back(le("height decay: Delta_{n+1} <= c delta_n^{n+1}", m, D1, c * rpow(dn, n + 1)));
        } else {
            ConstraintCheck skipped =
                le("height decay: Delta_{n+1} <= c delta_n^{n+1}", m, D1, c * rpow(dn, n + 1), "demo profile: not enforced");
            skipped.skipped = true;
            out.push_back(skipped);
            out.push_back(le("height decay (demo): Delta_{n+1} <= c delta_n^2", m, D1, c * dn * dn));
        }
        out.push_back(le("width: delta_{n+1} <= c Delta_{n+1} delta_n", m, d1, c * D1 * dn));
        out.push_back(eq("theta_{n+1} = c Delta_{n+1} delta_n", m, t.theta(n + 1), c * D1 * dn));
        out.push_back(natural("theta_n / theta_{n+1} in N", m, t.theta(n) / t.theta(n + 1)));
        if (n == 1)
            out.push_back(natural("integrality: Delta_2^{-1} in N", m, 1 / D1));
        else
            out.push_back(natural("integrality: Delta_{n+1}^{-1} delta_n^{-1} Delta_n delta_{n-1} in N", m,
                                  Dn * t.delta(n - 1) / (D1 * dn)));
        out.push_back(lt("narrowing delta_{n+1}/Delta_{n+1} < delta_n/Delta_n", m, d1 / D1, dn / Dn));
        out.push_back(lt("Delta decreasing", m, D1, Dn));

        if (m <= t.schedule.depth()) {
            // delta <= c Delta^{1/s}  <=>  (delta/c)^p <= Delta^q  for s = p/q.
            const Rational& s = t.schedule.at(m);
            const long p = static_cast<long>(mp::numerator(s));
            const long q = static_cast<long>(mp::denominator(s));
            if (p > 0)
                out.push_back(le("schedule delta_n <= c Delta_n^{1/s_n}", m, rpow(d1 / c, p), rpow(D1, q)));
        }
    }
    return rep;
}

namespace {

nlohmann::json rational_json(const Rational& r)
{
    if (is_dyadic(r)) return dyadic_to_json(r);
    return nlohmann::json{{"rational", to_string(r)}};
}

Rational rational_from(const nlohmann::json& j)
{
    if (j.is_object() && j.contains("rational")) return parse_rational(j["rational"].get<std::string>());
    return dyadic_from_json(j);
}

} // namespace

nlohmann::json to_json(const SequenceTable& t)
{
    nlohmann::json j;
    j["profile"] = to_string(t.profile);
    j["depth"] = t.depth();
    j["s"] = to_string(t.schedule.s);
    nlohmann::json sn = nlohmann::json::array();
    for (const auto& e : t.schedule.exponents) sn.push_back(to_string(e));
    j["s_n"] = sn;
    j["c"] = rational_json(t.c);
    j["c1"] = rational_json(t.c1);
    j["c2"] = rational_json(t.c2);
    j["C_tube"] = static_cast<double>(t.tube_constant);
    auto arr = [](const std::vector<Rational>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& r : v) a.push_back(rational_json(r));
        return a;
    };
    j["delta"] = arr(t.delta_seq);
    j["Delta"] = arr(t.Delta_seq);
    j["theta"] = arr(t.theta_seq);
    return j;
}

SequenceTable table_from_json(const nlohmann::json& j)
{
    try {
        SequenceTable t;
        t.profile = parse_profile(j.at("profile").get<std::string>());
        t.schedule.s = parse_rational(j.at("s").get<std::string>());
        for (const auto& e : j.at("s_n")) t.schedule.exponents.push_back(parse_rational(e.get<std::string>()));
        t.c = rational_from(j.at("c"));
        t.c1 = rational_from(j.at("c1"));
        t.c2 = rational_from(j.at("c2"));
        t.tube_constant = j.at("C_tube").get<double>();
        for (const auto& e : j.at("delta")) t.delta_seq.push_back(rational_from(e));
        for (const auto& e : j.at("Delta")) t.Delta_seq.push_back(rational_from(e));
        for (const auto& e : j.at("theta")) t.theta_seq.push_back(rational_from(e));
        if (t.Delta_seq.size() != t.delta_seq.size() || t.theta_seq.size() != t.delta_seq.size())
            throw ConfigError("sequence table arrays differ in length");
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed sequence table JSON: ") + e.what());
    }
}

nlohmann::json to_json(const ConstraintReport& rep)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& ch : rep.checks) {
        nlohmann::json e;
        e["name"] = ch.name;
        e["level"] = ch.level;
        e["status"] = ch.skipped ? "skipped" : (ch.passed ? "pass" : "fail");
        e["lhs"] = rational_json(ch.lhs);
        e["rhs"] = rational_json(ch.rhs);
        e["slack"] = rational_json(ch.slack);
        if (!ch.detail.empty()) e["detail"] = ch.detail;
        checks.push_back(e);
    }
    return {{"passed", rep.passed()}, {"failures", rep.failures()}, {"checks", checks}};
}

} // namespace besic
