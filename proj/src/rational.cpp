#include "besic/rational.hpp"

#include <cctype>

#include "besic/error.hpp"

namespace besic {

namespace mp = boost::multiprecision;

Rational pow2(long e)
{
    BigInt one = 1;
    if (e >= 0) return Rational(BigInt(one << static_cast<unsigned>(e)));
    return Rational(one, BigInt(one << static_cast<unsigned>(-e)));
}

namespace {

// Decimal only; the BigInt string constructor reads a leading 0 as octal.
BigInt parse_integer(std::string digits)
{
    bool negative = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
        negative = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("not a decimal integer: '" + digits + "'");
    const auto first = digits.find_first_not_of('0');
    BigInt v(first == std::string::npos ? std::string("0") : digits.substr(first));
    return negative ? BigInt(-v) : v;
}

bool is_pow2(const BigInt& v)
{
    return v > 0 && (v & (v - 1)) == 0;
}

long msb_of(const BigInt& v) { return static_cast<long>(mp::msb(v)); }

} // namespace

bool is_dyadic(const Rational& r) { return is_pow2(mp::denominator(r)); }

long log2_den(const Rational& r)
{
    const BigInt& d = mp::denominator(r);
    if (!is_pow2(d)) throw ConfigError("value " + to_string(r) + " is not a dyadic rational");
    return msb_of(d);
}

std::optional<long> exact_log2(const Rational& r)
{
    const BigInt& n = mp::numerator(r);
    const BigInt& d = mp::denominator(r);
    if (!is_pow2(n) || !is_pow2(d)) return std::nullopt;
    return msb_of(n) - msb_of(d);
}

bool is_integer(const Rational& r) { return mp::denominator(r) == 1; }

BigInt floor(const Rational& r)
{
    const BigInt& n = mp::numerator(r);
    const BigInt& d = mp::denominator(r);
    BigInt q = n / d;
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

BigInt ceil(const Rational& r)
{
    BigInt f = floor(r);
    return f * mp::denominator(r) == mp::numerator(r) ? f : f + 1;
}

Real to_real(const Rational& r)
{
    BigInt n = mp::numerator(r);
    BigInt d = mp::denominator(r);
    if (n == 0) return 0;
    const bool negative = n < 0;
    if (negative) n = -n;
    // Keep 64 significant bits of each side, then rescale by the dropped bits.
    const long sn = std::max(0L, msb_of(n) - 63);
    const long sd = std::max(0L, msb_of(d) - 63);
    const Real num = static_cast<Real>(static_cast<unsigned long long>(n >> static_cast<unsigned>(sn)));
    const Real den = static_cast<Real>(static_cast<unsigned long long>(d >> static_cast<unsigned>(sd)));
    Real v = std::ldexp(num / den, static_cast<int>(sn - sd));
    return negative ? -v : v;
}

std::string to_string(const Rational& r)
{
    if (is_integer(r)) return mp::numerator(r).str();
    return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

Rational parse_rational(const std::string& raw)
{
    std::string text;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
    if (text.empty()) throw ConfigError("empty rational literal");
    try {
        if (auto caret = text.find('^'); caret != std::string::npos) {
            if (text.substr(0, caret) != "2") throw ConfigError("only powers of two are accepted in '^' form: " + raw);
            return pow2(std::stol(text.substr(caret + 1)));
        }
        if (auto slash = text.find('/'); slash != std::string::npos) {
            BigInt n = parse_integer(text.substr(0, slash));
            BigInt d = parse_integer(text.substr(slash + 1));
            if (d == 0) throw ConfigError("zero denominator in " + raw);
            return Rational(n, d);
        }
        if (auto e = text.find_first_of("eE"); e != std::string::npos) {
            const Rational mant = parse_rational(text.substr(0, e));
            const long exp10 = std::stol(text.substr(e + 1));
            if (std::abs(exp10) > 4000) throw ConfigError("decimal exponent out of range in " + raw);
            Rational scale = 1;
            for (long i = 0; i < std::abs(exp10); ++i) scale *= 10;
            return exp10 >= 0 ? Rational(mant * scale) : Rational(mant / scale);
        }
        if (auto dot = text.find('.'); dot != std::string::npos) {
            std::string whole = text.substr(0, dot);
            std::string frac = text.substr(dot + 1);
            bool negative = !whole.empty() && whole[0] == '-';
            if (negative || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
            BigInt scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            BigInt n = parse_integer(whole + frac);
            Rational v(n, scale);
            return negative ? Rational(-v) : v;
        }
        return Rational(parse_integer(text));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse rational '" + raw + "'");
    }
}

nlohmann::json dyadic_to_json(const Rational& r)
{
    const long k = log2_den(r);
    const BigInt& n = mp::numerator(r);
    nlohmann::json j;
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
        j["num"] = static_cast<long long>(n);
    else
        j["num"] = n.str();
    j["log2_den"] = k;
    return j;
}

Rational dyadic_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("log2_den"))
        throw ConfigError("dyadic value must be {\"num\", \"log2_den\"}: " + j.dump());
    BigInt n = j["num"].is_string() ? BigInt(j["num"].get<std::string>()) : BigInt(j["num"].get<long long>());
    return Rational(n) * pow2(-j["log2_den"].get<long>());
}

} // namespace besic
