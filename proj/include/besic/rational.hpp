#pragma once

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "besic/real.hpp"

namespace besic {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational pow2(long e);

// True when the denominator is a power of two.
bool is_dyadic(const Rational& r);

// log2 of the (reduced) denominator; requires is_dyadic(r).
long log2_den(const Rational& r);

// e with r == 2^e, when r is an exact power of two.
std::optional<long> exact_log2(const Rational& r);

bool is_integer(const Rational& r);

BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);

// Rounds to nearest; safe for numerators and denominators far outside
// the Real range as long as the quotient itself is representable.
Real to_real(const Rational& r);

std::string to_string(const Rational& r);

// Accepts "p/q", integers, finite decimals ("0.25") and "2^-4".
Rational parse_rational(const std::string& text);

// {"num": n, "log2_den": k}; n is a JSON integer when it fits in 64 bits,
// a decimal string otherwise. Throws for non-dyadic values.
nlohmann::json dyadic_to_json(const Rational& r);
Rational dyadic_from_json(const nlohmann::json& j);

} // namespace besic
