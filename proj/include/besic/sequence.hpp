#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "besic/rational.hpp"

namespace besic {

enum class Profile { strict, demo };

Profile parse_profile(const std::string& text);
const char* to_string(Profile p);

// Per-level dimension exponents s_n for a target dimension s.
struct DimensionSchedule {
    Rational s;
    std::vector<Rational> exponents; // exponents[n - 1] == s_n

    int depth() const { return static_cast<int>(exponents.size()); }
    const Rational& at(int n) const;
};

// s_n = 1/n when s == 0, s*n/(n+1) otherwise.
DimensionSchedule build_schedule(const Rational& s, int depth);

// The sequences delta_n (rectangle widths), Delta_n (heights) and theta_n
// (rotation grid steps), 1-indexed, all exact.
struct SequenceTable {
    Profile profile = Profile::strict;
    DimensionSchedule schedule;
    Rational c;
    Rational c1;
    Rational c2; // 4c(c1 + 1)
    Real tube_constant = 16;
    std::vector<Rational> delta_seq;
    std::vector<Rational> Delta_seq;
    std::vector<Rational> theta_seq;

    int depth() const { return static_cast<int>(delta_seq.size()); }

    const Rational& delta(int n) const;
    const Rational& Delta(int n) const;
    const Rational& theta(int n) const;

    // delta_0 := 1 by convention (only used by the n = 1 count bounds).
    Rational delta_or_one(int n) const { return n < 1 ? Rational(1) : delta(n); }

    Real delta_r(int n) const { return to_real(delta(n)); }
    Real Delta_r(int n) const { return to_real(Delta(n)); }
    Real theta_r(int n) const { return to_real(theta(n)); }

    // -log2(theta_n); throws when theta_n is not a power of two.
    long theta_exponent(int n) const;
};

SequenceTable derive_sequences(const DimensionSchedule& schedule, const Rational& c, Profile profile,
                               const Rational& c1 = Rational(2), Real tube_constant = 16);

struct ConstraintCheck {
    std::string name;
    int level = 0;
    bool passed = false;
    bool skipped = false;
    Rational lhs;
    Rational rhs;
    Rational slack; // rhs - lhs for inequalities, fractional part for integrality checks
    std::string detail;
};

struct ConstraintReport {
    std::vector<ConstraintCheck> checks;
    bool passed() const;
    std::size_t failures() const;
};

ConstraintReport validate_sequences(const SequenceTable& table);

nlohmann::json to_json(const SequenceTable& table);
SequenceTable table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConstraintReport& report);

} // namespace besic
