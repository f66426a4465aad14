#pragma once

// Rule-generated degree-0 cycles on infinite spaces, materialized window by window.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/rational.hpp"
#include "ufh/space.hpp"
#include "ufh/transport.hpp"

namespace ufh {

class CyclePattern {
public:
    /// v times the fundamental class.
    static CyclePattern constant(const Rational& v);
    /// Lattice-periodic table: residue class (coordinates mod period) -> value, absent = 0.
    static CyclePattern periodic(std::vector<std::int64_t> period, std::map<std::vector<std::int64_t>, Rational> table);
    /// v times the characteristic function of a subset rule.
    static CyclePattern indicator(const MembershipRule& rule, const Rational& v = 1);
    /// Anything else; never periodic.
    static CyclePattern custom(std::string description, std::function<Rational(const Point&)> fn);

    Rational evaluate(const Point& p) const;

    /// Common translation period on Z^d, if every summand has one.
    std::optional<std::vector<std::int64_t>> period(std::size_t dimension) const;

    /// Exact average over one period box; only for periodic patterns.
    std::optional<Rational> period_average(std::size_t dimension) const;

    std::string describe() const;

    /// Degree-0 chain with the pattern's value at every window point.
    UFChain materialize(const Window& w, Ring ring = Ring::Rat) const;
    DemandMap interior_demands(const Window& w) const;

    CyclePattern& operator+=(const CyclePattern& other);
    CyclePattern& operator*=(const Rational& s);
    friend CyclePattern operator+(CyclePattern a, const CyclePattern& b) { return a += b; }
    friend CyclePattern operator*(const Rational& s, CyclePattern a) { return a *= s; }

private:
    struct Term {
        Rational coeff = 1;
        std::string description;
        std::function<Rational(const Point&)> fn;
        std::optional<std::vector<std::int64_t>> period;  // empty vector: constant
    };
    std::vector<Term> terms_;
};

/// Pattern descriptions used by the CLI and scenario files:
///   fundamental | zero | squares | nonsquares
///   periodic <p1>[x<p2>...]: <residue>-><value>, ...     residues written as point literals
///   <v> * <atom>,  and sums  <term> + <term>
CyclePattern parse_cycle_pattern(std::string_view text);

}  // namespace ufh
