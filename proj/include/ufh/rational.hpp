#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ufh {

// Exact scalar used for every coefficient, capacity and ratio.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1)
{
    Rational q(Integer(std::to_string(num)), Integer(std::to_string(den)));
    q.canonicalize();
    return q;
}

inline Rational abs_value(const Rational& q) { return abs(q); }

inline bool is_integral(const Rational& q) { return q.get_den() == 1; }

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);

// "p" for integers, "p/q" otherwise; canonical and locale independent.
std::string to_string(const Rational& q);

// Accepts "p", "-p", "p/q" and finite decimals such as "0.25".
Rational parse_rational(std::string_view text);

std::int64_t to_int64(const Integer& z);

}  // namespace ufh
