#include "ufh/rational.hpp"

#include <limits>

#include "ufh/errors.hpp"

namespace ufh {

Integer floor_of(const Rational& q)
{
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Integer ceil_of(const Rational& q)
{
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

std::string to_string(const Rational& q)
{
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

Integer parse_integer(std::string_view text)
{
    std::string s(text);
    if (s.empty())
        throw ParseError("empty number", 0, 0);
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size())
        throw ParseError("malformed number '" + s + "'", 0, 0);
    for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw ParseError("malformed number '" + s + "'", 0, 0);
    }
    if (s[0] == '+')
        s.erase(0, 1);
    return Integer(s, 10);
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
        text.remove_suffix(1);

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash));
        Integer den = parse_integer(text.substr(slash + 1));
        if (den == 0)
            throw ParseError("zero denominator in '" + std::string(text) + "'", 0, 0);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        std::string digits(whole);
        if (digits.empty() || digits == "-" || digits == "+")
            digits += "0";
        Integer w = parse_integer(digits);
        Integer f = frac.empty() ? Integer(0) : parse_integer(frac);
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        Rational q(abs(w) * scale + f, scale);
        q.canonicalize();
        return negative ? Rational(-q) : q;
    }
    return Rational(parse_integer(text));
}

std::int64_t to_int64(const Integer& z)
{
    if (!z.fits_slong_p())
        throw ResourceError("integer " + z.get_str() + " does not fit in 64 bits");
    return static_cast<std::int64_t>(z.get_si());
}

}  // namespace ufh
