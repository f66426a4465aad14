#include "ufh/pattern.hpp"

#include <cctype>
#include <numeric>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

}  // namespace

CyclePattern CyclePattern::constant(const Rational& v)
{
    CyclePattern p;
    p.terms_.push_back({v, "fundamental", [](const Point&) { return Rational(1); }, std::vector<std::int64_t>{}});
    return p;
}

CyclePattern CyclePattern::periodic(std::vector<std::int64_t> period, std::map<std::vector<std::int64_t>, Rational> table)
{
    if (period.empty())
        throw PresentationError("periodic pattern needs a period");
    for (auto m : period)
        if (m <= 0)
            throw PresentationError("periodic pattern needs positive periods");
    std::map<std::vector<std::int64_t>, Rational> norm;
    for (auto& [res, v] : table) {
        if (res.size() != period.size())
            throw PresentationError("residue " + format_point(Point(res)) + " does not match the period's dimension");
        std::vector<std::int64_t> r(res.size());
        for (std::size_t i = 0; i < res.size(); ++i)
            r[i] = mod(res[i], period[i]);
        norm[r] += v;
    }
    std::string desc = "periodic ";
    for (std::size_t i = 0; i < period.size(); ++i)
        desc += (i ? "x" : "") + std::to_string(period[i]);
    desc += ":";
    bool first = true;
    for (auto& [res, v] : norm) {
        desc += (first ? " " : ", ") + format_point(Point(res)) + "->" + to_string(v);
        first = false;
    }
    CyclePattern p;
    p.terms_.push_back({Rational(1), desc,
                        [period, norm](const Point& x) {
                            if (x.size() != period.size())
                                throw DomainError("periodic pattern evaluated off its lattice");
                            std::vector<std::int64_t> r(period.size());
                            for (std::size_t i = 0; i < period.size(); ++i)
                                r[i] = mod(x[i], period[i]);
                            auto it = norm.find(r);
                            return it == norm.end() ? Rational(0) : it->second;
                        },
                        period});
    return p;
}

CyclePattern CyclePattern::indicator(const MembershipRule& rule, const Rational& v)
{
    std::optional<std::vector<std::int64_t>> period;
    if (rule.periodic && !rule.named)
        period = rule.periodic->period;
    CyclePattern p;
    p.terms_.push_back({v, "indicator " + rule.describe(),
                        [rule](const Point& x) { return rule.test(x) ? Rational(1) : Rational(0); }, period});
    return p;
}

CyclePattern CyclePattern::custom(std::string description, std::function<Rational(const Point&)> fn)
{
    CyclePattern p;
    p.terms_.push_back({Rational(1), std::move(description), std::move(fn), std::nullopt});
    return p;
}

Rational CyclePattern::evaluate(const Point& p) const
{
    Rational v = 0;
    for (auto& t : terms_)
        v += t.coeff * t.fn(p);
    return v;
}

std::optional<std::vector<std::int64_t>> CyclePattern::period(std::size_t dimension) const
{
    std::vector<std::int64_t> out(dimension, 1);
    for (auto& t : terms_) {
        if (!t.period)
            return std::nullopt;
        if (t.period->empty())
            continue;
        if (t.period->size() != dimension)
            return std::nullopt;
        for (std::size_t i = 0; i < dimension; ++i)
            out[i] = std::lcm(out[i], (*t.period)[i]);
    }
    return out;
}

std::optional<Rational> CyclePattern::period_average(std::size_t dimension) const
{
    auto per = period(dimension);
    if (!per)
        return std::nullopt;
    std::vector<std::int64_t> c(dimension, 0);
    Rational sum = 0;
    std::int64_t count = 0;
    for (;;) {
        sum += evaluate(Point(c));
        ++count;
        std::size_t i = dimension;
        while (i-- > 0) {
            if (++c[i] < (*per)[i])
                break;
            c[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1))
            break;
    }
    return sum / make_rational(count);
}

std::string CyclePattern::describe() const
{
    if (terms_.empty())
        return "zero";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i)
            out += " + ";
        if (terms_[i].coeff != 1)
            out += to_string(terms_[i].coeff) + " * ";
        out += terms_[i].description;
    }
    return out;
}

UFChain CyclePattern::materialize(const Window& w, Ring ring) const
{
    UFChain c(0, ring);
    for (auto& p : w.points())
        c.add({p}, evaluate(p));
    return c;
}

DemandMap CyclePattern::interior_demands(const Window& w) const
{
    DemandMap d;
    for (auto id : w.interior()) {
        auto v = evaluate(w.point(id));
        if (v != 0)
            d[id] = v;
    }
    return d;
}

CyclePattern& CyclePattern::operator+=(const CyclePattern& other)
{
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

CyclePattern& CyclePattern::operator*=(const Rational& s)
{
    for (auto& t : terms_)
        t.coeff *= s;
    return *this;
}

namespace {

CyclePattern parse_atom(std::string_view text)
{
    text = trim(text);
    if (text == "fundamental")
        return CyclePattern::constant(1);
    if (text == "zero")
        return CyclePattern{};
    if (text == "squares")
        return CyclePattern::indicator(MembershipRule{std::nullopt, NamedRule::Squares, false});
    if (text == "nonsquares")
        return CyclePattern::indicator(MembershipRule{std::nullopt, NamedRule::Squares, true});
    if (text.rfind("periodic", 0) == 0) {
        auto colon = text.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("periodic pattern needs 'periodic <period>: <residue>-><value>, ...'", 0, 0);
        std::vector<std::int64_t> period;
        std::string per(trim(text.substr(8, colon - 8)));
        std::size_t start = 0;
        while (start <= per.size()) {
            auto x = per.find('x', start);
            auto part = per.substr(start, x == std::string::npos ? std::string::npos : x - start);
            try {
                period.push_back(std::stoll(part));
            } catch (const std::logic_error&) {
                throw ParseError("bad period '" + per + "'", 0, 0);
            }
            if (x == std::string::npos)
                break;
            start = x + 1;
        }
        std::map<std::vector<std::int64_t>, Rational> table;
        auto body = text.substr(colon + 1);
        // Entries are separated by commas outside brackets.
        int depth = 0;
        std::size_t s = 0;
        auto flush = [&](std::string_view entry) {
            entry = trim(entry);
            if (entry.empty())
                return;
            auto arrow = entry.find("->");
            if (arrow == std::string_view::npos)
                throw ParseError("expected '<residue>-><value>' in periodic pattern", 0, 0);
            auto res = parse_point(trim(entry.substr(0, arrow)));
            table[res.coords] += parse_rational(trim(entry.substr(arrow + 2)));
        };
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '[')
                ++depth;
            else if (body[i] == ']')
                --depth;
            else if (body[i] == ',' && depth == 0) {
                flush(body.substr(s, i - s));
                s = i + 1;
            }
        }
        flush(body.substr(s));
        return CyclePattern::periodic(period, table);
    }
    throw ParseError("unknown cycle pattern '" + std::string(text) + "'", 0, 0);
}

CyclePattern parse_term(std::string_view text)
{
    auto star = text.find('*');
    if (star != std::string_view::npos)
        return parse_rational(trim(text.substr(0, star))) * parse_atom(text.substr(star + 1));
    return parse_atom(text);
}

}  // namespace

CyclePattern parse_cycle_pattern(std::string_view text)
{
    CyclePattern out;
    std::size_t start = 0;
    for (;;) {
        auto plus = text.find(" + ", start);
        out += parse_term(text.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start));
        if (plus == std::string_view::npos)
            break;
        start = plus + 3;
    }
    return out;
}

}  // namespace ufh
