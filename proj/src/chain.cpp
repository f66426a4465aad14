#include "ufh/chain.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ufh/errors.hpp"

namespace ufh {

std::string to_string(Ring ring) { return ring == Ring::Int ? "Z" : "Q"; }

void UFChain::declare_bounds(std::optional<std::int64_t> propagation, std::optional<Rational> norm_bound)
{
    if (propagation && *propagation < 0)
        throw ContractViolation("propagation bound must be nonnegative");
    if (norm_bound && *norm_bound < 0)
        throw ContractViolation("norm bound must be nonnegative");
    propagation_ = propagation;
    norm_bound_ = std::move(norm_bound);
}

void UFChain::add(const Simplex& simplex, const Rational& coeff)
{
    if (simplex.size() != degree_ + 1)
        throw ContractViolation("a degree-" + std::to_string(degree_) + " chain takes " + std::to_string(degree_ + 1) +
                                "-tuples, got " + std::to_string(simplex.size()));
    if (ring_ == Ring::Int && !is_integral(coeff))
        throw ContractViolation("non-integral coefficient " + ufh::to_string(coeff) + " in a Z-chain");
    if (coeff == 0)
        return;
    auto [it, inserted] = terms_.try_emplace(simplex, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0)
            terms_.erase(it);
    }
}

Rational UFChain::coefficient(const Simplex& simplex) const
{
    auto it = terms_.find(simplex);
    return it == terms_.end() ? Rational(0) : it->second;
}

void UFChain::check_compatible(const UFChain& other) const
{
    if (degree_ != other.degree_)
        throw ContractViolation("cannot combine chains of degree " + std::to_string(degree_) + " and " +
                                std::to_string(other.degree_));
}

UFChain& UFChain::operator+=(const UFChain& other)
{
    check_compatible(other);
    for (auto& [s, v] : other.terms_)
        add(s, v);
    return *this;
}

UFChain& UFChain::operator-=(const UFChain& other)
{
    check_compatible(other);
    for (auto& [s, v] : other.terms_)
        add(s, -v);
    return *this;
}

UFChain& UFChain::operator*=(const Rational& scalar)
{
    if (ring_ == Ring::Int && !is_integral(scalar))
        throw ContractViolation("non-integral scalar on a Z-chain");
    if (scalar == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [s, v] : terms_)
        v *= scalar;
    if (norm_bound_)
        *norm_bound_ *= abs(scalar);
    return *this;
}

UFChain boundary(const UFChain& c)
{
    if (c.degree() == 0)
        throw ContractViolation("boundary of a degree-0 chain is the zero map; no degree -1 chains exist");
    UFChain out(c.degree() - 1, c.ring());
    for (auto& [s, v] : c.terms()) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            Simplex face;
            face.reserve(s.size() - 1);
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != j)
                    face.push_back(s[i]);
            out.add(face, j % 2 == 0 ? v : Rational(-v));
        }
    }
    out.declare_bounds(c.declared_propagation(), std::nullopt);
    return out;
}

Rational sup_norm(const UFChain& c)
{
    Rational best = 0;
    for (auto& [s, v] : c.terms())
        if (abs(v) > best)
            best = abs(v);
    return best;
}

std::int64_t diameter(const Space& space, const Simplex& s)
{
    std::int64_t d = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            d = std::max(d, space.distance(s[i], s[j]));
    return d;
}

std::int64_t observed_propagation(const Space& space, const UFChain& c)
{
    std::int64_t d = 0;
    for (auto& [s, v] : c.terms())
        d = std::max(d, diameter(space, s));
    return d;
}

UFChain pushforward(const PointMap& f, const UFChain& c, std::optional<std::pair<Rational, Rational>> qi_constants)
{
    UFChain out(c.degree(), c.ring());
    for (auto& [s, v] : c.terms()) {
        Simplex image;
        image.reserve(s.size());
        for (auto& p : s) {
            auto q = f(p);
            if (!q)
                throw DomainError("map undefined at support point " + format_point(p));
            image.push_back(std::move(*q));
        }
        out.add(image, v);
    }
    if (qi_constants && c.declared_propagation()) {
        Rational bound = qi_constants->first * Rational(Integer(std::to_string(*c.declared_propagation()))) +
                         qi_constants->second;
        out.declare_bounds(to_int64(ceil_of(bound)), std::nullopt);
    }
    return out;
}

UFChain restrict_to(const UFChain& c, const std::function<bool(const Point&)>& keep)
{
    UFChain out(c.degree(), c.ring());
    for (auto& [s, v] : c.terms())
        if (std::all_of(s.begin(), s.end(), keep))
            out.add(s, v);
    out.declare_bounds(c.declared_propagation(), c.declared_norm_bound());
    return out;
}

UFChain interior_part(const UFChain& c, const Window& w)
{
    return restrict_to(c, [&](const Point& p) {
        auto id = w.find(p);
        return id && w.is_interior(*id);
    });
}

ChainReport validate(const UFChain& c, const Window& w)
{
    ChainReport rep;
    rep.observed_norm = sup_norm(c);
    for (auto& [s, v] : c.terms()) {
        for (auto& p : s) {
            if (!w.contains(p) && rep.support_in_window) {
                rep.support_in_window = false;
                rep.support_witness = s;
            }
        }
        auto d = diameter(w.space(), s);
        rep.observed_propagation = std::max(rep.observed_propagation, d);
        if (c.declared_propagation() && d > *c.declared_propagation() && rep.propagation_ok) {
            rep.propagation_ok = false;
            rep.propagation_witness = s;
        }
        if (c.declared_norm_bound() && abs(v) > *c.declared_norm_bound() && rep.norm_ok) {
            rep.norm_ok = false;
            rep.norm_witness = s;
        }
        if (c.ring() == Ring::Int && !is_integral(v))
            rep.integral_ok = false;
    }
    if (c.degree() > 0)
        rep.cycle_on_interior = interior_part(boundary(c), w).is_zero();
    return rep;
}

UFChain materialize(const PeriodicBlock& block, const Window& w, Ring ring)
{
    if (block.period <= 0)
        throw ContractViolation("periodic block needs a positive period");
    if (block.shape.empty())
        throw ContractViolation("periodic block needs a shape");
    auto dim = w.space().lattice_dimension();
    if (!dim || *dim != 1)
        throw PresentationError("periodic chain blocks are defined on Z and its subsets only");
    UFChain out(block.degree(), ring);
    for (auto& p : w.points()) {
        std::int64_t z = p[0];
        if (((z - block.offset) % block.period + block.period) % block.period != 0)
            continue;
        Simplex s;
        bool inside = true;
        for (auto off : block.shape) {
            Point q{z + off};
            if (!w.contains(q)) {
                inside = false;
                break;
            }
            s.push_back(std::move(q));
        }
        if (inside)
            out.add(s, block.coeff);
    }
    std::int64_t spread = *std::max_element(block.shape.begin(), block.shape.end()) -
                          *std::min_element(block.shape.begin(), block.shape.end());
    out.declare_bounds(spread, abs(block.coeff));
    return out;
}

// ---------------------------------------------------------------------------

std::string format_simplex(const Simplex& s)
{
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i)
            out += ",";
        out += format_point(s[i]);
    }
    return out + ")";
}

std::string format_chain_literal(const UFChain& c)
{
    std::string out = "degree " + std::to_string(c.degree()) + "\n";
    for (auto& [s, v] : c.terms())
        out += to_string(v) + " : " + format_simplex(s) + "\n";
    return out;
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Splits "a, [b,c], d" at depth-0 commas.
std::vector<std::string_view> split_top_level(std::string_view s)
{
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '[')
            ++depth;
        else if (s[i] == ']')
            --depth;
        else if (s[i] == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    auto last = trim(s.substr(start));
    if (!last.empty() || !out.empty())
        out.push_back(last);
    return out;
}

}  // namespace

UFChain parse_chain_literal(std::string_view text, const Window* w, Ring ring)
{
    std::optional<std::size_t> degree;
    std::vector<std::pair<Simplex, Rational>> terms;
    std::vector<PeriodicBlock> blocks;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto hash = raw.find('#');
        std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        int col = static_cast<int>(raw.find(line.front()) + 1);
        try {
            if (line.rfind("degree", 0) == 0 && line.find(':') == std::string_view::npos) {
                auto rest = trim(line.substr(6));
                degree = static_cast<std::size_t>(std::stoll(std::string(rest)));
                continue;
            }
            if (line.rfind("periodic", 0) == 0) {
                PeriodicBlock b;
                std::optional<std::size_t> block_degree;
                std::istringstream fields{std::string(line.substr(8))};
                std::string field;
                // shape=(0, 1) may contain spaces; rejoin tokens until the parenthesis closes.
                std::vector<std::string> tokens;
                while (fields >> field) {
                    if (!tokens.empty() && tokens.back().find('(') != std::string::npos &&
                        tokens.back().find(')') == std::string::npos)
                        tokens.back() += field;
                    else
                        tokens.push_back(field);
                }
                for (auto& tok : tokens) {
                    auto eq = tok.find('=');
                    if (eq == std::string::npos)
                        throw ParseError("expected key=value, got '" + tok + "'", line_no, col);
                    std::string key = tok.substr(0, eq);
                    std::string val = tok.substr(eq + 1);
                    if (key == "period")
                        b.period = std::stoll(val);
                    else if (key == "offset")
                        b.offset = std::stoll(val);
                    else if (key == "coeff")
                        b.coeff = parse_rational(val);
                    else if (key == "degree")
                        block_degree = static_cast<std::size_t>(std::stoll(val));
                    else if (key == "shape") {
                        if (val.size() < 2 || val.front() != '(' || val.back() != ')')
                            throw ParseError("shape must be a parenthesised list", line_no, col);
                        for (auto part : split_top_level(std::string_view(val).substr(1, val.size() - 2)))
                            b.shape.push_back(std::stoll(std::string(part)));
                    } else
                        throw ParseError("unknown periodic block key '" + key + "'", line_no, col);
                }
                if (b.shape.empty())
                    throw ParseError("periodic block without shape", line_no, col);
                if (block_degree && *block_degree != b.degree())
                    throw ParseError("periodic block degree does not match its shape", line_no, col);
                blocks.push_back(std::move(b));
                continue;
            }
            auto colon = line.find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected 'coeff : (points)'", line_no, col);
            Rational coeff = parse_rational(trim(line.substr(0, colon)));
            auto tuple = trim(line.substr(colon + 1));
            if (tuple.size() < 2 || tuple.front() != '(' || tuple.back() != ')')
                throw ParseError("simplex must be written as (p0, ..., pn)", line_no, col);
            Simplex s;
            for (auto part : split_top_level(tuple.substr(1, tuple.size() - 2)))
                s.push_back(parse_point(part));
            if (s.empty())
                throw ParseError("empty simplex", line_no, col);
            terms.emplace_back(std::move(s), std::move(coeff));
        } catch (const ParseError& e) {
            if (e.line() == 0)
                throw ParseError(e.what(), line_no, col);
            throw;
        } catch (const std::logic_error&) {
            throw ParseError("malformed number", line_no, col);
        }
    }

    if (!degree) {
        if (!terms.empty())
            degree = terms.front().first.size() - 1;
        else if (!blocks.empty())
            degree = blocks.front().degree();
        else
            throw ParseError("empty chain literal needs a 'degree n' line", line_no, 1);
    }
    UFChain c(*degree, ring);
    for (auto& [s, v] : terms)
        c.add(s, v);
    for (auto& b : blocks) {
        if (!w)
            throw ContractViolation("periodic blocks need a window to materialize on");
        c += materialize(b, *w, ring);
    }
    return c;
}

}  // namespace ufh
