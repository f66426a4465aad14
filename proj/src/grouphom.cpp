#include "ufh/grouphom.hpp"

#include <random>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

Point sub(const Point& a, const Point& b)
{
    auto c = a.coords;
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= b[i];
    return Point(std::move(c));
}

Point add_points(const Point& a, const Point& b)
{
    auto c = a.coords;
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += b[i];
    return Point(std::move(c));
}

Point neg(const Point& a)
{
    auto c = a.coords;
    for (auto& x : c)
        x = -x;
    return Point(std::move(c));
}

// The defining formula, without window checks.
TwistedChain rho_terms(const UFChain& c)
{
    TwistedChain out(c.degree());
    for (auto& [s, v] : c.terms()) {
        std::vector<Point> t;
        for (std::size_t i = 1; i < s.size(); ++i)
            t.push_back(sub(s[i], s[0]));
        out.add(t, neg(s[0]), v);
    }
    return out;
}

}  // namespace

void TwistedChain::add(const std::vector<Point>& t, const Point& g, const Rational& v)
{
    if (t.size() != degree_)
        throw ContractViolation("basis tuple of length " + std::to_string(t.size()) + " in a degree-" +
                                std::to_string(degree_) + " twisted chain");
    if (v == 0)
        return;
    auto& phi = terms_[t];
    auto& slot = phi[g];
    slot += v;
    if (slot == 0) {
        phi.erase(g);
        if (phi.empty())
            terms_.erase(t);
    }
}

Rational TwistedChain::sup_norm() const
{
    Rational m = 0;
    for (auto& [t, phi] : terms_)
        for (auto& [g, v] : phi)
            if (abs(v) > m)
                m = abs(v);
    return m;
}

TwistedChain rho_forward(const UFChain& c, const Window& w)
{
    if (w.space().kind() != SpaceKind::Lattice)
        throw PresentationError("twisted chains are implemented for Z^d");
    auto prop = observed_propagation(w.space(), c);
    if (prop > w.margin())
        throw PrecisionError("chain propagation " + std::to_string(prop) + " exceeds the window margin " +
                             std::to_string(w.margin()));
    for (auto& [s, v] : c.terms())
        for (auto& p : s)
            if (!w.contains(p))
                throw PrecisionError("chain leaves the window at " + format_point(p));
    return rho_terms(c);
}

UFChain rho_inverse(const TwistedChain& tc, Ring ring)
{
    UFChain out(tc.degree(), ring);
    for (auto& [t, phi] : tc.terms())
        for (auto& [g, v] : phi) {
            // g^-1 . (e, t_1, ..., t_n)
            Point base = neg(g);
            Simplex s{base};
            for (auto& ti : t)
                s.push_back(add_points(ti, base));
            out.add(s, v);
        }
    return out;
}

TwistedChain twisted_boundary(const TwistedChain& tc)
{
    if (tc.degree() == 0)
        throw ContractViolation("boundary of a degree-0 twisted chain");
    const std::size_t n = tc.degree();
    TwistedChain out(n - 1);
    for (auto& [t, phi] : tc.terms()) {
        std::vector<Point> t0;
        for (std::size_t k = 1; k < n; ++k)
            t0.push_back(sub(t[k], t[0]));
        for (auto& [g, v] : phi) {
            out.add(t0, sub(g, t[0]), v);  // psi(h) = phi(h + t_1)
            for (std::size_t i = 1; i <= n; ++i) {
                std::vector<Point> ti;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i - 1)
                        ti.push_back(t[k]);
                out.add(ti, g, (i % 2) ? Rational(-v) : v);
            }
        }
    }
    return out;
}

TwistedChain act(const Point& g, const TwistedChain& tc)
{
    TwistedChain out(tc.degree());
    for (auto& [t, phi] : tc.terms())
        for (auto& [h, v] : phi)
            out.add(t, add_points(h, g), v);
    return out;
}

UFChain translate(const UFChain& c, const Point& v)
{
    UFChain out(c.degree(), c.ring());
    for (auto& [s, x] : c.terms()) {
        Simplex t;
        for (auto& p : s)
            t.push_back(add_points(p, v));
        out.add(t, x);
    }
    return out;
}

RhoReport rho_check_chain(const UFChain& c, const Window& w)
{
    RhoReport rep;
    rep.samples = 1;
    auto tc = rho_forward(c, w);
    if (!(rho_inverse(tc, c.ring()) == c))
        ++rep.roundtrip_failures;
    if (tc.sup_norm() != sup_norm(c))
        ++rep.isometry_failures;
    if (c.degree() > 0 && !(twisted_boundary(tc) == rho_forward(boundary(c), w)))
        ++rep.chain_map_failures;
    // Translating the chain by v acts on coefficient functions by -v.
    Point v(std::vector<std::int64_t>(w.center().size(), 0));
    v.coords[0] = 3;
    if (!(rho_terms(translate(c, v)) == act(neg(v), tc)))
        ++rep.action_failures;
    return rep;
}

RhoReport rho_roundtrip_check(const Window& w, std::size_t degree, std::size_t samples, std::uint64_t seed)
{
    if (w.space().kind() != SpaceKind::Lattice)
        throw PresentationError("twisted chains are implemented for Z^d");
    std::mt19937_64 rng(seed);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    auto pts = w.points();
    auto interior = w.interior();
    const auto m = w.margin();
    RhoReport total;
    for (std::size_t s = 0; s < samples; ++s) {
        UFChain c(degree, Ring::Rat);
        auto terms = pick(1, 10);
        for (std::int64_t k = 0; k < terms; ++k) {
            // Anchor on an interior point; the other vertices stay within m/2 of it.
            const auto& base = pts[interior[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(interior.size()) - 1))]];
            Simplex sx{base};
            for (std::size_t i = 0; i < degree; ++i) {
                // l1 offset of size <= m/2, so any two vertices are within m.
                auto p = base.coords;
                auto budget = m / 2;
                for (auto& x : p) {
                    auto step = pick(-budget, budget);
                    x += step;
                    budget -= std::abs(step);
                }
                sx.push_back(Point(std::move(p)));
            }
            c.add(sx, make_rational(pick(-9, 9), pick(1, 4)));
        }
        auto rep = rho_check_chain(c, w);
        ++total.samples;
        total.roundtrip_failures += rep.roundtrip_failures;
        total.isometry_failures += rep.isometry_failures;
        total.chain_map_failures += rep.chain_map_failures;
        total.action_failures += rep.action_failures;
    }
    return total;
}

}  // namespace ufh
