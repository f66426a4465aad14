#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "ufh/chain.hpp"
#include "ufh/errors.hpp"

using namespace ufh;
using testing_support::q;
using testing_support::Rng;

namespace {

UFChain random_chain(Rng& rng, const Window& w, std::size_t degree, int terms, std::int64_t spread)
{
    UFChain c(degree, Ring::Int);
    auto pts = w.points();
    for (int i = 0; i < terms; ++i) {
        auto base = rng.uniform(0, static_cast<std::int64_t>(pts.size()) - 1);
        Simplex s;
        for (std::size_t j = 0; j <= degree; ++j) {
            auto k = std::clamp<std::int64_t>(base + rng.uniform(-spread, spread), 0,
                                              static_cast<std::int64_t>(pts.size()) - 1);
            s.push_back(pts[k]);
        }
        c.add(s, q(rng.uniform(-3, 3)));
    }
    return c;
}

}  // namespace

TEST_CASE("boundary of small chains")
{
    UFChain e(1);
    e.add({Point{0}, Point{1}}, 1);
    auto de = boundary(e);
    CHECK(de.coefficient({Point{1}}) == 1);
    CHECK(de.coefficient({Point{0}}) == -1);
    CHECK(sup_norm(de) == 1);

    UFChain tri(2);
    tri.add({Point{0}, Point{1}, Point{2}}, 1);
    CHECK(boundary(boundary(tri)).is_zero());

    UFChain zero_deg(0);
    CHECK_THROWS_AS(boundary(zero_deg), ContractViolation);
}

TEST_CASE("telescoping edge sum")
{
    UFChain c(1);
    for (std::int64_t z = 0; z < 10; ++z)
        c.add({Point{z}, Point{z + 1}}, 1);
    // Oracle: accumulate +1 at heads and -1 at tails by hand.
    std::map<std::int64_t, std::int64_t> acc;
    for (std::int64_t z = 0; z < 10; ++z) {
        acc[z + 1] += 1;
        acc[z] -= 1;
    }
    UFChain expected(0);
    for (auto [z, v] : acc)
        expected.add({Point{z}}, q(v));
    CHECK(boundary(c) == expected);
    CHECK(expected.size() == 2);
}

TEST_CASE("sup norms")
{
    auto w = Window::build(make_lattice(1), Point{0}, 6, 1);
    UFChain fund(0), evens(0);
    for (auto& p : w.points()) {
        fund.add({p}, 1);
        if (p[0] % 2 == 0)
            evens.add({p}, 2);
    }
    CHECK(sup_norm(fund) == 1);
    CHECK(sup_norm(UFChain(0)) == 0);
    CHECK(sup_norm(evens) == 2);
}

TEST_CASE("pushforwards")
{
    UFChain c(0);
    c.add({Point{0}}, 1);
    c.add({Point{1}}, 1);
    auto doubled = pushforward([](const Point& p) { return std::optional<Point>(Point{2 * p[0]}); }, c);
    CHECK(doubled.coefficient({Point{0}}) == 1);
    CHECK(doubled.coefficient({Point{2}}) == 1);
    CHECK(doubled.size() == 2);

    const std::int64_t N = 12;
    UFChain fund(0);
    for (std::int64_t x = 0; x < 2 * N; ++x)
        fund.add({Point{x}}, 1);
    auto half = pushforward(
        [](const Point& p) {
            std::int64_t x = p[0];
            return std::optional<Point>(Point{x >= 0 ? x / 2 : -((-x + 1) / 2)});
        },
        fund);
    CHECK(half.size() == static_cast<std::size_t>(N));
    for (std::int64_t y = 0; y < N; ++y)
        CHECK(half.coefficient({Point{y}}) == 2);

    auto evens = make_subset(make_lattice(1), MembershipRule{PeriodicRule{{2}, {{0}}}, std::nullopt, false});
    auto w = Window::build(evens, Point{0}, 10, 0);
    UFChain fe(0);
    for (auto& p : w.points())
        fe.add({p}, 1);
    auto image = pushforward([](const Point& p) { return std::optional<Point>(p); }, fe);
    for (std::int64_t z = -10; z <= 10; ++z)
        CHECK(image.coefficient({Point{z}}) == (z % 2 == 0 ? 1 : 0));

    auto partial = [](const Point& p) { return p[0] > 0 ? std::optional<Point>(p) : std::nullopt; };
    CHECK_THROWS_AS(pushforward(partial, fund), DomainError);

    UFChain edge(1);
    edge.add({Point{0}, Point{3}}, 1);
    edge.declare_bounds(3, std::nullopt);
    auto pushed = pushforward([](const Point& p) { return std::optional<Point>(Point{2 * p[0]}); }, edge,
                              std::pair{q(2), q(1)});
    CHECK(pushed.declared_propagation() == 7);
}

TEST_CASE("validate reports")
{
    auto w = Window::build(make_lattice(1), Point{0}, 10, 2);
    UFChain fund(0);
    for (auto& p : w.points())
        fund.add({p}, 1);
    fund.declare_bounds(0, q(1));
    auto r = validate(fund, w);
    CHECK(r.valid());
    CHECK(r.cycle_on_interior);

    UFChain edges(1);
    for (std::int64_t z = -10; z < 10; ++z)
        edges.add({Point{z}, Point{z + 1}}, 1);
    edges.declare_bounds(1, q(1));
    auto re = validate(edges, w);
    CHECK(re.valid());
    CHECK(re.cycle_on_interior);

    UFChain far(1);
    far.add({Point{-50}, Point{50}}, 1);
    far.declare_bounds(1, q(1));
    auto rf = validate(far, w);
    CHECK(!rf.propagation_ok);
    CHECK(!rf.support_in_window);
    CHECK(rf.propagation_witness.has_value());

    UFChain loud(0);
    loud.add({Point{0}}, 5);
    loud.declare_bounds(0, q(2));
    CHECK(!validate(loud, w).norm_ok);
}

TEST_CASE("integer chains reject fractional coefficients")
{
    UFChain c(0, Ring::Int);
    CHECK_THROWS_AS(c.add({Point{0}}, q(1, 2)), ContractViolation);
    UFChain a(0), b(1);
    CHECK_THROWS_AS(a += b, ContractViolation);
    CHECK_THROWS_AS(c.add({Point{0}, Point{1}}, 1), ContractViolation);
}

TEST_CASE("property: boundary squares to zero and norms obey the axioms")
{
    Rng rng(2024);
    auto w1 = Window::build(make_lattice(1), Point{0}, 60, 0);
    auto w2 = Window::build(make_lattice(2), Point{0, 0}, 9, 0);
    auto wf = Window::build(make_free_group(2), Point{}, 3, 0);
    const Window* windows[] = {&w1, &w2, &wf};
    for (int trial = 0; trial < 300; ++trial) {
        const Window& w = *windows[trial % 3];
        auto degree = static_cast<std::size_t>(rng.uniform(1, 3));
        auto c = random_chain(rng, w, degree, static_cast<int>(rng.uniform(1, 25)), 4);
        if (degree >= 2)
            CHECK(boundary(boundary(c)).is_zero());
        auto d = random_chain(rng, w, degree, static_cast<int>(rng.uniform(1, 25)), 4);
        CHECK(sup_norm(c + d) <= sup_norm(c) + sup_norm(d));
        Rational s = q(rng.uniform(-7, 7), rng.uniform(1, 5));
        UFChain cq = UFChain(degree, Ring::Rat) + c;  // rational copy, so s may be fractional
        CHECK(sup_norm(s * cq) == abs(s) * sup_norm(c));
    }
}

TEST_CASE("property: translations preserve norms and pushforward commutes with the boundary")
{
    Rng rng(99);
    auto w = Window::build(make_lattice(1), Point{0}, 40, 0);
    PointMap shift = [](const Point& p) { return std::optional<Point>(Point{p[0] + 7}); };
    PointMap half = [](const Point& p) {
        std::int64_t x = p[0];
        return std::optional<Point>(Point{x >= 0 ? x / 2 : -((-x + 1) / 2)});
    };
    for (int trial = 0; trial < 100; ++trial) {
        auto degree = static_cast<std::size_t>(rng.uniform(1, 3));
        auto c = random_chain(rng, w, degree, static_cast<int>(rng.uniform(1, 20)), 3);
        CHECK(sup_norm(pushforward(shift, c)) == sup_norm(c));
        CHECK(boundary(pushforward(half, c)) == pushforward(half, boundary(c)));
        CHECK(boundary(pushforward(shift, c)) == pushforward(shift, boundary(c)));
    }
}

TEST_CASE("chain literals")
{
    auto c = parse_chain_literal("# an edge and a triangle face\n3/2 : (0, 1)\n-2 : (4,5)\n");
    CHECK(c.degree() == 1);
    CHECK(c.coefficient({Point{0}, Point{1}}) == q(3, 2));
    CHECK(parse_chain_literal(format_chain_literal(c)) == c);

    auto c2 = parse_chain_literal("1 : ([0,1], [1,1], [2,-1])");
    CHECK(c2.degree() == 2);
    CHECK(c2.coefficient({Point{0, 1}, Point{1, 1}, Point{2, -1}}) == 1);

    auto w = Window::build(make_lattice(1), Point{0}, 10, 1);
    auto per = parse_chain_literal("periodic period=2 offset=0 coeff=1 degree=1 shape=(0,1)", &w);
    CHECK(per.degree() == 1);
    CHECK(per.size() == 10);  // z = -10, -8, ..., 8
    CHECK(per.coefficient({Point{-10}, Point{-9}}) == 1);
    CHECK(per.coefficient({Point{-9}, Point{-8}}) == 0);

    auto empty = parse_chain_literal("degree 2\n");
    CHECK(empty.degree() == 2);
    CHECK(empty.is_zero());

    try {
        parse_chain_literal("1 : (0, 1)\n\n  x : (2, 3)\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
    CHECK_THROWS_AS(parse_chain_literal("1 : (0, 1)\n1 : (0, 1, 2)\n"), ContractViolation);
    CHECK_THROWS_AS(parse_chain_literal("periodic period=2 shape=(0,1)"), ContractViolation);
    CHECK_THROWS_AS(parse_chain_literal("periodic period=2 bogus=1 shape=(0,1)", &w), ParseError);
}
