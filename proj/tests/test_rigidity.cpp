#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support.hpp"
#include "ufh/errors.hpp"
#include "ufh/rigidity.hpp"

using namespace ufh;
using testing_support::q;
using testing_support::Rng;

namespace {

SpacePtr evens()
{
    MembershipRule rule;
    rule.periodic = PeriodicRule{{2}, {{0}}};
    return make_subset(make_lattice(1), rule);
}

SpacePtr nonsquares()
{
    MembershipRule rule;
    rule.named = NamedRule::Squares;
    rule.complement = true;
    return make_subset(make_lattice(1), rule);
}

bool square(std::int64_t x)
{
    if (x < 0)
        return false;
    std::int64_t k = 0;
    while (k * k < x)
        ++k;
    return k * k == x;
}

std::vector<WindowSpec> centered(std::size_t dim, const std::vector<std::int64_t>& radii, std::int64_t margin)
{
    return make_schedule(Point(std::vector<std::int64_t>(dim, 0)), radii, margin);
}

}  // namespace

TEST_CASE("tightest quasi-isometry constants")
{
    auto z = make_lattice(1);
    auto w = Window::build(z, Point{0}, 20, 0);

    auto id = verify_qi(identity_map(z), w);
    CHECK(id.declared_ok);
    CHECK(id.best_C == 1);
    CHECK(id.best_D == 0);
    CHECK(id.pairs == 41 * 40 / 2);

    auto we = Window::build(evens(), Point{0}, 20, 0);
    auto inc = verify_qi(inclusion_map(evens(), z), we);
    CHECK(inc.best_C == 1);
    CHECK(inc.best_D == 0);

    // floor(x/2): D(1) grows like d/2, D(2) = 1/2 (pairs {2m, 2m+1}), D(3) = 1/3.
    auto half = verify_qi(floor_div_map(2), w);
    CHECK(half.declared_ok);
    CHECK(half.best_C == 2);
    CHECK(half.best_D == q(1, 2));
    CHECK(half.profile[0].second == 20);  // x = -20, x' = 20
    CHECK(half.profile[2].second == q(1, 3));

    auto dbl = verify_qi(scale_map(2), w);
    CHECK(dbl.best_C == 2);
    CHECK(dbl.best_D == 0);
}

TEST_CASE("verify_qi against a direct pair oracle")
{
    auto w = Window::build(make_lattice(1), Point{3}, 12, 0);
    for (auto f : {floor_div_map(3), scale_map(-2), shift_map({5}), floor_div_map(2)}) {
        auto rep = verify_qi(f, w, 5);
        for (std::int64_t c = 1; c <= 5; ++c) {
            Rational d = 0;
            for (std::int64_t x = -9; x <= 15; ++x)
                for (std::int64_t y = -9; y <= 15; ++y) {
                    Rational dx = q(std::abs(x - y));
                    Rational dy = q(std::abs(f(Point{x})[0] - f(Point{y})[0]));
                    d = std::max({d, Rational(dy - q(c) * dx), Rational(dx / q(c) - dy)});
                }
            CHECK(rep.profile[static_cast<std::size_t>(c - 1)].second == d);
        }
    }
}

TEST_CASE("declared constants that fail are reported with a violating pair")
{
    auto f = floor_div_map(2);
    f.C = 1;
    f.D = 0;
    auto w = Window::build(make_lattice(1), Point{0}, 6, 0);
    auto rep = verify_qi(f, w);
    CHECK_FALSE(rep.declared_ok);
    REQUIRE(rep.violation);
    auto [a, b] = *rep.violation;
    auto dx = std::abs(a[0] - b[0]);
    auto dy = std::abs(f(a)[0] - f(b)[0]);
    CHECK((dy > dx || dx > dy));
}

TEST_CASE("pushforward of the fundamental class counts preimages")
{
    auto z = make_lattice(1);
    auto src = Window::build(z, Point{0}, 20, 0);
    auto tgt = Window::build(z, Point{0}, 12, 0);
    auto c = pushforward_fundamental(floor_div_map(2), src, tgt);
    for (std::int64_t y = -12; y <= 12; ++y) {
        std::int64_t count = 0;
        for (std::int64_t x = -20; x <= 20; ++x)
            count += (x >= 0 ? x / 2 : -((-x + 1) / 2)) == y;
        CHECK(c.coefficient({Point{y}}) == q(count));
    }
    CHECK(c.coefficient({Point{0}}) == 2);
    CHECK(c.coefficient({Point{10}}) == 1);

    auto small = Window::build(z, Point{0}, 5, 0);
    CHECK_THROWS_AS(pushforward_fundamental(floor_div_map(2), src, small), WindowError);

    auto ident = pushforward_fundamental(identity_map(z), tgt, tgt);
    CHECK(ident == fundamental_class(tgt));
}

TEST_CASE("bilipschitz verdicts on Z")
{
    auto z = make_lattice(1);
    auto id = bilipschitz_verdict(identity_map(z), 1, centered(1, {10, 20, 40}, 1));
    CHECK(id.yes());
    REQUIRE(id.matching);
    CHECK(id.matching->bijective_on_interior);
    CHECK(id.matching->displacement == 0);
    CHECK(*id.verdict.certified_capacity == 0);

    auto sh = bilipschitz_verdict(shift_map({7}), 1, centered(1, {10, 20, 40}, 1));
    CHECK(sh.yes());
    REQUIRE(sh.matching);
    CHECK(sh.matching->displacement == 0);
    for (auto& [x, y] : sh.matching->pairs)
        CHECK(y[0] == x[0] + 7);

    auto inc = bilipschitz_verdict(inclusion_map(evens(), z), 1, centered(1, {10, 20, 40}, 1));
    CHECK(inc.no());
    REQUIRE(inc.verdict.witness);
    CHECK(inc.verdict.witness->deficit_collar > 0);
    CHECK_FALSE(inc.matching);

    auto dbl = bilipschitz_verdict(scale_map(2), 1, centered(1, {10, 20, 40}, 1));
    CHECK(dbl.no());

    // Missing squares: |A cap [-N, N]| grows like sqrt(N).
    auto sq = bilipschitz_verdict(inclusion_map(nonsquares(), z), 1, centered(1, {30, 120, 480}, 1));
    CHECK(sq.no());
    REQUIRE(sq.verdict.witness);
    CHECK(abs(sq.verdict.witness->demand_sum) > 0);
}

TEST_CASE("forgetting the sheet of the doubled tree is close to a bilipschitz map")
{
    auto tree = make_regular_tree(3);
    auto d = make_doubling(tree);
    auto f = doubling_projection(d);
    auto res = bilipschitz_verdict(f, 1, centered(0, {4, 5, 6}, 1));
    REQUIRE(res.yes());
    CHECK(*res.verdict.certified_capacity == 1);
    REQUIRE(res.matching);
    const auto& m = *res.matching;
    CHECK(m.bijective_on_interior);
    CHECK(m.displacement <= 4);

    auto w = Window::build(tree, Point{}, 6, 1);
    CHECK(m.pairs.size() == w.interior_size());
    std::set<Point> sources, targets;
    for (auto& [x, y] : m.pairs) {
        sources.insert(x);
        targets.insert(y);
        CHECK(w.find(y).has_value());
        CHECK(w.is_interior(*w.find(y)));
    }
    CHECK(sources.size() == m.pairs.size());
    CHECK(targets.size() == m.pairs.size());

    // Distortion: d(m x, m x') stays within d(x, x') + 2 * displacement + D.
    for (std::size_t a = 0; a < m.pairs.size(); a += 7)
        for (std::size_t b = a + 1; b < m.pairs.size(); b += 5) {
            auto dx = d->distance(m.pairs[a].first, m.pairs[b].first);
            auto dy = tree->distance(m.pairs[a].second, m.pairs[b].second);
            CHECK(dy <= dx + 2 * m.displacement + 1);
            CHECK(dx <= dy + 2 * m.displacement + 1);
        }
}

TEST_CASE("matchings preserve the sup norm of pushed 0-chains")
{
    auto d = make_doubling(make_regular_tree(3));
    auto res = bilipschitz_verdict(doubling_projection(d), 1, centered(0, {4, 5, 6}, 1));
    REQUIRE(res.matching);
    std::map<Point, Point> m(res.matching->pairs.begin(), res.matching->pairs.end());
    std::vector<Point> dom;
    for (auto& [x, y] : m)
        dom.push_back(x);
    Rng rng(11);
    PointMap pm = [&](const Point& x) -> std::optional<Point> {
        auto it = m.find(x);
        if (it == m.end())
            return std::nullopt;
        return it->second;
    };
    for (int t = 0; t < 60; ++t) {
        UFChain c(0, Ring::Int);
        auto k = rng.uniform(1, 20);
        for (int i = 0; i < k; ++i)
            c.add({dom[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(dom.size()) - 1))]},
                  q(rng.uniform(-6, 6)));
        CHECK(sup_norm(pushforward(pm, c)) == sup_norm(c));
    }
}

TEST_CASE("matching extraction rejects fractional flows")
{
    auto z = make_lattice(1);
    auto w = Window::build(z, Point{0}, 4, 1);
    FlowCertificate cert;
    cert.feasible = true;
    cert.flows.push_back({0, 1, q(1, 2)});
    CHECK_THROWS_AS(extract_bounded_matching(identity_map(z), w, w, cert), ContractViolation);
}

TEST_CASE("determinants against cofactor expansion")
{
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::vector<std::int64_t>> m(3, std::vector<std::int64_t>(3));
        for (auto& row : m)
            for (auto& v : row)
                v = rng.uniform(-4, 4);
        if (t % 7 == 0)
            m[2] = m[0];
        std::int64_t expect = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        CHECK(determinant(m) == expect);
    }
    CHECK(determinant({{0, 1}, {1, 0}}) == -1);
}

TEST_CASE("image lattice membership agrees with enumeration")
{
    for (auto m : std::vector<std::vector<std::vector<std::int64_t>>>{{{2, 0}, {0, 3}}, {{2, 1}, {0, 2}}, {{1, 2}, {3, 1}}}) {
        auto pat = image_lattice_pattern(m);
        std::set<Point> image;
        for (std::int64_t a = -30; a <= 30; ++a)
            for (std::int64_t b = -30; b <= 30; ++b)
                image.insert(Point{m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b});
        for (std::int64_t x = -6; x <= 6; ++x)
            for (std::int64_t y = -6; y <= 6; ++y)
                CHECK(pat.evaluate(Point{x, y}) == (image.count(Point{x, y}) ? 1 : 0));
        auto det = std::abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        CHECK(*pat.period_average(2) == q(1, det));
    }
}

TEST_CASE("homomorphisms of Z^d")
{
    auto diag = group_hom_report({{2, 0}, {0, 3}}, 1, {2, 4, 8});
    CHECK(diag.cokernel_size == 6);
    CHECK(diag.kernel_size == 1);
    CHECK_FALSE(diag.predicted_yes);
    CHECK(diag.measured.no());
    CHECK(diag.agrees);
    CHECK(diag.image_mean == q(1, 6));
    CHECK(diag.pushforward_identity);

    auto shear = group_hom_report({{1, 1}, {0, 1}}, 1, {2, 4, 6});
    CHECK(shear.predicted_yes);
    CHECK(shear.measured.yes());
    CHECK(shear.agrees);
    REQUIRE(shear.measured.matching);
    CHECK(shear.measured.matching->bijective_on_interior);
    CHECK(shear.measured.matching->displacement == 0);
    CHECK(shear.pushforward_identity);

    auto triple = group_hom_report({{3}}, 1, {6, 12, 24});
    CHECK(triple.measured.no());
    CHECK(triple.image_mean == q(1, 3));

    CHECK_THROWS_AS(group_hom_report({{1, 2}, {2, 4}}, 1, {2, 4}), DomainError);
    CHECK_THROWS_AS(matrix_map({{0}}), DomainError);
}

TEST_CASE("averaging branches avoid the squares")
{
    for (std::int64_t n = 1; n <= 5; ++n) {
        std::set<std::int64_t> from_squares;
        for (std::int64_t j = 1; j <= n; ++j) {
            auto f = averaging_branch(n, j);
            for (std::int64_t x = -60; x <= 200; ++x) {
                auto y = f(Point{x})[0];
                CHECK_FALSE(square(y));
                if (square(x)) {
                    CHECK(from_squares.insert(y).second);  // images of A are disjoint across j and x
                    CHECK(y != x);
                } else {
                    CHECK(y == x);
                }
            }
        }
    }
    CHECK_THROWS_AS(averaging_branch(3, 0), PresentationError);
    CHECK_THROWS_AS(averaging_branch(3, 4), PresentationError);
}

TEST_CASE("averaging chain map: left inverse and norm bound")
{
    auto z = make_lattice(1);
    for (std::int64_t n : {2, 3, 5}) {
        auto w = Window::build(z, Point{n * n + 10}, n * n + 30, 0);
        for (std::size_t k = 0; k <= 2; ++k) {
            auto rep = averaging_chain_map(n, k, w, 50, 1000 + static_cast<std::uint64_t>(n * 10) + k);
            CHECK(rep.identity_checks == 50);
            CHECK(rep.identity_failures == 0);
            CHECK(rep.violations == 0);
            CHECK(rep.chain_map_ok);
            Rational bound = 1 + q((1 << (k + 1)) - 1, n);
            CHECK(rep.bound == bound);
            // The all-ones chain on [a, a + n]^(k+1) around a square a >= n^2 attains it.
            CHECK(rep.max_ratio == bound);
        }
    }
    auto narrow = Window::build(z, Point{0}, 5, 0);
    CHECK_THROWS_AS(averaging_chain_map(3, 1, narrow, 10, 1), WindowError);
}

TEST_CASE("averaging map on a hand example")
{
    // n = 2: phi(9) = (f_1(9) + f_2(9))/2 = (10 + 11)/2; phi(1) = (-3 + -4)/2; phi(5) = 5.
    UFChain c(0, Ring::Rat);
    c.add({Point{9}}, 2);
    c.add({Point{1}}, 4);
    c.add({Point{5}}, 1);
    auto img = averaging_map(2, c);
    CHECK(img.coefficient({Point{10}}) == 1);
    CHECK(img.coefficient({Point{11}}) == 1);
    CHECK(img.coefficient({Point{-3}}) == 2);
    CHECK(img.coefficient({Point{-4}}) == 2);
    CHECK(img.coefficient({Point{5}}) == 1);
    CHECK(img.size() == 5);
}
