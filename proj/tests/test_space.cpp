#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "ufh/errors.hpp"
#include "ufh/space.hpp"

using namespace ufh;
using testing_support::q;

namespace {

std::vector<PointId> ids_of(const Window& w, std::int64_t lo, std::int64_t hi)
{
    std::vector<PointId> ids;
    for (auto z = lo; z <= hi; ++z)
        ids.push_back(*w.find(Point{z}));
    return ids;
}

std::set<std::int64_t> coords_of(const Window& w, const std::vector<PointId>& ids)
{
    std::set<std::int64_t> out;
    for (auto id : ids)
        out.insert(w.point(id)[0]);
    return out;
}

}  // namespace

TEST_CASE("windows of Z, Z^2 and F_2 have the expected sizes")
{
    auto w = Window::build(make_lattice(1), Point{0}, 3, 0);
    CHECK(w.size() == 7);
    CHECK(w.point(0) == Point{-3});
    CHECK(w.point(6) == Point{3});

    CHECK(Window::build(make_lattice(2), Point{0, 0}, 1, 0).size() == 5);

    auto f2 = Window::build(make_free_group(2), Point{}, 2, 0);
    auto oracle = testing_support::free_group_ball(2, 2);
    REQUIRE(f2.size() == 17);
    REQUIRE(oracle.size() == 17);
    for (auto& p : f2.points())
        CHECK(oracle.count(p.coords) == 1);
}

TEST_CASE("free group balls agree with the word oracle up to radius 4")
{
    auto f2 = make_free_group(2);
    for (int n = 0; n <= 4; ++n) {
        auto oracle = testing_support::free_group_ball(2, n);
        auto ball = f2->ball(Point{}, n);
        CHECK(ball.size() == oracle.size());
        CHECK(ball.size() <= f2->ball_bound(n));
    }
    CHECK(f2->distance(Point{1, 2}, Point{1, -2}) == 2);
    CHECK(f2->distance(Point{1, 2}, Point{-1}) == 3);
}

TEST_CASE("regular tree is 3-regular")
{
    auto t = make_regular_tree(3);
    CHECK(t->ball(Point{}, 1).size() == 4);
    CHECK(t->ball(Point{}, 2).size() == 10);
    CHECK(t->ball(Point{1, 2}, 1).size() == 4);
    CHECK(t->distance(Point{1, 2}, Point{2}) == 3);
}

TEST_CASE("r_boundary is the two-sided collar")
{
    auto w = Window::build(make_lattice(1), Point{0}, 20, 2);
    auto f = ids_of(w, 0, 9);
    CHECK(coords_of(w, r_boundary(w, f, 1)) == std::set<std::int64_t>{-1, 0, 9, 10});
    CHECK(r_boundary(w, std::vector<PointId>{}, 1).empty());
    CHECK(r_boundary(w, f, 2).size() == 8);
    CHECK(coords_of(w, r_boundary(w, f, 2)) == std::set<std::int64_t>{-2, -1, 0, 1, 8, 9, 10, 11});

    auto edge = ids_of(w, 17, 20);
    CHECK_THROWS_AS(r_boundary(w, edge, 1), PrecisionError);
}

TEST_CASE("window construction errors")
{
    CHECK_THROWS_AS(Window::build(make_lattice(1), Point{0}, 2, 3), ContractViolation);
    CHECK_THROWS_AS(Window::build(make_lattice(2), Point{0, 0}, 5000, 0, 1000), ResourceError);
    auto evens = make_subset(make_lattice(1), MembershipRule{PeriodicRule{{2}, {{0}}}, std::nullopt, false});
    CHECK_THROWS_AS(Window::build(evens, Point{1}, 4, 1), PresentationError);
    CHECK_THROWS_AS(make_subset(make_lattice(1), MembershipRule{PeriodicRule{{0}, {{0}}}, std::nullopt, false}),
                    PresentationError);
}

TEST_CASE("subsets: even integers and squares")
{
    auto evens = make_subset(make_lattice(1), MembershipRule{PeriodicRule{{2}, {{0}}}, std::nullopt, false});
    auto w = Window::build(evens, Point{0}, 10, 2);
    CHECK(w.size() == 11);
    CHECK(w.interior_size() == 9);
    auto squares = make_subset(make_lattice(1), MembershipRule{std::nullopt, NamedRule::Squares, false});
    CHECK(squares->contains(Point{0}));
    CHECK(squares->contains(Point{49}));
    CHECK(!squares->contains(Point{50}));
    CHECK(Window::build(squares, Point{0}, 100, 0).size() == 11);
}

TEST_CASE("isoperimetric profiles")
{
    auto z = isoperimetric_profile(make_lattice(1), FolnerFamily{FolnerShape::Interval}, 1, 100, 100);
    CHECK(z.entries[0].ratio == q(4, 100));
    auto z2 = isoperimetric_profile(make_lattice(2), FolnerFamily{FolnerShape::Box}, 1, 10, 10);
    CHECK(z2.entries[0].ratio == q(76, 100));
    auto zs = isoperimetric_profile(make_lattice(1), FolnerFamily{FolnerShape::Interval}, 1, 5, 40);
    CHECK(zs.non_increasing);

    auto f2 = isoperimetric_profile(make_free_group(2), FolnerFamily{FolnerShape::Ball}, 1, 1, 6);
    for (auto& e : f2.entries)
        CHECK(e.ratio >= 1);
}

TEST_CASE("doubling window count identity")
{
    for (auto base : {make_lattice(1), make_lattice(2), make_regular_tree(3), make_free_group(2)}) {
        auto dbl = make_doubling(base);
        for (std::int64_t R = 1; R <= 4; ++R) {
            auto origin = base->origin();
            auto up = origin;
            up.coords.push_back(0);
            auto whole = Window::build(dbl, up, R, 0).size();
            auto a = Window::build(base, origin, R, 0).size();
            auto b = Window::build(base, origin, R - 1, 0).size();
            CHECK(whole == a + b);
        }
    }
}

TEST_CASE("margin completeness: interior balls do not change when the window grows")
{
    for (auto space : {make_lattice(2), make_free_group(2), make_regular_tree(3)}) {
        auto small = Window::build(space, space->origin(), 4, 2);
        auto big = Window::build(space, space->origin(), 7, 2);
        for (auto id : small.interior()) {
            for (std::int64_t r = 1; r <= 2; ++r) {
                std::set<Point> a, b;
                for (auto n : small.neighbors(id, r))
                    a.insert(small.point(n));
                auto bid = *big.find(small.point(id));
                for (auto n : big.neighbors(bid, r))
                    b.insert(big.point(n));
                CHECK(a == b);
            }
        }
    }
}

TEST_CASE("property: collars are monotone in r and symmetric under complement")
{
    testing_support::Rng rng(11);
    auto space = make_lattice(2);
    auto w = Window::build(space, Point{0, 0}, 9, 3);
    auto interior = w.interior();
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<PointId> f;
        for (auto id : interior)
            if (rng.uniform(0, 3) == 0)
                f.push_back(id);
        std::set<PointId> prev;
        for (std::int64_t r = 1; r <= 3; ++r) {
            auto c = r_boundary(w, f, r);
            std::set<PointId> cur(c.begin(), c.end());
            CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            prev = cur;

            // Brute force over window points; F sits in the interior, so every point within r
            // of F and every r-ball around F is inside the window.
            std::set<PointId> in_f(f.begin(), f.end());
            std::set<PointId> brute;
            for (PointId x = 0; x < w.size(); ++x) {
                bool near_f = false, near_comp = false;
                for (PointId y = 0; y < w.size(); ++y) {
                    if (w.distance(x, y) > r)
                        continue;
                    (in_f.count(y) ? near_f : near_comp) = true;
                }
                if (near_f && near_comp)
                    brute.insert(x);
            }
            CHECK(brute == cur);

            auto cross = crossing_edges(w, f, r);
            CHECK(2 * cross >= cur.size());
            CHECK(cross <= cur.size() * space->ball_bound(r));
        }
    }
}

TEST_CASE("observed ball sizes respect the uniform bound")
{
    for (auto space : {make_lattice(1), make_lattice(3), make_free_group(2), make_regular_tree(3)}) {
        auto w = Window::build(space, space->origin(), 5, 2);
        CHECK(observed_ball_size(w, 2) <= space->ball_bound(2));
    }
    CHECK(make_lattice(2)->ball_bound(2) == 13);
}

TEST_CASE("point literals round-trip")
{
    for (auto p : {Point{5}, Point{-3, 4}, Point{}}) {
        CHECK(parse_point(format_point(p)) == p);
    }
    CHECK(parse_point(" [ 1 , -2 ] ") == Point{1, -2});
}
