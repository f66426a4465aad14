#include "ufh/space.hpp"

#include <cctype>
#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
{
    if (a == 0 || b == 0)
        return 0;
    return a > kSaturated / b ? kSaturated : a * b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    std::uint64_t out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // out * (n - k + i) / i stays integral at every step
        out = sat_mul(out, n - k + i);
        if (out == kSaturated)
            return kSaturated;
        out /= i;
    }
    return out;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

bool is_perfect_square(std::int64_t x)
{
    if (x < 0)
        return false;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(x)));
    while (s * s > x)
        --s;
    while ((s + 1) * (s + 1) <= x)
        ++s;
    return s * s == x;
}

// ---------------------------------------------------------------------------

class Lattice final : public Space {
public:
    explicit Lattice(std::size_t d) : dim_(d)
    {
        if (d == 0)
            throw PresentationError("lattice dimension must be positive");
    }

    SpaceKind kind() const override { return SpaceKind::Lattice; }
    std::string describe() const override { return dim_ == 1 ? "Z" : "Z^" + std::to_string(dim_); }

    std::int64_t distance(const Point& a, const Point& b) const override
    {
        std::int64_t d = 0;
        for (std::size_t i = 0; i < dim_; ++i)
            d += std::abs(a[i] - b[i]);
        return d;
    }

    bool contains(const Point& p) const override { return p.size() == dim_; }

    std::vector<Point> ball(const Point& center, std::int64_t radius) const override
    {
        std::vector<Point> out;
        if (radius < 0)
            return out;
        std::vector<std::int64_t> coords(dim_);
        enumerate(center, radius, 0, coords, out);
        return out;
    }

    std::uint64_t ball_bound(std::int64_t r) const override
    {
        if (r < 0)
            return 0;
        std::uint64_t total = 0;
        auto ur = static_cast<std::uint64_t>(r);
        for (std::uint64_t i = 0; i <= std::min<std::uint64_t>(dim_, ur); ++i)
            total = sat_add(total, sat_mul(sat_mul(std::uint64_t{1} << std::min<std::uint64_t>(i, 62), binomial(dim_, i)),
                                           binomial(ur, i)));
        return total;
    }

    Point origin() const override { return Point(std::vector<std::int64_t>(dim_, 0)); }
    std::optional<std::size_t> lattice_dimension() const override { return dim_; }
    std::optional<std::vector<std::int64_t>> period() const override
    {
        return std::vector<std::int64_t>(dim_, 1);
    }

private:
    void enumerate(const Point& center, std::int64_t remaining, std::size_t axis, std::vector<std::int64_t>& coords,
                   std::vector<Point>& out) const
    {
        if (axis == dim_) {
            out.emplace_back(coords);
            return;
        }
        for (std::int64_t off = -remaining; off <= remaining; ++off) {
            coords[axis] = center[axis] + off;
            enumerate(center, remaining - std::abs(off), axis + 1, coords, out);
        }
    }

    std::size_t dim_;
};

class Subset final : public Space {
public:
    Subset(SpacePtr base, MembershipRule rule) : base_(std::move(base)), rule_(std::move(rule))
    {
        if (!base_ || base_->kind() != SpaceKind::Lattice)
            throw PresentationError("subset presentations require a lattice base");
        std::size_t d = *base_->lattice_dimension();
        if (rule_.periodic.has_value() == rule_.named.has_value())
            throw PresentationError("subset predicate needs exactly one of a periodic pattern or a named rule");
        if (rule_.periodic) {
            auto& pr = *rule_.periodic;
            if (pr.period.size() != d)
                throw PresentationError("periodic pattern needs one period per lattice coordinate");
            for (auto m : pr.period)
                if (m <= 0)
                    throw PresentationError("periodic pattern periods must be positive");
            for (auto& res : pr.residues) {
                if (res.size() != d)
                    throw PresentationError("periodic residue has wrong dimension");
                for (std::size_t i = 0; i < d; ++i)
                    res[i] = floor_mod(res[i], pr.period[i]);
            }
            std::sort(pr.residues.begin(), pr.residues.end());
            pr.residues.erase(std::unique(pr.residues.begin(), pr.residues.end()), pr.residues.end());
        }
        if (rule_.named && d != 1)
            throw PresentationError("the squares rule is only defined on Z");
    }

    SpaceKind kind() const override { return SpaceKind::Subset; }
    std::string describe() const override { return base_->describe() + "{" + rule_.describe() + "}"; }
    std::int64_t distance(const Point& a, const Point& b) const override { return base_->distance(a, b); }
    bool contains(const Point& p) const override { return base_->contains(p) && rule_.test(p); }

    std::vector<Point> ball(const Point& center, std::int64_t radius) const override
    {
        auto pts = base_->ball(center, radius);
        std::erase_if(pts, [&](const Point& p) { return !rule_.test(p); });
        return pts;
    }

    std::uint64_t ball_bound(std::int64_t r) const override { return base_->ball_bound(r); }

    Point origin() const override
    {
        Point o = base_->origin();
        for (std::int64_t r = 0; r < 1'000'000; ++r) {
            auto pts = ball(o, r);
            if (!pts.empty())
                return pts.front();
        }
        throw PresentationError("subset appears to be empty near the origin");
    }

    std::optional<std::size_t> lattice_dimension() const override { return base_->lattice_dimension(); }
    std::optional<std::vector<std::int64_t>> period() const override
    {
        if (rule_.periodic)
            return rule_.periodic->period;
        return std::nullopt;
    }

private:
    SpacePtr base_;
    MembershipRule rule_;
};

// Reduced words in a tree-like Cayley graph. For FreeGroup letters are +-1..+-rank with
// inverse -a; for RegularTree letters are 1..degree and every letter is an involution.
class WordSpace final : public Space {
public:
    WordSpace(SpaceKind kind, int param) : kind_(kind), param_(param)
    {
        if (kind == SpaceKind::FreeGroup && param < 1)
            throw PresentationError("free group rank must be positive");
        if (kind == SpaceKind::RegularTree && param < 2)
            throw PresentationError("regular tree degree must be at least 2");
        if (kind == SpaceKind::FreeGroup) {
            for (int a = 1; a <= param; ++a) {
                generators_.push_back(a);
                generators_.push_back(-a);
            }
            std::sort(generators_.begin(), generators_.end());
        } else {
            for (int a = 1; a <= param; ++a)
                generators_.push_back(a);
        }
    }

    SpaceKind kind() const override { return kind_; }
    std::string describe() const override
    {
        return kind_ == SpaceKind::FreeGroup ? "F_" + std::to_string(param_) : "T_" + std::to_string(param_);
    }

    std::int64_t distance(const Point& a, const Point& b) const override
    {
        std::size_t p = 0;
        while (p < a.size() && p < b.size() && a[p] == b[p])
            ++p;
        return static_cast<std::int64_t>(a.size() + b.size() - 2 * p);
    }

    bool contains(const Point& p) const override
    {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (std::find(generators_.begin(), generators_.end(), p[i]) == generators_.end())
                return false;
            if (i > 0 && p[i] == inverse(p[i - 1]))
                return false;
        }
        return true;
    }

    std::vector<Point> ball(const Point& center, std::int64_t radius) const override
    {
        std::vector<Point> out;
        if (radius < 0)
            return out;
        // BFS in the Cayley graph; the word metric is the graph metric.
        std::set<Point> seen{center};
        std::deque<std::pair<Point, std::int64_t>> queue{{center, 0}};
        while (!queue.empty()) {
            auto [p, d] = std::move(queue.front());
            queue.pop_front();
            if (d == radius)
                continue;
            for (auto g : generators_) {
                Point q = multiply(p, g);
                if (seen.insert(q).second)
                    queue.emplace_back(std::move(q), d + 1);
            }
        }
        out.assign(seen.begin(), seen.end());
        return out;
    }

    std::uint64_t ball_bound(std::int64_t r) const override
    {
        if (r < 0)
            return 0;
        std::uint64_t deg = generators_.size();
        std::uint64_t total = 1;
        std::uint64_t sphere = deg;
        for (std::int64_t k = 1; k <= r; ++k) {
            total = sat_add(total, sphere);
            sphere = sat_mul(sphere, deg - 1);
        }
        return total;
    }

    Point origin() const override { return Point{}; }

private:
    std::int64_t inverse(std::int64_t a) const { return kind_ == SpaceKind::FreeGroup ? -a : a; }

    Point multiply(const Point& p, std::int64_t g) const
    {
        Point q = p;
        if (!q.coords.empty() && q.coords.back() == inverse(g))
            q.coords.pop_back();
        else
            q.coords.push_back(g);
        return q;
    }

    SpaceKind kind_;
    int param_;
    std::vector<std::int64_t> generators_;
};

class Doubling final : public Space {
public:
    explicit Doubling(SpacePtr base) : base_(std::move(base))
    {
        if (!base_)
            throw PresentationError("doubling needs a base space");
    }

    SpaceKind kind() const override { return SpaceKind::Doubling; }
    std::string describe() const override { return "D(" + base_->describe() + ")"; }

    std::int64_t distance(const Point& a, const Point& b) const override
    {
        return base_->distance(strip(a), strip(b)) + std::abs(a.coords.back() - b.coords.back());
    }

    bool contains(const Point& p) const override
    {
        if (p.coords.empty())
            return false;
        auto j = p.coords.back();
        return (j == 0 || j == 1) && base_->contains(strip(p));
    }

    std::vector<Point> ball(const Point& center, std::int64_t radius) const override
    {
        std::vector<Point> out;
        if (radius < 0)
            return out;
        Point base_center = strip(center);
        auto sheet = center.coords.back();
        for (auto& p : base_->ball(base_center, radius))
            out.push_back(lift(p, sheet));
        for (auto& p : base_->ball(base_center, radius - 1))
            out.push_back(lift(p, 1 - sheet));
        std::sort(out.begin(), out.end());
        return out;
    }

    std::uint64_t ball_bound(std::int64_t r) const override
    {
        return sat_add(base_->ball_bound(r), base_->ball_bound(r - 1));
    }

    Point origin() const override { return lift(base_->origin(), 0); }

    const SpacePtr& base() const { return base_; }

    static Point strip(const Point& p)
    {
        Point q = p;
        q.coords.pop_back();
        return q;
    }

    static Point lift(const Point& p, std::int64_t sheet)
    {
        Point q = p;
        q.coords.push_back(sheet);
        return q;
    }

private:
    SpacePtr base_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::string format_point(const Point& p)
{
    if (p.size() == 1)
        return std::to_string(p[0]);
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ",";
        out += std::to_string(p[i]);
    }
    return out + "]";
}

Point parse_point(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    };
    auto parse_int = [](std::string_view s) -> std::int64_t {
        std::int64_t v = 0;
        std::istringstream in{std::string(s)};
        if (!(in >> v) || !(in >> std::ws).eof())
            throw ParseError("malformed coordinate '" + std::string(s) + "'", 0, 0);
        return v;
    };
    text = trim(text);
    if (text.empty())
        throw ParseError("empty point literal", 0, 0);
    if (text.front() != '[')
        return Point{parse_int(text)};
    if (text.back() != ']')
        throw ParseError("unterminated point literal '" + std::string(text) + "'", 0, 0);
    text = trim(text.substr(1, text.size() - 2));
    Point p;
    while (!text.empty()) {
        auto comma = text.find(',');
        p.coords.push_back(parse_int(trim(text.substr(0, comma))));
        if (comma == std::string_view::npos)
            break;
        text = text.substr(comma + 1);
    }
    return p;
}

bool MembershipRule::test(const Point& p) const
{
    bool member = false;
    if (periodic) {
        std::vector<std::int64_t> res(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            res[i] = floor_mod(p[i], periodic->period[i]);
        member = std::binary_search(periodic->residues.begin(), periodic->residues.end(), res);
    } else if (named) {
        member = is_perfect_square(p[0]);
    }
    return member != complement;
}

std::string MembershipRule::describe() const
{
    std::string out = complement ? "not " : "";
    if (named)
        return out + "squares";
    if (periodic) {
        out += "periodic(";
        for (std::size_t i = 0; i < periodic->period.size(); ++i)
            out += (i ? "," : "") + std::to_string(periodic->period[i]);
        out += ";";
        for (std::size_t k = 0; k < periodic->residues.size(); ++k) {
            out += k ? " " : "";
            out += format_point(Point(periodic->residues[k]));
        }
        return out + ")";
    }
    return out + "?";
}

SpacePtr make_lattice(std::size_t dimension) { return std::make_shared<Lattice>(dimension); }
SpacePtr make_subset(SpacePtr lattice, MembershipRule rule)
{
    return std::make_shared<Subset>(std::move(lattice), std::move(rule));
}
SpacePtr make_free_group(int rank) { return std::make_shared<WordSpace>(SpaceKind::FreeGroup, rank); }
SpacePtr make_regular_tree(int degree) { return std::make_shared<WordSpace>(SpaceKind::RegularTree, degree); }
SpacePtr make_doubling(SpacePtr base) { return std::make_shared<Doubling>(std::move(base)); }

SpacePtr doubling_base(const Space& space)
{
    if (auto* d = dynamic_cast<const Doubling*>(&space))
        return d->base();
    return nullptr;
}

// ---------------------------------------------------------------------------

Window Window::build(SpacePtr space, const Point& center, std::int64_t radius, std::int64_t margin,
                     std::size_t point_budget)
{
    if (!space)
        throw PresentationError("window needs a space");
    if (margin < 0 || radius < margin)
        throw ContractViolation("window requires radius >= margin >= 0");
    if (!space->contains(center))
        throw PresentationError("window center " + format_point(center) + " is not a point of " + space->describe());
    if (space->ball_bound(radius) > point_budget) {
        // The bound can be pessimistic for subsets; enumerate only if the base is small enough.
        if (space->kind() != SpaceKind::Subset || space->ball_bound(radius) > 64 * point_budget)
            throw ResourceError("window of radius " + std::to_string(radius) + " exceeds the point budget of " +
                                std::to_string(point_budget));
    }

    Window w;
    w.space_ = std::move(space);
    w.center_ = center;
    w.radius_ = radius;
    w.margin_ = margin;
    w.points_ = w.space_->ball(center, radius);
    if (w.points_.size() > point_budget)
        throw ResourceError("window of radius " + std::to_string(radius) + " has " + std::to_string(w.points_.size()) +
                            " points, over the budget of " + std::to_string(point_budget));
    w.center_distance_.reserve(w.points_.size());
    w.interior_.reserve(w.points_.size());
    for (std::size_t i = 0; i < w.points_.size(); ++i) {
        w.index_.emplace(w.points_[i], static_cast<PointId>(i));
        auto d = w.space_->distance(center, w.points_[i]);
        w.center_distance_.push_back(d);
        w.interior_.push_back(d <= radius - margin);
    }
    return w;
}

std::optional<PointId> Window::find(const Point& p) const
{
    auto it = index_.find(p);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::int64_t Window::distance(PointId a, PointId b) const { return space_->distance(points_[a], points_[b]); }

std::vector<PointId> Window::interior() const
{
    std::vector<PointId> out;
    for (PointId i = 0; i < points_.size(); ++i)
        if (interior_[i])
            out.push_back(i);
    return out;
}

std::vector<PointId> Window::frontier() const
{
    std::vector<PointId> out;
    for (PointId i = 0; i < points_.size(); ++i)
        if (!interior_[i])
            out.push_back(i);
    return out;
}

std::size_t Window::interior_size() const { return static_cast<std::size_t>(std::count(interior_.begin(), interior_.end(), true)); }

std::vector<PointId> Window::neighbors(PointId id, std::int64_t r) const
{
    std::vector<PointId> out;
    for (auto& q : space_->ball(points_[id], r)) {
        if (q == points_[id])
            continue;
        if (auto j = find(q))
            out.push_back(*j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PointId> r_boundary(const Window& w, std::span<const PointId> subset, std::int64_t r)
{
    if (r <= 0)
        throw ContractViolation("r_boundary needs a positive radius");
    std::vector<char> in_f(w.size(), 0);
    for (auto id : subset) {
        if (id >= w.size())
            throw ContractViolation("r_boundary subset is not contained in the window");
        if (!w.ball_complete(id, r))
            throw PrecisionError("r = " + std::to_string(r) + " reaches past the window edge from point " +
                                 format_point(w.point(id)) + "; the collar would depend on the window");
        in_f[id] = 1;
    }
    std::vector<char> collar(w.size(), 0);
    for (auto id : subset) {
        auto ball = w.space().ball(w.point(id), r);
        for (auto& q : ball) {
            if (q == w.point(id))
                continue;
            auto j = w.find(q);
            // Every ambient neighbor of an F-point lies in the window (ball_complete).
            if (j && in_f[*j])
                continue;
            collar[id] = 1;        // near the complement
            if (j)
                collar[*j] = 1;    // complement point near F
        }
    }
    std::vector<PointId> out;
    for (PointId i = 0; i < w.size(); ++i)
        if (collar[i])
            out.push_back(i);
    return out;
}

std::uint64_t crossing_edges(const Window& w, std::span<const PointId> subset, std::int64_t r)
{
    std::vector<char> in_f(w.size(), 0);
    for (auto id : subset) {
        if (!w.ball_complete(id, r))
            throw PrecisionError("crossing edges of a set touching the window edge are window dependent");
        in_f[id] = 1;
    }
    std::uint64_t count = 0;
    for (auto id : subset)
        for (auto& q : w.space().ball(w.point(id), r)) {
            auto j = w.find(q);
            if (j && !in_f[*j])
                ++count;
        }
    return count;
}

// ---------------------------------------------------------------------------

std::string FolnerFamily::describe() const
{
    switch (shape) {
    case FolnerShape::Interval: return "{0..n-1}";
    case FolnerShape::Box: return "{0..n-1}^d";
    case FolnerShape::CenteredBox: return "[-n,n]^d";
    case FolnerShape::Ball: return "B_n(origin)";
    }
    return "?";
}

namespace {

void enumerate_box(std::vector<std::int64_t>& coords, std::size_t axis, std::int64_t lo, std::int64_t hi,
                   std::vector<Point>& out)
{
    if (axis == coords.size()) {
        out.emplace_back(coords);
        return;
    }
    for (std::int64_t x = lo; x <= hi; ++x) {
        coords[axis] = x;
        enumerate_box(coords, axis + 1, lo, hi, out);
    }
}

}  // namespace

std::vector<Point> FolnerFamily::set(const Space& space, std::int64_t n) const
{
    std::vector<Point> out;
    if (shape == FolnerShape::Ball) {
        out = space.ball(space.origin(), n);
        return out;
    }
    auto dim = space.lattice_dimension();
    if (!dim)
        throw PresentationError("box-shaped Folner sets need a lattice space");
    if (shape == FolnerShape::Interval && *dim != 1)
        throw PresentationError("interval Folner sets need Z");
    std::vector<std::int64_t> coords(*dim);
    if (shape == FolnerShape::CenteredBox)
        enumerate_box(coords, 0, -n, n, out);
    else
        enumerate_box(coords, 0, 0, n - 1, out);
    std::erase_if(out, [&](const Point& p) { return !space.contains(p); });
    return out;
}

Point FolnerFamily::anchor(const Space& space, std::int64_t n) const
{
    if (shape == FolnerShape::Interval || shape == FolnerShape::Box) {
        auto dim = *space.lattice_dimension();
        return Point(std::vector<std::int64_t>(dim, (n - 1) / 2));
    }
    if (shape == FolnerShape::CenteredBox)
        return Point(std::vector<std::int64_t>(*space.lattice_dimension(), 0));
    return space.origin();
}

Window window_for_set(const SpacePtr& space, const Point& anchor, std::span<const Point> set, std::int64_t r,
                      std::size_t point_budget)
{
    Point center = anchor;
    if (!space->contains(center)) {
        // Subsets may miss the anchor; use the nearest member instead.
        for (std::int64_t k = 1;; ++k) {
            auto near = space->ball(anchor, k);
            if (!near.empty()) {
                center = near.front();
                break;
            }
            if (k > 1'000'000)
                throw PresentationError("no point of the space near the anchor");
        }
    }
    std::int64_t reach = 0;
    for (auto& p : set)
        reach = std::max(reach, space->distance(center, p));
    return Window::build(space, center, reach + r, r, point_budget);
}

IsoperimetricProfile isoperimetric_profile(const SpacePtr& space, const FolnerFamily& family, std::int64_t r,
                                           std::int64_t n_min, std::int64_t n_max, std::size_t point_budget)
{
    if (r <= 0)
        throw ContractViolation("isoperimetric profile needs r > 0");
    IsoperimetricProfile prof;
    for (std::int64_t n = n_min; n <= n_max; ++n) {
        auto set = family.set(*space, n);
        if (set.empty())
            throw ContractViolation("Folner set S_" + std::to_string(n) + " is empty");
        if (set.size() > point_budget)
            throw ResourceError("Folner set S_" + std::to_string(n) + " exceeds the point budget");
        Window w = window_for_set(space, family.anchor(*space, n), set, r, point_budget);
        std::vector<PointId> ids;
        ids.reserve(set.size());
        for (auto& p : set)
            ids.push_back(*w.find(p));
        auto collar = r_boundary(w, ids, r);
        ProfileEntry e;
        e.n = n;
        e.set_size = set.size();
        e.boundary_size = collar.size();
        e.ratio = Rational(Integer(std::to_string(collar.size())), Integer(std::to_string(set.size())));
        e.ratio.canonicalize();
        prof.entries.push_back(std::move(e));
    }
    prof.non_increasing = true;
    for (std::size_t i = 1; i < prof.entries.size(); ++i)
        if (prof.entries[i].ratio > prof.entries[i - 1].ratio)
            prof.non_increasing = false;
    return prof;
}

std::uint64_t observed_ball_size(const Window& w, std::int64_t r)
{
    std::uint64_t best = 0;
    for (PointId i = 0; i < w.size(); ++i)
        if (w.ball_complete(i, r))
            best = std::max<std::uint64_t>(best, w.neighbors(i, r).size() + 1);
    return best;
}

}  // namespace ufh
