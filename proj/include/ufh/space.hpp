#pragma once

// Finite descriptions of infinite UDBG spaces and the finite metric windows cut out of them.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ufh/rational.hpp"

namespace ufh {

/// Canonical normal form of a point: an integer vector for lattice points, the letter
/// sequence of a reduced word for tree/free-group points, and the base normal form with
/// the sheet index appended for doubled spaces. Ordered lexicographically.
struct Point {
    std::vector<std::int64_t> coords;

    Point() = default;
    Point(std::initializer_list<std::int64_t> init) : coords(init) {}
    explicit Point(std::vector<std::int64_t> c) : coords(std::move(c)) {}

    std::size_t size() const { return coords.size(); }
    std::int64_t operator[](std::size_t i) const { return coords[i]; }

    friend auto operator<=>(const Point&, const Point&) = default;
    friend bool operator==(const Point&, const Point&) = default;
};

// "5" for one coordinate, "[a,b,...]" otherwise ("[]" for the empty word).
std::string format_point(const Point& p);
Point parse_point(std::string_view text);

enum class SpaceKind { Lattice, Subset, FreeGroup, RegularTree, Doubling };

/// Membership predicate of a subset of Z^d.
struct PeriodicRule {
    std::vector<std::int64_t> period;                  // one modulus per coordinate
    std::vector<std::vector<std::int64_t>> residues;   // members mod period
};

enum class NamedRule { Squares };  // {n^2 : n >= 0} in Z

struct MembershipRule {
    std::optional<PeriodicRule> periodic;
    std::optional<NamedRule> named;
    bool complement = false;

    bool test(const Point& p) const;
    std::string describe() const;
};

/// An infinite UDBG space with integer-valued metric, so the separation gap is 1.
/// Instances are immutable and shared through SpacePtr.
class Space {
public:
    virtual ~Space() = default;

    virtual SpaceKind kind() const = 0;
    virtual std::string describe() const = 0;
    virtual std::int64_t distance(const Point& a, const Point& b) const = 0;
    virtual bool contains(const Point& p) const = 0;
    /// All points within `radius` of `center`, sorted.
    virtual std::vector<Point> ball(const Point& center, std::int64_t radius) const = 0;
    /// Uniform bound K(r) on |B_r(x)|; saturates at UINT64_MAX.
    virtual std::uint64_t ball_bound(std::int64_t r) const = 0;
    /// Distinguished base point (lattice origin, identity element, ...).
    virtual Point origin() const = 0;

    /// Ambient lattice dimension for Z^d and its subsets.
    virtual std::optional<std::size_t> lattice_dimension() const { return std::nullopt; }
    /// Translation period of the space itself (all ones for Z^d); empty when aperiodic.
    virtual std::optional<std::vector<std::int64_t>> period() const { return std::nullopt; }

    Rational separation() const { return Rational(1); }
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_lattice(std::size_t dimension);
SpacePtr make_subset(SpacePtr lattice, MembershipRule rule);
SpacePtr make_free_group(int rank);
/// Cayley graph of the free product of `degree` copies of Z/2: the degree-regular tree.
SpacePtr make_regular_tree(int degree);
/// base x {0,1} with d((x,i),(y,j)) = d(x,y) + |i - j|.
SpacePtr make_doubling(SpacePtr base);

/// Base space of a Doubling, or nullptr.
SpacePtr doubling_base(const Space& space);

using PointId = std::uint32_t;

inline constexpr std::size_t kDefaultPointBudget = 1'000'000;

/// A centered ball of an ambient space together with an interior/frontier split.
/// Interior points are those at distance <= radius - margin from the center, so every
/// ball of radius <= margin around an interior point is complete inside the window.
class Window {
public:
    static Window build(SpacePtr space, const Point& center, std::int64_t radius, std::int64_t margin,
                        std::size_t point_budget = kDefaultPointBudget);

    const Space& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    const Point& center() const { return center_; }
    std::int64_t radius() const { return radius_; }
    std::int64_t margin() const { return margin_; }

    std::size_t size() const { return points_.size(); }
    std::span<const Point> points() const { return points_; }
    const Point& point(PointId id) const { return points_[id]; }
    std::optional<PointId> find(const Point& p) const;
    bool contains(const Point& p) const { return index_.count(p) != 0; }

    bool is_interior(PointId id) const { return interior_[id]; }
    std::int64_t center_distance(PointId id) const { return center_distance_[id]; }
    std::int64_t distance(PointId a, PointId b) const;

    std::vector<PointId> interior() const;
    std::vector<PointId> frontier() const;
    std::size_t interior_size() const;

    /// Window points at distance in (0, r] from `id`, sorted. Exact whenever
    /// center_distance(id) + r <= radius.
    std::vector<PointId> neighbors(PointId id, std::int64_t r) const;

    /// True when the r-ball around `id` lies completely inside the window.
    bool ball_complete(PointId id, std::int64_t r) const { return center_distance_[id] + r <= radius_; }

private:
    Window() = default;

    SpacePtr space_;
    Point center_;
    std::int64_t radius_ = 0;
    std::int64_t margin_ = 0;
    std::vector<Point> points_;
    std::map<Point, PointId> index_;
    std::vector<std::int64_t> center_distance_;
    std::vector<bool> interior_;
};

/// Two-sided collar { x : d(x,F) <= r and d(x, X \ F) <= r }, as window ids.
/// Throws PrecisionError when some point of F is closer than r to the window's edge,
/// since the collar would then depend on the truncation.
std::vector<PointId> r_boundary(const Window& w, std::span<const PointId> subset, std::int64_t r);

/// Number of unordered pairs {x, y} with x in F, y not in F and d(x,y) <= r.
std::uint64_t crossing_edges(const Window& w, std::span<const PointId> subset, std::int64_t r);

enum class FolnerShape {
    Interval,     // {0, ..., n-1} in Z
    Box,          // {0, ..., n-1}^d
    CenteredBox,  // [-n, n]^d
    Ball          // B_n(origin)
};

struct FolnerFamily {
    FolnerShape shape = FolnerShape::Ball;

    std::string describe() const;
    /// S_n as sorted ambient points (intersected with the space for subsets).
    std::vector<Point> set(const Space& space, std::int64_t n) const;
    /// Point around which a window containing S_n is centered.
    Point anchor(const Space& space, std::int64_t n) const;
};

struct ProfileEntry {
    std::int64_t n = 0;
    std::size_t set_size = 0;
    std::size_t boundary_size = 0;
    Rational ratio;
};

struct IsoperimetricProfile {
    std::vector<ProfileEntry> entries;
    bool non_increasing = false;  // observed trend only; no limit is claimed
};

IsoperimetricProfile isoperimetric_profile(const SpacePtr& space, const FolnerFamily& family, std::int64_t r,
                                           std::int64_t n_min, std::int64_t n_max,
                                           std::size_t point_budget = kDefaultPointBudget);

/// Smallest window (margin r) around family.anchor containing S_n with S_n inside the interior.
Window window_for_set(const SpacePtr& space, const Point& anchor, std::span<const Point> set, std::int64_t r,
                      std::size_t point_budget = kDefaultPointBudget);

/// Max over window points with complete r-balls of |B_r(x)|; compared against ball_bound(r).
std::uint64_t observed_ball_size(const Window& w, std::int64_t r);

}  // namespace ufh
