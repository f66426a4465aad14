#pragma once

// Quasi-isometries between presented spaces: constants, fundamental-class pushforwards,
// the bilipschitz decision through the degree-0 obstruction, matchings extracted from
// integral flows, homomorphisms of Z^d, and the averaging chain map onto Z minus squares.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/degree0.hpp"
#include "ufh/space.hpp"
#include "ufh/transport.hpp"

namespace ufh {

struct QIMap {
    SpacePtr source;
    SpacePtr target;
    std::string rule;
    std::function<std::optional<Point>(const Point&)> apply;
    /// Declared constants: d(x,x')/C - D <= d(fx, fx') <= C d(x,x') + D.
    Rational C = 1;
    Rational D = 0;

    /// Throws DomainError off the domain.
    Point operator()(const Point& x) const;
    PointMap point_map() const { return apply; }
};

QIMap identity_map(SpacePtr space);
/// Inclusion of a subset presentation into its ambient lattice.
QIMap inclusion_map(SpacePtr subset, SpacePtr ambient);
/// x -> M x on Z^d (d = rows of M, square).
QIMap matrix_map(std::vector<std::vector<std::int64_t>> m);
QIMap scale_map(std::int64_t k);  // x -> kx on Z
/// x -> floor(x / k) on Z.
QIMap floor_div_map(std::int64_t k);
QIMap shift_map(std::vector<std::int64_t> v);
/// Doubling(X) -> X forgetting the sheet.
QIMap doubling_projection(SpacePtr doubling);
/// The maps f_j : Z -> Z \ A (A = squares, 0 included) used for averaging:
///   x if x is not a square, x + j for squares >= n^2, -n x - j for squares < n^2.
QIMap averaging_branch(std::int64_t n, std::int64_t j);

// ---------------------------------------------------------------------------

struct QIReport {
    std::size_t pairs = 0;
    bool declared_ok = true;
    std::optional<std::pair<Point, Point>> violation;  // a pair breaking the declared constants
    std::int64_t best_C = 1;
    Rational best_D;
    std::vector<std::pair<std::int64_t, Rational>> profile;  // C -> least D(C)
};

/// Checks every pair of window points. The tightest constants are taken as the integer C in
/// [1, max_C] minimising C + D(C), ties going to the smaller C.
QIReport verify_qi(const QIMap& f, const Window& w, std::int64_t max_C = 8);

/// Sum over y of |f^-1(y) restricted to the interior of w_src| * y. Throws WindowError when an
/// interior point maps outside w_tgt.
UFChain pushforward_fundamental(const QIMap& f, const Window& w_src, const Window& w_tgt);

/// Smallest source window containing every preimage of the target window, from the
/// declared constants: radius C (R + d(f(anchor), center) + D) around the anchor.
Window source_window_for(const QIMap& f, const Window& target, const Point& anchor,
                         std::size_t point_budget = kDefaultPointBudget);

struct MatchingCertificate {
    std::vector<std::pair<Point, Point>> pairs;  // (source point, matched target point), target order
    std::int64_t displacement = 0;               // max d(f(x), match(x))
    std::size_t imports = 0;                     // units that had to enter through the frontier
    std::size_t exports = 0;                     // preimages left on frontier points
    bool bijective_on_interior = false;          // every interior target matched to a distinct source point
};

/// Moves preimage tokens against an integral flow for the obstruction |f^-1(y)| - 1 so that
/// every interior target point ends with exactly one. Tokens leaving a node are its own
/// preimages first, in lexicographic order. Throws ContractViolation on fractional flows.
MatchingCertificate extract_bounded_matching(const QIMap& f, const Window& target, const Window& source,
                                             const FlowCertificate& flow);

struct BilipschitzOptions {
    std::optional<Point> source_anchor;  // defaults to the source origin
    unsigned jobs = 1;
    bool extract_matching = true;
    std::size_t point_budget = kDefaultPointBudget;
    /// Periodic form of the obstruction on Z^d, when known; enables the torus certificate.
    std::optional<PeriodicPromotion> promotion;
};

struct BilipschitzResult {
    ClassVerdict verdict;  // over Z, on the target schedule
    std::optional<MatchingCertificate> matching;  // on the last window when trivial
    bool yes() const { return verdict.status == VerdictStatus::Trivial; }
    bool no() const { return verdict.status == VerdictStatus::Nontrivial; }
};

/// Decides whether f is uniformly close to a bilipschitz equivalence from the class of
/// f_*[X] - [Y] in degree-0 homology over Z.
BilipschitzResult bilipschitz_verdict(const QIMap& f, std::int64_t r, const std::vector<WindowSpec>& target_schedule,
                                      const BilipschitzOptions& opts = {});

// ---------------------------------------------------------------------------

Integer determinant(const std::vector<std::vector<std::int64_t>>& m);

struct GroupHomReport {
    std::vector<std::vector<std::int64_t>> matrix;
    Integer kernel_size;
    Integer cokernel_size;
    bool predicted_yes = false;
    BilipschitzResult measured;
    bool agrees = false;
    /// f_*[Z^d] - (1/|coker|) [Z^d] vanishes over the rationals (torus certificate).
    bool pushforward_identity = false;
    Rational image_mean;  // periodic mean of f_*[Z^d]
};

/// Throws DomainError for singular matrices (infinite kernel and cokernel).
GroupHomReport group_hom_report(const std::vector<std::vector<std::int64_t>>& m, std::int64_t r,
                                const std::vector<std::int64_t>& radii, unsigned jobs = 1);

/// Indicator of the image lattice M Z^d, as a periodic pattern.
CyclePattern image_lattice_pattern(const std::vector<std::vector<std::int64_t>>& m);

// ---------------------------------------------------------------------------

/// phi = (1/n) sum_{j=1..n} (f_j)_* applied to a chain on Z.
UFChain averaging_map(std::int64_t n, const UFChain& c);

struct AveragingReport {
    std::int64_t n = 0;
    std::size_t degree = 0;
    Rational bound;      // 1 + (2^(degree+1) - 1) / n
    Rational max_ratio;  // largest ||phi(c)|| / ||c|| seen
    std::size_t samples = 0;
    std::size_t violations = 0;
    std::size_t identity_checks = 0;
    std::size_t identity_failures = 0;
    bool chain_map_ok = true;
};

/// Samples random chains and all-ones chains on the window (which must contain n^2, else
/// WindowError), measures the norm ratio, and checks phi o i_* = id on random chains
/// supported off the squares.
AveragingReport averaging_chain_map(std::int64_t n, std::size_t degree, const Window& w, std::size_t samples,
                                    std::uint64_t seed);

}  // namespace ufh
