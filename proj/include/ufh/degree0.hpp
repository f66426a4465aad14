#pragma once

// Degree-0 analysis: vanishing verdicts by bounded transport, Folner means and the
// restricted seminorm optimum.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/pattern.hpp"
#include "ufh/space.hpp"
#include "ufh/transport.hpp"

namespace ufh {

/// All-ones degree-0 chain on the window, declared with propagation 0 and norm 1.
UFChain fundamental_class(const Window& w, Ring ring = Ring::Int);

struct WindowSpec {
    Point center;
    std::int64_t radius = 0;
    std::int64_t margin = 0;
};

/// One WindowSpec per radius, all sharing center and margin.
std::vector<WindowSpec> make_schedule(const Point& center, const std::vector<std::int64_t>& radii, std::int64_t margin);

enum class VerdictStatus { Trivial, Nontrivial, Inconclusive };
std::string to_string(VerdictStatus s);

struct VerdictOptions {
    Ring ring = Ring::Rat;
    unsigned jobs = 1;
    std::size_t point_budget = kDefaultPointBudget;
};

struct VerdictEntry {
    WindowSpec spec;
    std::shared_ptr<const Window> window;
    bool infinite = false;
    Rational c_min;                          // exact least capacity on this window
    std::optional<FlowCertificate> witness;  // cut realising c_min
    std::optional<FlowCertificate> certificate;  // flow at the certified capacity (trivial verdicts)
};

struct NontrivialWitness {
    std::size_t entry = 0;      // index into the schedule
    std::vector<Point> subset;  // F, inside that window's interior
    Rational demand_sum;
    std::uint64_t crossing = 0;
    std::uint64_t collar = 0;   // |boundary_r F|, two-sided collar
    Rational c_ref;             // capacity that sufficed on an earlier window
    Rational deficit_crossing;  // |sum| - c_ref * crossing
    Rational deficit_collar;    // |sum| - c_ref * collar

    Rational deficit(const Rational& cap, CutMeasure m = CutMeasure::Collar) const;
};

struct PeriodicCertificate {
    std::vector<std::int64_t> sides;
    Rational c_min;
    FlowCertificate flow;  // at the certified capacity
};

struct ClassVerdict {
    VerdictStatus status = VerdictStatus::Inconclusive;
    std::int64_t r = 1;
    Ring ring = Ring::Rat;
    std::vector<VerdictEntry> entries;  // schedule order
    std::optional<Rational> certified_capacity;  // trivial: one integer C good for every window
    std::optional<NontrivialWitness> witness;
    std::optional<PeriodicCertificate> periodic;  // set when the torus argument applied
    std::string reason;
};

/// Produces the degree-0 cycle on a window; only interior terms are used.
using CycleProvider = std::function<UFChain(const Window&)>;

struct PeriodicPromotion {
    std::vector<std::int64_t> period;
    std::function<Rational(const Point&)> evaluate;
};

/// Runs the least-capacity search on each scheduled window and applies the decision rules:
///   a window with infinite capacity, or three consecutive windows whose capacities
///   strictly increase and at least double, give Nontrivial with the last cut as witness;
///   a feasible torus flow (periodic data on Z^d) gives a conclusive Trivial;
///   equal integer capacities ceil(C) on the last two windows give Trivial with that C;
///   anything else is Inconclusive.
ClassVerdict verdict_from_provider(const SpacePtr& space, const CycleProvider& cycle, std::int64_t r,
                                   const std::vector<WindowSpec>& schedule, const VerdictOptions& opts = {},
                                   const std::optional<PeriodicPromotion>& promotion = std::nullopt);

ClassVerdict class_verdict(const CyclePattern& pattern, const SpacePtr& space, std::int64_t r,
                           const std::vector<WindowSpec>& schedule, const VerdictOptions& opts = {});

/// TSV rows window_radius, C_min, verdict, witness_size.
void write_verdict_tsv(std::ostream& out, const ClassVerdict& v);

// ---------------------------------------------------------------------------

struct MeanEntry {
    std::int64_t n = 0;
    std::size_t set_size = 0;
    Rational value;
};

struct MeanEstimate {
    std::string family;
    std::vector<MeanEntry> values;
    std::optional<Rational> limit;  // exact, for lattice-periodic patterns on Z^d
};

MeanEstimate folner_mean(const CyclePattern& pattern, const SpacePtr& space, const FolnerFamily& family,
                         std::int64_t n_min, std::int64_t n_max);

struct SeminormWindow {
    WindowSpec spec;
    Rational value;      // t* on this window (frontier left free)
    UFChain correction;  // b realising it
    bool verified = false;
};

struct SeminormBound {
    std::int64_t r = 1;
    Rational cap;
    Ring ring = Ring::Rat;
    Rational value;
    /// True when the value is the torus optimum of a periodic pattern: the lifted periodic
    /// correction is a genuine uniformly finite chain, so value bounds the seminorm.
    bool certified = false;
    std::optional<std::vector<std::int64_t>> torus_sides;
    std::optional<UFChain> correction;       // periodic correction, materialized on `check_window`
    std::shared_ptr<const Window> check_window;
    bool correction_verified = false;
    std::vector<SeminormWindow> windows;     // per-window relaxations (not certified)
};

/// Least t with ||c + boundary(b)|| <= t over corrections b with |b| <= cap and propagation
/// <= r. Periodic patterns on Z^d are solved on a torus and certified; otherwise the
/// scheduled windows are solved with free frontier and reported as uncertified evidence.
/// Over Z the optimum is rounded up to an integer and the correction is integral.
SeminormBound seminorm_upper(const CyclePattern& pattern, const SpacePtr& space, std::int64_t r, const Rational& cap,
                             const std::vector<WindowSpec>& schedule, Ring ring = Ring::Rat);

struct MeanLowerBound {
    Rational bound;     // certified lower bound on the seminorm
    Rational evidence;  // inf of |mean| over the upper half of the computed range
    bool certified = false;
};

MeanLowerBound seminorm_lower_via_mean(const CyclePattern& pattern, const SpacePtr& space, const FolnerFamily& family,
                                       std::int64_t n_min, std::int64_t n_max);

}  // namespace ufh
