#pragma once

// Bounded-transport feasibility: does some edge chain b with |b| <= C on r-edges have a
// prescribed divergence (or a divergence inside prescribed intervals) at every
// constrained node? Frontier nodes of a window are left free.
//
// Sign convention: an edge chain b contributes b(x,y) * ((y) - (x)) to its boundary, so
// the divergence at a node is inflow minus outflow.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/rational.hpp"
#include "ufh/space.hpp"

namespace ufh {

using NodeId = std::uint32_t;
using DemandMap = std::map<PointId, Rational>;

/// Undirected graph with per-edge capacity C in both directions. Free nodes have
/// unconstrained divergence (they act together as a single source/sink).
struct TransportGraph {
    std::size_t node_count = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;  // a < b, no duplicates
    std::vector<bool> free;

    std::size_t constrained_count() const;
    /// Edges with exactly one endpoint in `subset` (a constrained node set).
    std::uint64_t crossing(const std::vector<bool>& in_subset) const;
};

struct NodeBounds {
    Rational lower;
    Rational upper;
};

struct EdgeFlow {
    NodeId tail = 0;
    NodeId head = 0;
    Rational flow;  // > 0; b(tail, head) = flow
};

/// Either a feasible flow or a constrained node set F violating
///   sum_F lower <= C * cross(F)   or   sum_F upper >= -C * cross(F).
/// For fixed demands this is |sum_F c| > C * cross(F).
struct FlowCertificate {
    bool feasible = false;
    std::vector<EdgeFlow> flows;   // sorted by (tail, head)
    std::vector<NodeId> cut;       // sorted
    Rational cut_sum;              // sum over F of the violated bound
    std::uint64_t cut_crossing = 0;
    Rational deficit;              // amount by which the cut inequality fails

    bool integral() const;
    /// Divergence of the flow at every node.
    std::vector<Rational> divergence(std::size_t node_count) const;
};

/// Exact max-flow based solver for the interval problem. `bounds` is indexed by node and
/// ignored at free nodes.
FlowCertificate solve_transport(const TransportGraph& g, const Rational& cap, const std::vector<NodeBounds>& bounds);

/// Fixed demands: divergence must equal demands[v] at constrained nodes.
FlowCertificate solve_demands(const TransportGraph& g, const Rational& cap, const std::vector<Rational>& demands);

struct CapacityResult {
    bool infinite = false;
    Rational value;                        // C*, meaningful when !infinite
    FlowCertificate flow;                  // feasible flow at C* (when finite)
    std::optional<FlowCertificate> witness;  // cut with ratio exactly C* (or the infinite witness)
    int iterations = 0;
};

/// Least C for which the fixed-demand problem is feasible. Parametric: each violating cut
/// F found at the current C raises C to |sum_F c| / cross(F); the candidate set is finite
/// so the iteration stops, and the last cut certifies optimality.
CapacityResult min_capacity(const TransportGraph& g, const std::vector<Rational>& demands);

struct WidthResult {
    Rational value;  // t*
    FlowCertificate flow;
    std::optional<FlowCertificate> witness;
};

/// Least t such that some b with |b| <= cap gives |c_x + div_x b| <= t at every constrained
/// node. Equals max(0, max_F (|sum_F c| - cap * cross(F)) / |F|).
WidthResult min_width(const TransportGraph& g, const Rational& cap, const std::vector<Rational>& c);

// ---------------------------------------------------------------------------
// Windows

/// Nodes are window point ids; frontier points are free; edges are pairs at distance <= r
/// touching the interior. Throws PrecisionError when margin < r.
TransportGraph window_graph(const Window& w, std::int64_t r);

/// Interior-indexed demand vector; throws ContractViolation for demands on the frontier.
std::vector<Rational> window_demands(const Window& w, const DemandMap& demands);

FlowCertificate feasible_divergence_flow(const Window& w, std::int64_t r, const Rational& cap, const DemandMap& demands);

/// Throws ContractViolation on an empty interior.
CapacityResult min_feasible_capacity(const Window& w, std::int64_t r, const DemandMap& demands);

/// Edge chain sum flow * (tail, head) with points taken from `nodes`.
UFChain flow_chain(const FlowCertificate& cert, std::span<const Point> nodes, Ring ring = Ring::Rat);

enum class CutMeasure { Collar, Crossing };

struct CutOracleResult {
    std::vector<PointId> subset;
    Rational demand_sum;
    std::uint64_t measure = 0;
    Rational value;  // |demand_sum| - C * measure
};

/// Exhaustive maximization of |sum_F c| - C * measure(F) over F within the interior.
/// Throws ResourceError for interiors above 16 points.
CutOracleResult brute_force_cut_oracle(const Window& w, std::int64_t r, const DemandMap& demands, const Rational& cap,
                                       CutMeasure measure = CutMeasure::Collar);

// ---------------------------------------------------------------------------
// Tori: quotients Z^d / (L_1 Z x ... x L_d Z) used to certify periodic data.

struct Torus {
    std::vector<std::int64_t> sides;
    std::vector<Point> points;  // lexicographic, coordinates in [0, L_i)
    TransportGraph graph;
    /// offsets[e]: points[edges[e].first] + offsets[e] is congruent to points[edges[e].second].
    std::vector<std::vector<std::int64_t>> offsets;

    NodeId index_of(const Point& p) const;  // p reduced mod sides
};

/// Requires every side >= 2r + 1 so that r-edges do not wrap onto themselves.
Torus make_torus(std::vector<std::int64_t> sides, std::int64_t r);

/// Periodic lift of a torus flow: every edge flow is copied onto all translates (x, x + v)
/// with both endpoints in `w` (a window of the lattice Z^d with matching d).
UFChain lift_torus_flow(const Torus& t, const FlowCertificate& cert, const Window& w, Ring ring = Ring::Rat);

// ---------------------------------------------------------------------------
// TSV

void write_flow_tsv(std::ostream& out, const FlowCertificate& cert, std::span<const Point> nodes);
/// One row per constrained node.
void write_cut_tsv(std::ostream& out, const FlowCertificate& cert, const TransportGraph& g,
                   std::span<const Point> nodes);

}  // namespace ufh
