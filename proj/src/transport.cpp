#include "ufh/transport.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

// Dinic's algorithm on exact rational capacities.
class Dinic {
public:
    explicit Dinic(std::size_t n) : adj_(n), level_(n), it_(n) {}

    struct ArcRef {
        std::uint32_t node;
        std::uint32_t index;
    };

    ArcRef add_arc(std::uint32_t u, std::uint32_t v, const Rational& cap)
    {
        ArcRef ref{u, static_cast<std::uint32_t>(adj_[u].size())};
        adj_[u].push_back({v, static_cast<std::uint32_t>(adj_[v].size()), cap, cap});
        adj_[v].push_back({u, ref.index, Rational(0), Rational(0)});
        return ref;
    }

    Rational flow_on(ArcRef ref) const
    {
        auto& a = adj_[ref.node][ref.index];
        return a.original - a.cap;
    }

    Rational max_flow(std::uint32_t s, std::uint32_t t)
    {
        Rational total = 0;
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            for (;;) {
                Rational pushed = dfs(s, t, Rational(-1));
                if (pushed == 0)
                    break;
                total += pushed;
            }
        }
        return total;
    }

    std::vector<bool> reachable(std::uint32_t s) const
    {
        std::vector<bool> seen(adj_.size(), false);
        std::vector<std::uint32_t> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto& a : adj_[u])
                if (a.cap > 0 && !seen[a.to]) {
                    seen[a.to] = true;
                    stack.push_back(a.to);
                }
        }
        return seen;
    }

private:
    struct Arc {
        std::uint32_t to;
        std::uint32_t rev;
        Rational cap;
        Rational original;
    };

    bool bfs(std::uint32_t s, std::uint32_t t)
    {
        std::fill(level_.begin(), level_.end(), -1);
        std::vector<std::uint32_t> queue{s};
        level_[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            auto u = queue[head];
            for (auto& a : adj_[u])
                if (a.cap > 0 && level_[a.to] < 0) {
                    level_[a.to] = level_[u] + 1;
                    queue.push_back(a.to);
                }
        }
        return level_[t] >= 0;
    }

    // limit < 0 stands for "unbounded" at the source.
    Rational dfs(std::uint32_t u, std::uint32_t t, const Rational& limit)
    {
        if (u == t)
            return limit;
        for (auto& i = it_[u]; i < adj_[u].size(); ++i) {
            auto& a = adj_[u][i];
            if (a.cap <= 0 || level_[a.to] != level_[u] + 1)
                continue;
            Rational room = (limit < 0 || a.cap < limit) ? a.cap : limit;
            Rational got = dfs(a.to, t, room);
            if (got > 0) {
                a.cap -= got;
                adj_[a.to][a.rev].cap += got;
                return got;
            }
        }
        return Rational(0);
    }

    std::vector<std::vector<Arc>> adj_;
    std::vector<int> level_;
    std::vector<std::size_t> it_;
};

Rational as_rational(std::uint64_t v) { return Rational(Integer(std::to_string(v))); }

}  // namespace

std::size_t TransportGraph::constrained_count() const
{
    return static_cast<std::size_t>(std::count(free.begin(), free.end(), false));
}

std::uint64_t TransportGraph::crossing(const std::vector<bool>& in_subset) const
{
    std::uint64_t n = 0;
    for (auto [a, b] : edges)
        if (in_subset[a] != in_subset[b])
            ++n;
    return n;
}

bool FlowCertificate::integral() const
{
    return std::all_of(flows.begin(), flows.end(), [](const EdgeFlow& e) { return is_integral(e.flow); });
}

std::vector<Rational> FlowCertificate::divergence(std::size_t node_count) const
{
    std::vector<Rational> div(node_count);
    for (auto& e : flows) {
        div[e.head] += e.flow;
        div[e.tail] -= e.flow;
    }
    return div;
}

FlowCertificate solve_transport(const TransportGraph& g, const Rational& cap, const std::vector<NodeBounds>& bounds)
{
    if (cap < 0)
        throw ContractViolation("capacity must be nonnegative");
    if (bounds.size() != g.node_count || g.free.size() != g.node_count)
        throw ContractViolation("bounds and graph disagree on the node count");
    const auto n = static_cast<std::uint32_t>(g.node_count);
    const std::uint32_t hub = n, s = n + 1, t = n + 2;
    auto node = [&](NodeId v) { return g.free[v] ? hub : v; };

    Dinic dinic(n + 3);
    struct Pair {
        std::optional<Dinic::ArcRef> forward, backward;
    };
    std::vector<Pair> arcs(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto u = node(g.edges[e].first), v = node(g.edges[e].second);
        if (u == v)
            continue;
        arcs[e].forward = dinic.add_arc(u, v, cap);
        arcs[e].backward = dinic.add_arc(v, u, cap);
    }
    // Node v's divergence is carried by an arc v -> hub with flow in [lower, upper];
    // the lower bounds are moved into source/sink arcs.
    std::vector<Rational> excess(n + 1);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (g.free[v])
            continue;
        auto& b = bounds[v];
        if (b.lower > b.upper)
            throw ContractViolation("empty divergence interval at node " + std::to_string(v));
        dinic.add_arc(v, hub, b.upper - b.lower);
        excess[hub] += b.lower;
        excess[v] -= b.lower;
    }
    Rational required = 0;
    for (std::uint32_t v = 0; v <= n; ++v) {
        if (excess[v] > 0) {
            dinic.add_arc(s, v, excess[v]);
            required += excess[v];
        } else if (excess[v] < 0) {
            dinic.add_arc(v, t, -excess[v]);
        }
    }

    FlowCertificate cert;
    Rational got = dinic.max_flow(s, t);
    if (got == required) {
        cert.feasible = true;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (!arcs[e].forward)
                continue;
            Rational net = dinic.flow_on(*arcs[e].forward) - dinic.flow_on(*arcs[e].backward);
            auto [a, b] = g.edges[e];
            if (net > 0)
                cert.flows.push_back({a, b, net});
            else if (net < 0)
                cert.flows.push_back({b, a, -net});
        }
        std::sort(cert.flows.begin(), cert.flows.end(), [](const EdgeFlow& x, const EdgeFlow& y) {
            return std::pair(x.tail, x.head) < std::pair(y.tail, y.head);
        });
        return cert;
    }

    // Translate the minimum cut back into a violated inequality on a constrained set.
    auto reach = dinic.reachable(s);
    const bool hub_on_source_side = reach[hub];
    std::vector<bool> in_f(n, false);
    for (std::uint32_t v = 0; v < n; ++v)
        if (!g.free[v] && reach[v] != hub_on_source_side)
            in_f[v] = true;
    for (std::uint32_t v = 0; v < n; ++v)
        if (in_f[v])
            cert.cut.push_back(v);
    cert.cut_crossing = g.crossing(in_f);
    Rational capacity = cap * as_rational(cert.cut_crossing);
    for (auto v : cert.cut)
        cert.cut_sum += hub_on_source_side ? bounds[v].lower : bounds[v].upper;
    cert.deficit = hub_on_source_side ? Rational(cert.cut_sum - capacity) : Rational(-capacity - cert.cut_sum);
    if (cert.deficit <= 0)
        throw std::logic_error("transport: minimum cut does not violate its inequality");
    return cert;
}

FlowCertificate solve_demands(const TransportGraph& g, const Rational& cap, const std::vector<Rational>& demands)
{
    std::vector<NodeBounds> bounds(g.node_count);
    for (std::size_t v = 0; v < g.node_count; ++v)
        bounds[v] = {demands[v], demands[v]};
    return solve_transport(g, cap, bounds);
}

CapacityResult min_capacity(const TransportGraph& g, const std::vector<Rational>& demands)
{
    CapacityResult res;
    Rational c = 0;
    for (;;) {
        ++res.iterations;
        auto cert = solve_demands(g, c, demands);
        if (cert.feasible) {
            res.value = c;
            res.flow = std::move(cert);
            return res;
        }
        Rational sum = abs(cert.cut_sum);
        if (cert.cut_crossing == 0) {
            res.infinite = true;
            res.witness = std::move(cert);
            return res;
        }
        Rational next = sum / as_rational(cert.cut_crossing);
        if (next <= c)
            throw std::logic_error("transport: parametric capacity search stalled");
        c = next;
        res.witness = std::move(cert);
    }
}

WidthResult min_width(const TransportGraph& g, const Rational& cap, const std::vector<Rational>& c)
{
    WidthResult res;
    Rational t = 0;
    std::vector<NodeBounds> bounds(g.node_count);
    for (;;) {
        for (std::size_t v = 0; v < g.node_count; ++v)
            bounds[v] = {-c[v] - t, -c[v] + t};
        auto cert = solve_transport(g, cap, bounds);
        if (cert.feasible) {
            res.value = t;
            res.flow = std::move(cert);
            return res;
        }
        Rational sum = 0;
        for (auto v : cert.cut)
            sum += c[v];
        Rational next = (abs(sum) - cap * as_rational(cert.cut_crossing)) / Rational(static_cast<long>(cert.cut.size()));
        if (next <= t)
            throw std::logic_error("transport: parametric width search stalled");
        t = next;
        res.witness = std::move(cert);
    }
}

TransportGraph window_graph(const Window& w, std::int64_t r)
{
    if (r < 1)
        throw ContractViolation("propagation radius must be positive");
    if (w.margin() < r)
        throw PrecisionError("window margin " + std::to_string(w.margin()) + " is below r = " + std::to_string(r) +
                             "; interior neighbourhoods would be truncated");
    TransportGraph g;
    g.node_count = w.size();
    g.free.assign(w.size(), false);
    for (PointId id = 0; id < w.size(); ++id)
        g.free[id] = !w.is_interior(id);
    for (PointId a = 0; a < w.size(); ++a) {
        if (!w.is_interior(a))
            continue;
        for (auto b : w.neighbors(a, r))
            if (b > a || !w.is_interior(b))
                g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::vector<Rational> window_demands(const Window& w, const DemandMap& demands)
{
    std::vector<Rational> out(w.size());
    for (auto& [id, v] : demands) {
        if (id >= w.size())
            throw ContractViolation("demand on a point outside the window");
        if (v != 0 && !w.is_interior(id))
            throw ContractViolation("demand on frontier point " + format_point(w.point(id)));
        out[id] = v;
    }
    return out;
}

FlowCertificate feasible_divergence_flow(const Window& w, std::int64_t r, const Rational& cap, const DemandMap& demands)
{
    return solve_demands(window_graph(w, r), cap, window_demands(w, demands));
}

CapacityResult min_feasible_capacity(const Window& w, std::int64_t r, const DemandMap& demands)
{
    if (w.interior_size() == 0)
        throw ContractViolation("window has an empty interior");
    return min_capacity(window_graph(w, r), window_demands(w, demands));
}

UFChain flow_chain(const FlowCertificate& cert, std::span<const Point> nodes, Ring ring)
{
    UFChain b(1, ring);
    for (auto& e : cert.flows)
        b.add({nodes[e.tail], nodes[e.head]}, e.flow);
    return b;
}

CutOracleResult brute_force_cut_oracle(const Window& w, std::int64_t r, const DemandMap& demands, const Rational& cap,
                                       CutMeasure measure)
{
    auto interior = w.interior();
    if (interior.size() > 16)
        throw ResourceError("brute-force cut oracle is capped at 16 interior points, got " +
                            std::to_string(interior.size()));
    if (w.margin() < r)
        throw PrecisionError("window margin is below r");
    auto dem = window_demands(w, demands);
    std::vector<std::vector<PointId>> nbrs(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i)
        nbrs[i] = w.neighbors(interior[i], r);

    CutOracleResult best;
    best.value = 0;
    std::vector<bool> in_f(w.size(), false);
    std::vector<bool> marked(w.size(), false);
    const std::uint32_t total = 1u << interior.size();
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        Rational sum = 0;
        for (std::size_t i = 0; i < interior.size(); ++i) {
            in_f[interior[i]] = (mask >> i) & 1u;
            if (in_f[interior[i]])
                sum += dem[interior[i]];
        }
        std::uint64_t m = 0;
        std::vector<PointId> touched;
        for (std::size_t i = 0; i < interior.size(); ++i) {
            if (!in_f[interior[i]])
                continue;
            bool on_edge = false;
            for (auto y : nbrs[i]) {
                if (in_f[y])
                    continue;
                on_edge = true;
                if (measure == CutMeasure::Crossing)
                    ++m;
                else if (!marked[y]) {
                    marked[y] = true;
                    touched.push_back(y);
                }
            }
            if (measure == CutMeasure::Collar && on_edge)
                ++m;
        }
        m += touched.size();
        for (auto y : touched)
            marked[y] = false;
        Rational value = abs(sum) - cap * as_rational(m);
        if (value > best.value) {
            best.value = value;
            best.demand_sum = sum;
            best.measure = m;
            best.subset.clear();
            for (std::size_t i = 0; i < interior.size(); ++i)
                if (in_f[interior[i]])
                    best.subset.push_back(interior[i]);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

NodeId Torus::index_of(const Point& p) const
{
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        auto c = ((p[i] % sides[i]) + sides[i]) % sides[i];
        idx = idx * static_cast<std::uint64_t>(sides[i]) + static_cast<std::uint64_t>(c);
    }
    return static_cast<NodeId>(idx);
}

Torus make_torus(std::vector<std::int64_t> sides, std::int64_t r)
{
    if (sides.empty())
        throw ContractViolation("torus needs at least one side");
    std::uint64_t count = 1;
    for (auto L : sides) {
        if (L < 2 * r + 1)
            throw ContractViolation("torus side " + std::to_string(L) + " is below 2r+1");
        count *= static_cast<std::uint64_t>(L);
        if (count > kDefaultPointBudget)
            throw ResourceError("torus exceeds the point budget");
    }
    Torus t;
    t.sides = std::move(sides);
    const std::size_t d = t.sides.size();
    t.points.reserve(count);
    std::vector<std::int64_t> c(d, 0);
    for (std::uint64_t k = 0; k < count; ++k) {
        t.points.emplace_back(c);
        for (std::size_t i = d; i-- > 0;) {
            if (++c[i] < t.sides[i])
                break;
            c[i] = 0;
        }
    }
    // Offsets v with 1 <= |v|_1 <= r whose first nonzero coordinate is positive.
    std::vector<std::vector<std::int64_t>> offsets;
    std::vector<std::int64_t> v(d, 0);
    auto rec = [&](auto&& self, std::size_t i, std::int64_t budget) -> void {
        if (i == d) {
            auto nz = std::find_if(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
            if (nz != v.end() && *nz > 0)
                offsets.push_back(v);
            return;
        }
        for (std::int64_t x = -budget; x <= budget; ++x) {
            v[i] = x;
            self(self, i + 1, budget - (x < 0 ? -x : x));
        }
        v[i] = 0;
    };
    rec(rec, 0, r);

    t.graph.node_count = t.points.size();
    t.graph.free.assign(t.points.size(), false);
    struct Tagged {
        NodeId a, b;
        std::vector<std::int64_t> off;
    };
    std::vector<Tagged> tagged;
    for (NodeId a = 0; a < t.points.size(); ++a) {
        for (auto& off : offsets) {
            std::vector<std::int64_t> q(d);
            for (std::size_t i = 0; i < d; ++i)
                q[i] = t.points[a][i] + off[i];
            NodeId b = t.index_of(Point(q));
            if (a < b)
                tagged.push_back({a, b, off});
            else {
                std::vector<std::int64_t> neg(d);
                for (std::size_t i = 0; i < d; ++i)
                    neg[i] = -off[i];
                tagged.push_back({b, a, neg});
            }
        }
    }
    std::sort(tagged.begin(), tagged.end(), [](const Tagged& x, const Tagged& y) {
        return std::tie(x.a, x.b, x.off) < std::tie(y.a, y.b, y.off);
    });
    for (auto& e : tagged) {
        t.graph.edges.emplace_back(e.a, e.b);
        t.offsets.push_back(std::move(e.off));
    }
    return t;
}

UFChain lift_torus_flow(const Torus& t, const FlowCertificate& cert, const Window& w, Ring ring)
{
    auto dim = w.space().lattice_dimension();
    if (!dim || *dim != t.sides.size())
        throw ContractViolation("torus flows lift only to windows of the matching lattice");
    std::map<std::pair<NodeId, NodeId>, std::vector<std::size_t>> edge_index;
    for (std::size_t e = 0; e < t.graph.edges.size(); ++e)
        edge_index[t.graph.edges[e]].push_back(e);
    UFChain b(1, ring);
    for (auto& f : cert.flows) {
        // Orient each flow along the stored offset.
        bool forward = f.tail < f.head;
        auto key = forward ? std::pair(f.tail, f.head) : std::pair(f.head, f.tail);
        auto& es = edge_index.at(key);
        if (es.size() != 1)
            throw std::logic_error("torus: parallel edges cannot be lifted unambiguously");
        auto& off = t.offsets[es.front()];
        NodeId from = forward ? f.tail : f.head;
        for (auto& x : w.points()) {
            if (t.index_of(x) != from)
                continue;
            std::vector<std::int64_t> y(x.coords);
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] += off[i];
            Point py(std::move(y));
            if (!w.contains(py))
                continue;
            if (forward)
                b.add({x, py}, f.flow);
            else
                b.add({py, x}, f.flow);
        }
    }
    return b;
}

// ---------------------------------------------------------------------------

void write_flow_tsv(std::ostream& out, const FlowCertificate& cert, std::span<const Point> nodes)
{
    out << "tail\thead\tflow\n";
    for (auto& e : cert.flows)
        out << format_point(nodes[e.tail]) << '\t' << format_point(nodes[e.head]) << '\t' << to_string(e.flow) << '\n';
}

void write_cut_tsv(std::ostream& out, const FlowCertificate& cert, const TransportGraph& g,
                   std::span<const Point> nodes)
{
    out << "point\tin_F\n";
    std::vector<bool> in_f(g.node_count, false);
    for (auto v : cert.cut)
        in_f[v] = true;
    for (NodeId v = 0; v < g.node_count; ++v)
        if (!g.free[v])
            out << format_point(nodes[v]) << '\t' << (in_f[v] ? 1 : 0) << '\n';
}

}  // namespace ufh
