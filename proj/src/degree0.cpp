#include "ufh/degree0.hpp"

#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "ufh/errors.hpp"

namespace ufh {

UFChain fundamental_class(const Window& w, Ring ring)
{
    UFChain c(0, ring);
    for (auto& p : w.points())
        c.add({p}, 1);
    c.declare_bounds(0, Rational(1));
    return c;
}

std::vector<WindowSpec> make_schedule(const Point& center, const std::vector<std::int64_t>& radii, std::int64_t margin)
{
    std::vector<WindowSpec> out;
    for (auto R : radii)
        out.push_back({center, R, margin});
    return out;
}

std::string to_string(VerdictStatus s)
{
    switch (s) {
    case VerdictStatus::Trivial:
        return "trivial";
    case VerdictStatus::Nontrivial:
        return "nontrivial";
    default:
        return "inconclusive";
    }
}

Rational NontrivialWitness::deficit(const Rational& cap, CutMeasure m) const
{
    auto measure = m == CutMeasure::Collar ? collar : crossing;
    return abs(demand_sum) - cap * Rational(Integer(std::to_string(measure)));
}

namespace {

// Runs body(i) for i in [0, n) on up to `jobs` threads; the first exception in index order
// is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body body)
{
    std::vector<std::exception_ptr> errors(n);
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < n;) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::vector<std::int64_t> torus_sides(const std::vector<std::int64_t>& period, std::int64_t r)
{
    std::vector<std::int64_t> sides;
    for (auto p : period) {
        std::int64_t k = (2 * r + 1 + p - 1) / p;
        sides.push_back(k * p);
    }
    return sides;
}

NontrivialWitness make_witness(const VerdictEntry& e, std::size_t index, std::int64_t r, const Rational& c_ref)
{
    NontrivialWitness w;
    w.entry = index;
    const auto& cut = *e.witness;
    std::vector<PointId> ids(cut.cut.begin(), cut.cut.end());
    for (auto id : ids)
        w.subset.push_back(e.window->point(id));
    w.demand_sum = cut.cut_sum;
    w.crossing = cut.cut_crossing;
    w.collar = r_boundary(*e.window, ids, r).size();
    w.c_ref = c_ref;
    w.deficit_crossing = w.deficit(c_ref, CutMeasure::Crossing);
    w.deficit_collar = w.deficit(c_ref, CutMeasure::Collar);
    return w;
}

}  // namespace

ClassVerdict verdict_from_provider(const SpacePtr& space, const CycleProvider& cycle, std::int64_t r,
                                   const std::vector<WindowSpec>& schedule, const VerdictOptions& opts,
                                   const std::optional<PeriodicPromotion>& promotion)
{
    ClassVerdict v;
    v.r = r;
    v.ring = opts.ring;
    v.entries.resize(schedule.size());
    std::vector<std::vector<Rational>> demands(schedule.size());

    parallel_for(schedule.size(), opts.jobs, [&](std::size_t i) {
        auto& e = v.entries[i];
        e.spec = schedule[i];
        e.window = std::make_shared<const Window>(
            Window::build(space, schedule[i].center, schedule[i].radius, schedule[i].margin, opts.point_budget));
        auto c = cycle(*e.window);
        if (c.degree() != 0)
            throw ContractViolation("verdicts take degree-0 cycles");
        DemandMap d;
        for (auto id : e.window->interior()) {
            auto val = c.coefficient({e.window->point(id)});
            if (opts.ring == Ring::Int && !is_integral(val))
                throw ContractViolation("integer verdict on a cycle with fractional coefficient at " +
                                        format_point(e.window->point(id)));
            if (val != 0)
                d[id] = val;
        }
        demands[i] = window_demands(*e.window, d);
        auto res = min_feasible_capacity(*e.window, r, d);
        e.infinite = res.infinite;
        e.c_min = res.value;
        e.witness = std::move(res.witness);
    });

    auto certify_windows = [&](const Rational& cap) {
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            auto cert = solve_demands(window_graph(*v.entries[i].window, r), cap, demands[i]);
            if (!cert.feasible)
                throw std::logic_error("verdict: certified capacity fails on a scheduled window");
            v.entries[i].certificate = std::move(cert);
        }
    };

    for (std::size_t i = 0; i < v.entries.size(); ++i) {
        if (v.entries[i].infinite) {
            v.status = VerdictStatus::Nontrivial;
            v.witness = make_witness(v.entries[i], i, r, Rational(0));
            v.reason = "a finite set with nonzero total has no r-edges leaving it";
            return v;
        }
    }

    if (promotion && space->kind() == SpaceKind::Lattice) {
        auto t = make_torus(torus_sides(promotion->period, r), r);
        std::vector<Rational> c(t.points.size());
        for (std::size_t k = 0; k < t.points.size(); ++k) {
            c[k] = promotion->evaluate(t.points[k]);
            if (opts.ring == Ring::Int && !is_integral(c[k]))
                throw ContractViolation("integer verdict on a cycle with fractional coefficients");
        }
        auto res = min_capacity(t.graph, c);
        if (!res.infinite) {
            Rational cap(ceil_of(res.value));
            PeriodicCertificate pc;
            pc.sides = t.sides;
            pc.c_min = res.value;
            pc.flow = solve_demands(t.graph, cap, c);
            v.periodic = std::move(pc);
            v.certified_capacity = cap;
            v.status = VerdictStatus::Trivial;
            v.reason = "periodic flow on the torus lifts to a bounded chain on the whole lattice";
            certify_windows(cap);
            return v;
        }
    }

    const std::size_t n = v.entries.size();
    for (std::size_t i = n >= 3 ? n - 3 : 0; n >= 3; --i) {
        const auto& a = v.entries[i].c_min;
        const auto& b = v.entries[i + 1].c_min;
        const auto& c = v.entries[i + 2].c_min;
        if (a < b && b < c && c >= 2 * a) {
            v.status = VerdictStatus::Nontrivial;
            v.witness = make_witness(v.entries[i + 2], i + 2, r, a);
            v.reason = "least capacity at least doubles across three consecutive windows";
            return v;
        }
        if (i == 0)
            break;
    }

    if (n < 3) {
        v.reason = "fewer than three windows and no periodic certificate";
        return v;
    }

    Integer last(ceil_of(v.entries[n - 1].c_min));
    Integer prev(ceil_of(v.entries[n - 2].c_min));
    if (last == prev) {
        Rational top = 0;
        for (auto& e : v.entries)
            if (e.c_min > top)
                top = e.c_min;
        Rational cap(ceil_of(top));
        v.status = VerdictStatus::Trivial;
        v.certified_capacity = cap;
        v.reason = "integer capacity stable on the largest windows";
        certify_windows(cap);
        return v;
    }
    v.reason = "capacities neither stabilise nor diverge across the schedule";
    return v;
}

ClassVerdict class_verdict(const CyclePattern& pattern, const SpacePtr& space, std::int64_t r,
                           const std::vector<WindowSpec>& schedule, const VerdictOptions& opts)
{
    std::optional<PeriodicPromotion> promo;
    if (auto dim = space->lattice_dimension(); dim && space->kind() == SpaceKind::Lattice) {
        if (auto per = pattern.period(*dim))
            promo = PeriodicPromotion{*per, [pattern](const Point& p) { return pattern.evaluate(p); }};
    }
    return verdict_from_provider(
        space, [&](const Window& w) { return pattern.materialize(w, opts.ring); }, r, schedule, opts, promo);
}

void write_verdict_tsv(std::ostream& out, const ClassVerdict& v)
{
    out << "window_radius\tC_min\tverdict\twitness_size\n";
    for (auto& e : v.entries) {
        out << e.spec.radius << '\t' << (e.infinite ? std::string("inf") : to_string(e.c_min)) << '\t'
            << to_string(v.status) << '\t' << (e.witness ? e.witness->cut.size() : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------

MeanEstimate folner_mean(const CyclePattern& pattern, const SpacePtr& space, const FolnerFamily& family,
                         std::int64_t n_min, std::int64_t n_max)
{
    MeanEstimate est;
    est.family = family.describe();
    for (std::int64_t n = n_min; n <= n_max; ++n) {
        auto set = family.set(*space, n);
        if (set.empty())
            throw ContractViolation("empty Folner set");
        Rational sum = 0;
        for (auto& p : set)
            sum += pattern.evaluate(p);
        est.values.push_back({n, set.size(), sum / make_rational(static_cast<std::int64_t>(set.size()))});
    }
    if (space->kind() == SpaceKind::Lattice)
        est.limit = pattern.period_average(*space->lattice_dimension());
    return est;
}

MeanLowerBound seminorm_lower_via_mean(const CyclePattern& pattern, const SpacePtr& space, const FolnerFamily& family,
                                       std::int64_t n_min, std::int64_t n_max)
{
    auto est = folner_mean(pattern, space, family, n_min, n_max);
    MeanLowerBound out;
    if (!est.values.empty()) {
        std::size_t from = est.values.size() / 2;
        out.evidence = abs(est.values[from].value);
        for (std::size_t i = from; i < est.values.size(); ++i)
            if (abs(est.values[i].value) < out.evidence)
                out.evidence = abs(est.values[i].value);
    }
    if (est.limit) {
        out.bound = abs(*est.limit);
        out.certified = true;
    }
    return out;
}

SeminormBound seminorm_upper(const CyclePattern& pattern, const SpacePtr& space, std::int64_t r, const Rational& cap,
                             const std::vector<WindowSpec>& schedule, Ring ring)
{
    if (cap < 0)
        throw ContractViolation("correction cap must be nonnegative");
    SeminormBound out;
    out.r = r;
    out.ring = ring;
    out.cap = ring == Ring::Int ? Rational(floor_of(cap)) : cap;

    auto solve = [&](const TransportGraph& g, const std::vector<Rational>& c) {
        auto res = min_width(g, out.cap, c);
        if (ring == Ring::Int) {
            Rational t(ceil_of(res.value));
            std::vector<NodeBounds> bounds(g.node_count);
            for (std::size_t k = 0; k < g.node_count; ++k)
                bounds[k] = {-c[k] - t, -c[k] + t};
            res.value = t;
            res.flow = solve_transport(g, out.cap, bounds);
        }
        return res;
    };

    // Checks |c + boundary(b)| <= t on the interior using the chain boundary operator.
    auto corrected_ok = [&](const Window& w, const UFChain& b, const Rational& t) {
        auto db = boundary(b);
        for (auto id : w.interior()) {
            auto& p = w.point(id);
            if (abs(pattern.evaluate(p) + db.coefficient({p})) > t)
                return false;
        }
        return sup_norm(b) <= out.cap;
    };

    for (auto& spec : schedule) {
        Window w = Window::build(space, spec.center, spec.radius, spec.margin);
        auto g = window_graph(w, r);
        std::vector<Rational> c(w.size());
        for (auto id : w.interior())
            c[id] = pattern.evaluate(w.point(id));
        auto res = solve(g, c);
        SeminormWindow sw;
        sw.spec = spec;
        sw.value = res.value;
        sw.correction = flow_chain(res.flow, w.points(), ring);
        sw.verified = res.flow.feasible && corrected_ok(w, sw.correction, sw.value);
        out.windows.push_back(std::move(sw));
    }

    auto dim = space->lattice_dimension();
    std::optional<std::vector<std::int64_t>> per;
    if (dim && space->kind() == SpaceKind::Lattice)
        per = pattern.period(*dim);
    if (per) {
        auto t = make_torus(torus_sides(*per, r), r);
        std::vector<Rational> c(t.points.size());
        for (std::size_t k = 0; k < t.points.size(); ++k)
            c[k] = pattern.evaluate(t.points[k]);
        auto res = solve(t.graph, c);
        out.value = res.value;
        out.certified = true;
        out.torus_sides = t.sides;
        std::int64_t span = 0;
        for (auto L : t.sides)
            span += L;
        auto w = std::make_shared<const Window>(Window::build(space, space->origin(), span + r, r));
        out.correction = lift_torus_flow(t, res.flow, *w, ring);
        out.check_window = w;
        out.correction_verified = res.flow.feasible && corrected_ok(*w, *out.correction, out.value);
        return out;
    }
    if (out.windows.empty())
        throw ContractViolation("aperiodic patterns need a window schedule");
    out.value = 0;
    for (auto& sw : out.windows)
        if (sw.value > out.value)
            out.value = sw.value;
    return out;
}

}  // namespace ufh
