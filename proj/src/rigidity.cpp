#include "ufh/rigidity.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

Rational from_int(std::int64_t v) { return make_rational(v); }

bool is_square(std::int64_t x)
{
    if (x < 0)
        return false;
    Integer root;
    mpz_sqrt(root.get_mpz_t(), Integer(std::to_string(x)).get_mpz_t());
    return root * root == Integer(std::to_string(x));
}

SpacePtr z_minus_squares()
{
    MembershipRule rule;
    rule.named = NamedRule::Squares;
    rule.complement = true;
    return make_subset(make_lattice(1), rule);
}

using Matrix = std::vector<std::vector<std::int64_t>>;

void check_square(const Matrix& m)
{
    if (m.empty())
        throw PresentationError("empty matrix");
    for (auto& row : m)
        if (row.size() != m.size())
            throw PresentationError("matrix must be square");
}

// Bareiss fraction-free elimination.
Integer bareiss(std::vector<std::vector<Integer>> a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return 1;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0)
                ++p;
            if (p == n)
                return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

std::vector<std::vector<Integer>> to_integer(const Matrix& m)
{
    std::vector<std::vector<Integer>> a(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (auto v : m[i])
            a[i].push_back(Integer(std::to_string(v)));
    return a;
}

std::vector<std::vector<Integer>> adjugate(const Matrix& m)
{
    const std::size_t n = m.size();
    auto a = to_integer(m);
    std::vector<std::vector<Integer>> adj(n, std::vector<Integer>(n));
    if (n == 1) {
        adj[0][0] = 1;
        return adj;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<std::vector<Integer>> minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j)
                    continue;
                std::vector<Integer> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i)
                        row.push_back(a[r][c]);
                minor.push_back(std::move(row));
            }
            Integer d = bareiss(std::move(minor));
            adj[i][j] = (i + j) % 2 ? Integer(-d) : d;
        }
    return adj;
}

}  // namespace

Point QIMap::operator()(const Point& x) const
{
    auto y = apply(x);
    if (!y)
        throw DomainError(rule + " is undefined at " + format_point(x));
    return *y;
}

QIMap identity_map(SpacePtr space)
{
    QIMap f;
    f.source = space;
    f.target = space;
    f.rule = "identity";
    f.apply = [](const Point& x) { return std::optional<Point>(x); };
    return f;
}

QIMap inclusion_map(SpacePtr subset, SpacePtr ambient)
{
    QIMap f;
    f.rule = "inclusion";
    f.apply = [s = subset](const Point& x) { return s->contains(x) ? std::optional<Point>(x) : std::nullopt; };
    f.source = std::move(subset);
    f.target = std::move(ambient);
    return f;
}

QIMap matrix_map(Matrix m)
{
    check_square(m);
    const std::size_t d = m.size();
    Integer det = determinant(m);
    if (det == 0)
        throw DomainError("singular matrix has infinite kernel");
    // l1 operator norms of M and M^-1 (max column sums).
    Rational fwd = 0, inv = 0;
    auto adj = adjugate(m);
    for (std::size_t c = 0; c < d; ++c) {
        Rational s = 0, t = 0;
        for (std::size_t r = 0; r < d; ++r) {
            s += from_int(std::abs(m[r][c]));
            t += Rational(abs(adj[r][c]));
        }
        t /= Rational(abs(det));
        fwd = std::max(fwd, s);
        inv = std::max(inv, t);
    }
    QIMap f;
    f.source = make_lattice(d);
    f.target = f.source;
    f.rule = "matrix";
    f.C = Rational(ceil_of(std::max(fwd, inv)));
    f.apply = [m](const Point& x) -> std::optional<Point> {
        if (x.size() != m.size())
            return std::nullopt;
        std::vector<std::int64_t> y(m.size(), 0);
        for (std::size_t r = 0; r < m.size(); ++r)
            for (std::size_t c = 0; c < m.size(); ++c)
                y[r] += m[r][c] * x[c];
        return Point(std::move(y));
    };
    return f;
}

QIMap scale_map(std::int64_t k)
{
    if (k == 0)
        throw DomainError("x -> 0 x is not a quasi-isometry");
    auto f = matrix_map({{k}});
    f.rule = "x -> " + std::to_string(k) + "x";
    return f;
}

QIMap floor_div_map(std::int64_t k)
{
    if (k <= 0)
        throw PresentationError("floor division needs a positive divisor");
    QIMap f;
    f.source = make_lattice(1);
    f.target = f.source;
    f.rule = "x -> floor(x/" + std::to_string(k) + ")";
    f.C = from_int(k);
    f.D = 1;
    f.apply = [k](const Point& x) -> std::optional<Point> {
        if (x.size() != 1)
            return std::nullopt;
        std::int64_t q = x[0] / k;
        if (x[0] % k != 0 && x[0] < 0)
            --q;
        return Point{q};
    };
    return f;
}

QIMap shift_map(std::vector<std::int64_t> v)
{
    QIMap f;
    f.source = make_lattice(v.size());
    f.target = f.source;
    f.rule = "x -> x + " + format_point(Point(v));
    f.apply = [v](const Point& x) -> std::optional<Point> {
        if (x.size() != v.size())
            return std::nullopt;
        auto y = x.coords;
        for (std::size_t i = 0; i < v.size(); ++i)
            y[i] += v[i];
        return Point(std::move(y));
    };
    return f;
}

QIMap doubling_projection(SpacePtr doubling)
{
    auto base = doubling_base(*doubling);
    if (!base)
        throw PresentationError("projection needs a doubled space");
    QIMap f;
    f.source = std::move(doubling);
    f.target = std::move(base);
    f.rule = "forget sheet";
    f.D = 1;
    f.apply = [](const Point& x) -> std::optional<Point> {
        if (x.size() == 0)
            return std::nullopt;
        auto c = x.coords;
        c.pop_back();
        return Point(std::move(c));
    };
    return f;
}

QIMap averaging_branch(std::int64_t n, std::int64_t j)
{
    if (n < 1 || j < 1 || j > n)
        throw PresentationError("averaging branch needs 1 <= j <= n");
    QIMap f;
    f.source = make_lattice(1);
    f.target = z_minus_squares();
    f.rule = "f_" + std::to_string(j) + " (n=" + std::to_string(n) + ")";
    // Constants are measured with verify_qi; these are only placeholders.
    f.C = from_int(n + 1);
    f.D = from_int(n * n * n + n);
    f.apply = [n, j](const Point& p) -> std::optional<Point> {
        if (p.size() != 1)
            return std::nullopt;
        std::int64_t x = p[0];
        if (!is_square(x))
            return Point{x};
        if (x >= n * n)
            return Point{x + j};
        return Point{-n * x - j};
    };
    return f;
}

// ---------------------------------------------------------------------------

QIReport verify_qi(const QIMap& f, const Window& w, std::int64_t max_C)
{
    if (max_C < 1)
        throw PresentationError("max_C must be positive");
    QIReport rep;
    auto pts = w.points();
    std::vector<Point> img;
    img.reserve(pts.size());
    for (auto& p : pts)
        img.push_back(f(p));

    std::vector<Rational> worst(static_cast<std::size_t>(max_C), Rational(0));
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            ++rep.pairs;
            Rational dx = from_int(w.distance(static_cast<PointId>(a), static_cast<PointId>(b)));
            Rational dy = from_int(f.target->distance(img[a], img[b]));
            if (!rep.violation && (dy > f.C * dx + f.D || dx / f.C - f.D > dy)) {
                rep.declared_ok = false;
                rep.violation = std::make_pair(pts[a], pts[b]);
            }
            for (std::int64_t c = 1; c <= max_C; ++c) {
                Rational cc = from_int(c);
                Rational d1 = dy - cc * dx;
                Rational d2 = dx / cc - dy;
                auto& slot = worst[static_cast<std::size_t>(c - 1)];
                if (d1 > slot)
                    slot = d1;
                if (d2 > slot)
                    slot = d2;
            }
        }
    std::optional<Rational> best;
    for (std::int64_t c = 1; c <= max_C; ++c) {
        const auto& d = worst[static_cast<std::size_t>(c - 1)];
        rep.profile.emplace_back(c, d);
        Rational total = from_int(c) + d;
        if (!best || total < *best) {
            best = total;
            rep.best_C = c;
            rep.best_D = d;
        }
    }
    return rep;
}

UFChain pushforward_fundamental(const QIMap& f, const Window& w_src, const Window& w_tgt)
{
    UFChain out(0, Ring::Int);
    for (auto id : w_src.interior()) {
        auto y = f(w_src.point(id));
        if (!w_tgt.contains(y))
            throw WindowError("image " + format_point(y) + " of " + format_point(w_src.point(id)) +
                              " lies outside the target window");
        out.add({y}, 1);
    }
    return out;
}

Window source_window_for(const QIMap& f, const Window& target, const Point& anchor, std::size_t point_budget)
{
    Rational d0 = from_int(f.target->distance(f(anchor), target.center()));
    Rational radius = f.C * (from_int(target.radius()) + d0 + f.D);
    return Window::build(f.source, anchor, to_int64(ceil_of(radius)), 0, point_budget);
}

// ---------------------------------------------------------------------------

namespace {

struct Token {
    std::optional<Point> origin;  // nullopt: entered through the frontier
};

// Removes directed cycles from a nonnegative integral flow, keeping the divergence.
void cancel_cycles(std::map<std::pair<NodeId, NodeId>, Integer>& flow, std::size_t nodes)
{
    for (;;) {
        std::vector<std::vector<NodeId>> out(nodes);
        for (auto& [e, v] : flow)
            if (v > 0)
                out[e.first].push_back(e.second);
        std::vector<int> color(nodes, 0);
        std::vector<NodeId> parent(nodes, 0);
        std::optional<std::pair<NodeId, NodeId>> back;  // (u, v) closing a cycle at v
        for (NodeId s = 0; s < nodes && !back; ++s) {
            if (color[s])
                continue;
            std::vector<std::pair<NodeId, std::size_t>> stack{{s, 0}};
            color[s] = 1;
            while (!stack.empty() && !back) {
                auto& [u, k] = stack.back();
                if (k == out[u].size()) {
                    color[u] = 2;
                    stack.pop_back();
                    continue;
                }
                NodeId v = out[u][k++];
                if (color[v] == 1) {
                    back = std::make_pair(u, v);
                } else if (color[v] == 0) {
                    color[v] = 1;
                    parent[v] = u;
                    stack.emplace_back(v, 0);
                }
            }
        }
        if (!back)
            return;
        std::vector<std::pair<NodeId, NodeId>> cycle{*back};
        for (NodeId x = back->first; x != back->second; x = parent[x])
            cycle.emplace_back(parent[x], x);
        Integer m = flow[cycle.front()];
        for (auto& e : cycle)
            m = std::min(m, flow[e]);
        for (auto& e : cycle)
            if ((flow[e] -= m) == 0)
                flow.erase(e);
    }
}

}  // namespace

MatchingCertificate extract_bounded_matching(const QIMap& f, const Window& target, const Window& source,
                                             const FlowCertificate& cert)
{
    if (!cert.feasible)
        throw ContractViolation("matching needs a feasible flow");
    if (!cert.integral())
        throw ContractViolation("matching needs an integral flow");
    const std::size_t n = target.size();

    std::map<std::pair<NodeId, NodeId>, Integer> flow;
    for (auto& e : cert.flows) {
        if (e.tail >= n || e.head >= n)
            throw ContractViolation("flow does not live on the target window");
        flow[{e.tail, e.head}] += e.flow.get_num();
    }
    cancel_cycles(flow, n);

    std::vector<std::deque<Token>> pool(n);
    for (auto& x : source.points()) {
        auto y = f(x);
        if (auto id = target.find(y))
            pool[*id].push_back(Token{x});
    }

    // Tokens travel against the flow: each unit on x -> y carries one token from y to x.
    std::vector<std::vector<std::pair<NodeId, std::int64_t>>> sends(n);
    std::vector<std::size_t> pending(n, 0);
    for (auto& [e, v] : flow) {
        sends[e.second].emplace_back(e.first, to_int64(v));
        ++pending[e.first];
    }

    MatchingCertificate out;
    std::vector<std::optional<Token>> kept(n);
    std::set<NodeId> ready;
    for (NodeId v = 0; v < n; ++v)
        if (pending[v] == 0)
            ready.insert(v);
    std::size_t processed = 0;
    while (!ready.empty()) {
        NodeId y = *ready.begin();
        ready.erase(ready.begin());
        ++processed;
        auto& p = pool[y];
        for (auto& [x, k] : sends[y]) {
            for (std::int64_t u = 0; u < k; ++u) {
                if (p.empty()) {
                    if (target.is_interior(y))
                        throw std::logic_error("matching: interior point ran out of tokens");
                    ++out.imports;
                    pool[x].push_back(Token{std::nullopt});
                } else {
                    pool[x].push_back(std::move(p.front()));
                    p.pop_front();
                }
            }
            if (--pending[x] == 0)
                ready.insert(x);
        }
        if (target.is_interior(y)) {
            if (p.size() != 1)
                throw std::logic_error("matching: flow does not balance the preimage counts");
            kept[y] = std::move(p.front());
            p.clear();
        } else {
            for (auto& t : p)
                if (t.origin)
                    ++out.exports;
            p.clear();
        }
    }
    if (processed != n)
        throw std::logic_error("matching: flow still has a cycle");

    out.bijective_on_interior = true;
    for (auto id : target.interior()) {
        const auto& t = kept[id];
        if (!t || !t->origin) {
            out.bijective_on_interior = false;
            continue;
        }
        const Point& y = target.point(id);
        out.pairs.emplace_back(*t->origin, y);
        out.displacement = std::max(out.displacement, f.target->distance(f(*t->origin), y));
    }
    return out;
}

BilipschitzResult bilipschitz_verdict(const QIMap& f, std::int64_t r, const std::vector<WindowSpec>& schedule,
                                      const BilipschitzOptions& opts)
{
    Point anchor = opts.source_anchor ? *opts.source_anchor : f.source->origin();
    auto provider = [&](const Window& w) {
        auto src = source_window_for(f, w, anchor, opts.point_budget);
        std::vector<std::int64_t> count(w.size(), 0);
        for (auto& x : src.points())
            if (auto id = w.find(f(x)))
                ++count[*id];
        UFChain o(0, Ring::Int);
        for (auto id : w.interior())
            o.add({w.point(id)}, from_int(count[id] - 1));
        return o;
    };
    VerdictOptions vo;
    vo.ring = Ring::Int;
    vo.jobs = opts.jobs;
    vo.point_budget = opts.point_budget;

    BilipschitzResult res;
    res.verdict = verdict_from_provider(f.target, provider, r, schedule, vo, opts.promotion);
    if (res.yes() && opts.extract_matching && !res.verdict.entries.empty()) {
        const auto& e = res.verdict.entries.back();
        auto src = source_window_for(f, *e.window, anchor, opts.point_budget);
        res.matching = extract_bounded_matching(f, *e.window, src, *e.certificate);
    }
    return res;
}

// ---------------------------------------------------------------------------

Integer determinant(const Matrix& m)
{
    check_square(m);
    return bareiss(to_integer(m));
}

CyclePattern image_lattice_pattern(const Matrix& m)
{
    check_square(m);
    Integer det = determinant(m);
    if (det == 0)
        throw DomainError("singular matrix has infinite cokernel");
    Integer ad = abs(det);
    auto adj = adjugate(m);
    const std::size_t d = m.size();
    // y lies in M Z^d iff adj(M) y is divisible by det; det Z^d is inside the image.
    std::int64_t p = to_int64(ad);
    std::map<std::vector<std::int64_t>, Rational> table;
    std::vector<std::int64_t> y(d, 0);
    for (;;) {
        bool member = true;
        for (std::size_t i = 0; i < d && member; ++i) {
            Integer s = 0;
            for (std::size_t j = 0; j < d; ++j)
                s += adj[i][j] * Integer(std::to_string(y[j]));
            member = s % ad == 0;
        }
        if (member)
            table[y] = 1;
        std::size_t k = 0;
        while (k < d && ++y[k] == p)
            y[k++] = 0;
        if (k == d)
            break;
    }
    return CyclePattern::periodic(std::vector<std::int64_t>(d, p), std::move(table));
}

GroupHomReport group_hom_report(const Matrix& m, std::int64_t r, const std::vector<std::int64_t>& radii, unsigned jobs)
{
    check_square(m);
    GroupHomReport rep;
    rep.matrix = m;
    Integer det = determinant(m);
    if (det == 0)
        throw DomainError("singular matrix: kernel and cokernel are infinite");
    rep.kernel_size = 1;
    rep.cokernel_size = abs(det);
    rep.predicted_yes = rep.cokernel_size == 1;

    const std::size_t d = m.size();
    auto f = matrix_map(m);
    auto image = image_lattice_pattern(m);
    rep.image_mean = *image.period_average(d);

    auto obstruction = image + CyclePattern::constant(-1);
    BilipschitzOptions opts;
    opts.jobs = jobs;
    opts.promotion = PeriodicPromotion{*obstruction.period(d), [obstruction](const Point& p) {
                                           return obstruction.evaluate(p);
                                       }};
    auto schedule = make_schedule(Point(std::vector<std::int64_t>(d, 0)), radii, r);
    rep.measured = bilipschitz_verdict(f, r, schedule, opts);
    rep.agrees = rep.predicted_yes ? rep.measured.yes() : rep.measured.no();

    auto identity = image + CyclePattern::constant(-Rational(1) / Rational(rep.cokernel_size));
    VerdictOptions vo;
    vo.jobs = jobs;
    auto v = class_verdict(identity, f.target, r, schedule, vo);
    rep.pushforward_identity = v.status == VerdictStatus::Trivial && v.periodic.has_value();
    return rep;
}

// ---------------------------------------------------------------------------

UFChain averaging_map(std::int64_t n, const UFChain& c)
{
    if (n < 1)
        throw PresentationError("averaging needs n >= 1");
    UFChain out(c.degree(), Ring::Rat);
    for (std::int64_t j = 1; j <= n; ++j) {
        auto f = averaging_branch(n, j);
        out += pushforward(f.apply, c);
    }
    out *= Rational(1) / from_int(n);
    return out;
}

AveragingReport averaging_chain_map(std::int64_t n, std::size_t degree, const Window& w, std::size_t samples,
                                    std::uint64_t seed)
{
    if (n < 1)
        throw PresentationError("averaging needs n >= 1");
    if (w.space().lattice_dimension() != std::optional<std::size_t>(1) || w.space().kind() != SpaceKind::Lattice)
        throw PresentationError("averaging acts on windows of Z");
    if (!w.contains(Point{n * n}))
        throw WindowError("window misses n^2 = " + std::to_string(n * n) + "; both branches of f_j must be exercised");

    AveragingReport rep;
    rep.n = n;
    rep.degree = degree;
    rep.bound = 1 + (from_int((std::int64_t{1} << (degree + 1)) - 1) / from_int(n));

    std::mt19937_64 rng(seed);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    auto pts = w.points();
    std::vector<Point> squares, plain;
    for (auto& p : pts)
        (is_square(p[0]) ? squares : plain).push_back(p);

    auto measure = [&](const UFChain& c) {
        if (c.is_zero())
            return;
        auto img = averaging_map(n, c);
        Rational ratio = sup_norm(img) / sup_norm(c);
        ++rep.samples;
        if (ratio > rep.max_ratio)
            rep.max_ratio = ratio;
        if (ratio > rep.bound)
            ++rep.violations;
        if (degree > 0 && boundary(img) != averaging_map(n, boundary(c)))
            rep.chain_map_ok = false;
    };
    auto random_tuple = [&](const std::vector<Point>& from) {
        Simplex s;
        const auto& base = from[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(from.size()) - 1))];
        s.push_back(base);
        for (std::size_t k = 0; k < degree; ++k)
            s.push_back(Point{base[0] + pick(-2, 2)});
        return s;
    };

    for (std::size_t s = 0; s < samples; ++s) {
        UFChain c(degree, Ring::Rat);
        auto terms = pick(1, 12);
        for (std::int64_t t = 0; t < terms; ++t) {
            const auto& from = (!squares.empty() && pick(0, 1)) ? squares : plain;
            c.add(random_tuple(from), from_int(pick(1, 3) * (pick(0, 1) ? 1 : -1)));
        }
        measure(c);
    }

    // All-ones chains on [a, a + n]^(degree+1): around a square a >= n^2 these reach the bound.
    for (auto& a : squares) {
        UFChain c(degree, Ring::Rat);
        std::vector<std::int64_t> idx(degree + 1, 0);
        for (;;) {
            Simplex s;
            for (auto i : idx)
                s.push_back(Point{a[0] + i});
            c.add(s, 1);
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] > n)
                idx[k++] = 0;
            if (k == idx.size())
                break;
        }
        measure(c);
    }

    // phi o i_* = id for chains on Z \ A.
    if (!plain.empty()) {
        for (std::size_t s = 0; s < samples; ++s) {
            UFChain c(degree, Ring::Rat);
            auto terms = pick(1, 12);
            for (std::int64_t t = 0; t < terms; ++t) {
                Simplex sx;
                for (std::size_t k = 0; k <= degree; ++k)
                    sx.push_back(plain[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(plain.size()) - 1))]);
                c.add(sx, make_rational(pick(-5, 5), pick(1, 4)));
            }
            ++rep.identity_checks;
            if (averaging_map(n, c) != c)
                ++rep.identity_failures;
        }
    }
    return rep;
}

}  // namespace ufh
