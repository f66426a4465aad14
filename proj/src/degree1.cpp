#include "ufh/degree1.hpp"

#include <set>

#include "ufh/errors.hpp"

namespace ufh {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

void require_line(const Window& w)
{
    if (w.space().kind() != SpaceKind::Lattice || w.space().lattice_dimension() != std::optional<std::size_t>(1))
        throw PresentationError("degree-1 computations here live on windows of Z");
}

void require_size(std::int64_t n, const Window& w)
{
    if (n < 1)
        throw PresentationError("n must be positive");
    if (2 * w.radius() + 1 < 3 * n)
        throw WindowError("window of length " + std::to_string(2 * w.radius() + 1) + " is shorter than 3n = " +
                          std::to_string(3 * n));
    if (w.margin() < n)
        throw WindowError("margin " + std::to_string(w.margin()) + " is below n = " + std::to_string(n));
}

std::int64_t lo(const Window& w) { return w.center()[0] - w.radius(); }
std::int64_t hi(const Window& w) { return w.center()[0] + w.radius(); }

}  // namespace

UFChain unit_step_cycle(const Window& w)
{
    require_line(w);
    UFChain c(1, Ring::Int);
    for (auto z = lo(w); z < hi(w); ++z)
        c.add({Point{z}, Point{z + 1}}, 1);
    c.declare_bounds(1, Rational(1));
    return c;
}

UFChain step_cycle(const Window& w, std::int64_t n, std::int64_t shift)
{
    require_line(w);
    if (n < 1)
        throw PresentationError("n must be positive");
    UFChain c(1, Ring::Int);
    auto z = lo(w) + floor_mod(shift - lo(w), n);
    for (; z + n <= hi(w); z += n)
        c.add({Point{z}, Point{z + n}}, 1);
    c.declare_bounds(n, Rational(1));
    return c;
}

PrismWitness prism_certificate(std::int64_t n, const Window& w, std::int64_t shift)
{
    require_line(w);
    require_size(n, w);
    PrismWitness pw;
    pw.n = n;
    pw.shift = shift;
    pw.window = std::make_shared<const Window>(w);

    auto z = lo(w) + floor_mod(shift - lo(w), n);
    for (; z + n <= hi(w); z += n) {
        for (std::int64_t j = 0; j < n; ++j)
            pw.prism.add({Point{z + j}, Point{z + j + 1}, Point{z + n}}, 1);
        pw.prism.add({Point{z + n}, Point{z + n}, Point{z + n}}, -1);
    }
    pw.prism.declare_bounds(n, Rational(1));

    pw.target = interior_part(unit_step_cycle(w) - step_cycle(w, n, shift), w);
    pw.boundary_on_interior = interior_part(boundary(pw.prism), w);
    pw.verified = pw.target == pw.boundary_on_interior;
    return pw;
}

DisjointRewrite rewrite_disjoint(std::int64_t n, const Window& w)
{
    require_line(w);
    require_size(n, w);
    DisjointRewrite out;
    out.n = n;
    std::set<Simplex> seen;
    out.disjoint_supports = true;
    out.cycles_on_interior = true;
    UFChain prisms(2, Ring::Int);
    for (std::int64_t k = 0; k < n; ++k) {
        auto c = step_cycle(w, n, k);
        for (auto& [s, v] : c.terms())
            if (!seen.insert(s).second)
                out.disjoint_supports = false;
        if (!interior_part(boundary(c), w).is_zero())
            out.cycles_on_interior = false;
        out.cycle += c;
        out.components.push_back(std::move(c));
        auto pw = prism_certificate(n, w, k);
        prisms += pw.prism;
        out.witnesses.push_back(std::move(pw));
    }
    out.norm = sup_norm(out.cycle);
    UFChain lhs = unit_step_cycle(w);
    lhs *= Rational(n);
    lhs -= out.cycle;
    out.homologous_to_multiple = interior_part(lhs, w) == interior_part(boundary(prisms), w);
    return out;
}

}  // namespace ufh
