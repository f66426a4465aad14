#pragma once

// Degree-1 computations on Z: the prism identity relating the unit-step cycle to the
// n-step cycle, and the rewriting of n times the unit-step class as a sum of n cycles
// with pairwise disjoint supports.

#include <cstdint>
#include <memory>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/space.hpp"

namespace ufh {

/// Sum over z in [lo, hi - 1] of (z, z + 1).
UFChain unit_step_cycle(const Window& w);
/// Sum over z = shift (mod n), z and z + n in the window, of (z, z + n).
UFChain step_cycle(const Window& w, std::int64_t n, std::int64_t shift = 0);

struct PrismWitness {
    std::int64_t n = 1;
    std::int64_t shift = 0;
    std::shared_ptr<const Window> window;
    /// Sum over blocks z = shift (mod n) of sum_j (z+j, z+j+1, z+n) - (z+n, z+n, z+n).
    UFChain prism{2, Ring::Int};
    /// unit_step_cycle - step_cycle(n, shift), restricted to interior tuples.
    UFChain target{1, Ring::Int};
    /// boundary(prism) restricted to interior tuples.
    UFChain boundary_on_interior{1, Ring::Int};
    bool verified = false;
};

/// Throws WindowError unless the window (of Z) has length >= 3n and margin >= n.
PrismWitness prism_certificate(std::int64_t n, const Window& w, std::int64_t shift = 0);

struct DisjointRewrite {
    std::int64_t n = 1;
    std::vector<UFChain> components;  // c_0, ..., c_{n-1}
    UFChain cycle{1, Ring::Int};      // their sum
    Rational norm;
    bool disjoint_supports = false;
    bool cycles_on_interior = false;
    std::vector<PrismWitness> witnesses;  // one translated prism per k: unit step ~ c_k
    /// n * unit step - sum c_k equals the boundary of the summed prisms on the interior.
    bool homologous_to_multiple = false;
};

DisjointRewrite rewrite_disjoint(std::int64_t n, const Window& w);

}  // namespace ufh
