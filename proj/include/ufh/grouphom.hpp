#pragma once

// Uniformly finite chains on Z^d against group-homology chains with bounded coefficients:
// a term c_(x_0, ..., x_n) becomes the basis tuple (e, x_1 - x_0, ..., x_n - x_0) with the
// coefficient function g -> c_{g^-1 (e, t)} evaluated at g = -x_0.

#include <cstdint>
#include <map>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/space.hpp"

namespace ufh {

using CoefficientFunction = std::map<Point, Rational>;  // finitely supported, absent = 0

class TwistedChain {
public:
    explicit TwistedChain(std::size_t degree = 0) : degree_(degree) {}

    std::size_t degree() const { return degree_; }
    /// Adds v at g of the function attached to t (t has `degree` entries).
    void add(const std::vector<Point>& t, const Point& g, const Rational& v);
    const std::map<std::vector<Point>, CoefficientFunction>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// sup over t of the sup of |phi_t|.
    Rational sup_norm() const;

    friend bool operator==(const TwistedChain&, const TwistedChain&) = default;

private:
    std::size_t degree_;
    std::map<std::vector<Point>, CoefficientFunction> terms_;
};

/// Throws PrecisionError when the chain leaves the window or its propagation exceeds the
/// margin, and PresentationError off Z^d.
TwistedChain rho_forward(const UFChain& c, const Window& w);
UFChain rho_inverse(const TwistedChain& tc, Ring ring = Ring::Rat);

/// Standard-resolution boundary: face 0 re-bases (t_1, ..., t_n) at t_1 and shifts phi by
/// t_1, the other faces drop t_i.
TwistedChain twisted_boundary(const TwistedChain& tc);

/// Module action (g . phi)(h) = phi(h - g) on every coefficient function.
TwistedChain act(const Point& g, const TwistedChain& tc);

/// Translates every point of every tuple by v.
UFChain translate(const UFChain& c, const Point& v);

struct RhoReport {
    std::size_t samples = 0;
    std::size_t roundtrip_failures = 0;
    std::size_t isometry_failures = 0;
    std::size_t chain_map_failures = 0;
    std::size_t action_failures = 0;
    bool ok() const
    {
        return roundtrip_failures == 0 && isometry_failures == 0 && chain_map_failures == 0 && action_failures == 0;
    }
};

/// Random chains of the given degree (propagation <= margin) on the window: checks the
/// inverse, the norm equality, boundary commutation (degree >= 1) and the translation action.
RhoReport rho_roundtrip_check(const Window& w, std::size_t degree, std::size_t samples, std::uint64_t seed);

/// The same checks on one given chain.
RhoReport rho_check_chain(const UFChain& c, const Window& w);

}  // namespace ufh
