#pragma once

// Uniformly finite chains restricted to finite support: sparse maps from (n+1)-tuples
// of points to exact coefficients, with the simplicial boundary, the sup-norm and
// pushforwards along point maps.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ufh/rational.hpp"
#include "ufh/space.hpp"

namespace ufh {

enum class Ring { Int, Rat };

std::string to_string(Ring ring);

using Simplex = std::vector<Point>;

class UFChain {
public:
    explicit UFChain(std::size_t degree = 0, Ring ring = Ring::Rat) : degree_(degree), ring_(ring) {}

    std::size_t degree() const { return degree_; }
    Ring ring() const { return ring_; }

    /// Declared uniform-finiteness constants; validate() checks the terms against them.
    const std::optional<std::int64_t>& declared_propagation() const { return propagation_; }
    const std::optional<Rational>& declared_norm_bound() const { return norm_bound_; }
    void declare_bounds(std::optional<std::int64_t> propagation, std::optional<Rational> norm_bound);

    /// Accumulates `coeff` onto `simplex`; zero coefficients are never stored.
    void add(const Simplex& simplex, const Rational& coeff);
    Rational coefficient(const Simplex& simplex) const;

    const std::map<Simplex, Rational>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    UFChain& operator+=(const UFChain& other);
    UFChain& operator-=(const UFChain& other);
    UFChain& operator*=(const Rational& scalar);

    friend UFChain operator+(UFChain a, const UFChain& b) { return a += b; }
    friend UFChain operator-(UFChain a, const UFChain& b) { return a -= b; }
    friend UFChain operator*(const Rational& s, UFChain a) { return a *= s; }
    friend bool operator==(const UFChain& a, const UFChain& b)
    {
        return a.degree_ == b.degree_ && a.terms_ == b.terms_;
    }

private:
    void check_compatible(const UFChain& other) const;

    std::size_t degree_;
    Ring ring_;
    std::map<Simplex, Rational> terms_;
    std::optional<std::int64_t> propagation_;
    std::optional<Rational> norm_bound_;
};

/// Alternating face sum. Throws ContractViolation on degree-0 input.
UFChain boundary(const UFChain& c);

/// Max |coefficient|; 0 for the zero chain.
Rational sup_norm(const UFChain& c);

std::int64_t diameter(const Space& space, const Simplex& s);
/// Largest tuple diameter among stored terms.
std::int64_t observed_propagation(const Space& space, const UFChain& c);

/// Possibly partial point map; nullopt marks points outside the domain.
using PointMap = std::function<std::optional<Point>(const Point&)>;

/// Image chain sum c_x (f(x_0), ..., f(x_n)); colliding image tuples accumulate.
/// Throws DomainError when f is undefined on a support point.
/// With QI constants (C, D) and a declared propagation R the result declares ceil(C R + D).
UFChain pushforward(const PointMap& f, const UFChain& c,
                    std::optional<std::pair<Rational, Rational>> qi_constants = std::nullopt);

/// Terms whose points all satisfy `keep`.
UFChain restrict_to(const UFChain& c, const std::function<bool(const Point&)>& keep);

/// Terms whose points all lie in the interior of `w`.
UFChain interior_part(const UFChain& c, const Window& w);

struct ChainReport {
    bool support_in_window = true;
    bool propagation_ok = true;
    bool norm_ok = true;
    bool integral_ok = true;
    bool cycle_on_interior = true;
    std::int64_t observed_propagation = 0;
    Rational observed_norm;
    std::optional<Simplex> propagation_witness;
    std::optional<Simplex> norm_witness;
    std::optional<Simplex> support_witness;

    bool valid() const { return support_in_window && propagation_ok && norm_ok && integral_ok; }
};

/// Checks both uniform-finiteness bounds, window support, ring integrality and whether
/// the boundary vanishes on interior tuples (degree 0 chains are always cycles).
ChainReport validate(const UFChain& c, const Window& w);

/// Generator of a 1-periodic family of simplices in Z:
/// sum over z = offset (mod period) of coeff * (z + shape[0], ..., z + shape[n]).
struct PeriodicBlock {
    std::int64_t period = 1;
    std::int64_t offset = 0;
    Rational coeff = 1;
    std::vector<std::int64_t> shape;

    std::size_t degree() const { return shape.empty() ? 0 : shape.size() - 1; }
};

/// Terms of the block whose points all lie in the window (a window of Z or a subset of Z).
UFChain materialize(const PeriodicBlock& block, const Window& w, Ring ring = Ring::Rat);

/// Chain literal text:
///   # comment
///   degree 1                                  (optional, required only for empty chains)
///   3/2 : (0, 1)                               explicit term; points use the point literal
///   periodic period=2 offset=0 coeff=1 degree=1 shape=(0,1)
/// Periodic blocks are materialized on `w`, which must then be given.
UFChain parse_chain_literal(std::string_view text, const Window* w = nullptr, Ring ring = Ring::Rat);
std::string format_chain_literal(const UFChain& c);
std::string format_simplex(const Simplex& s);

}  // namespace ufh
