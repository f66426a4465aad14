#pragma once

// Shared bits for the test binaries: a seeded generator and a few independent oracles
// that deliberately avoid the library's own code paths.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "ufh/rational.hpp"

namespace testing_support {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [lo, hi]; modulo bias is irrelevant at these ranges.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi)
    {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(gen_() % span);
    }

    bool coin() { return (gen_() & 1u) != 0; }

private:
    std::mt19937_64 gen_;
};

/// Reduced words of length <= n in the free group of the given rank, by breadth-first
/// extension (letters +-1..+-rank, never followed by the inverse letter).
inline std::set<std::vector<std::int64_t>> free_group_ball(int rank, int n)
{
    std::set<std::vector<std::int64_t>> all{{}};
    std::vector<std::vector<std::int64_t>> layer{{}};
    for (int len = 0; len < n; ++len) {
        std::vector<std::vector<std::int64_t>> next;
        for (auto& w : layer)
            for (int a = -rank; a <= rank; ++a) {
                if (a == 0 || (!w.empty() && w.back() == -a))
                    continue;
                auto v = w;
                v.push_back(a);
                next.push_back(v);
            }
        for (auto& w : next)
            all.insert(w);
        layer = std::move(next);
    }
    return all;
}

inline ufh::Rational q(std::int64_t num, std::int64_t den = 1) { return ufh::make_rational(num, den); }

}  // namespace testing_support
