#pragma once

#include <random>
#include <vector>

#include "bfslab/grid.hpp"

namespace testutil {

inline bfslab::GridFunction random_function(const bfslab::Grid& g, unsigned seed,
                                            bool complex_valued = true) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<bfslab::cdouble> s(g.size());
    for (auto& v : s) v = bfslab::cdouble(u(rng), complex_valued ? u(rng) : 0.0);
    return bfslab::GridFunction(g, std::move(s));
}

/// Circular shift by whole cells along each axis.
inline bfslab::GridFunction shift_cells(const bfslab::GridFunction& f, int s0, int s1 = 0) {
    const bfslab::Grid& g = f.grid();
    std::vector<bfslab::cdouble> out(f.size());
    const int n = g.points_per_axis();
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(g.wrap(i - s0))];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out[g.ravel(i, j)] = f[g.ravel(g.wrap(i - s0), g.wrap(j - s1))];
    }
    return bfslab::GridFunction(g, std::move(out));
}

inline double max_abs_diff(const bfslab::GridFunction& a, const bfslab::GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
