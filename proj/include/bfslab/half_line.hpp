#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bfslab {

/// Geometric partition of (0, T]: boundaries 0 = b_0 < b_1 < ... < b_M = T
/// with b_j = T * r^{M-j}, so the first cell is `first_cell` wide and cells
/// grow geometrically. Resolves both t -> 0 and the exponential tails at
/// large t with a fixed cell count.
class TimeGrid {
public:
    static TimeGrid geometric(double T, int cells, double first_cell = 1e-3) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
        if (cells < 2) throw std::invalid_argument("TimeGrid: need at least 2 cells");
        if (!(first_cell > 0.0) || first_cell >= T)
            throw std::invalid_argument("TimeGrid: first_cell must lie in (0, T)");
        TimeGrid tg;
        tg.b_.resize(static_cast<std::size_t>(cells) + 1);
        const double r = std::pow(first_cell / T, 1.0 / (cells - 1));
        tg.b_[0] = 0.0;
        for (int j = 1; j <= cells; ++j) tg.b_[static_cast<std::size_t>(j)] = T * std::pow(r, cells - j);
        tg.b_[1] = first_cell;
        tg.b_[static_cast<std::size_t>(cells)] = T;
        return tg;
    }

    int cells() const { return static_cast<int>(b_.size()) - 1; }
    double total() const { return b_.back(); }
    double boundary(int j) const { return b_[static_cast<std::size_t>(j)]; }
    double width(int j) const { return b_[static_cast<std::size_t>(j) + 1] - b_[static_cast<std::size_t>(j)]; }
    double midpoint(int j) const { return 0.5 * (b_[static_cast<std::size_t>(j)] + b_[static_cast<std::size_t>(j) + 1]); }
    double right(int j) const { return b_[static_cast<std::size_t>(j) + 1]; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.b_ == b.b_; }
    friend bool operator!=(const TimeGrid& a, const TimeGrid& b) { return !(a == b); }

private:
    std::vector<double> b_;
};

/// Step function on (0, T]: constant value per cell, evaluated at midpoints.
struct HalfLineFunction {
    TimeGrid tg;
    std::vector<double> values;

    HalfLineFunction(TimeGrid grid, std::vector<double> v) : tg(std::move(grid)), values(std::move(v)) {
        if (values.size() != static_cast<std::size_t>(tg.cells()))
            throw std::invalid_argument("HalfLineFunction: value count must match cell count");
    }

    double integral() const {
        double acc = 0.0;
        for (int j = 0; j < tg.cells(); ++j) acc += values[static_cast<std::size_t>(j)] * tg.width(j);
        return acc;
    }
};

namespace detail {

inline void require_nonneg(const HalfLineFunction& f, const char* who) {
    for (double v : f.values)
        if (!(v >= 0.0)) throw std::invalid_argument(std::string(who) + ": values must be non-negative");
}

/// Prefix integrals F_j = integral over (0, b_j).
inline std::vector<double> prefix_integrals(const HalfLineFunction& f) {
    std::vector<double> P(static_cast<std::size_t>(f.tg.cells()) + 1, 0.0);
    for (int j = 0; j < f.tg.cells(); ++j)
        P[static_cast<std::size_t>(j) + 1] = P[static_cast<std::size_t>(j)] + f.values[static_cast<std::size_t>(j)] * f.tg.width(j);
    return P;
}

}  // namespace detail

/// Mf at the midpoint of the given cell: brute-force maximum of the averages
/// (b-a)^{-1} integral_a^b f over all boundary pairs a < t < b. O(cells^2)
/// per point; the correctness oracle this module is built around.
inline double hl_maximal_at(const HalfLineFunction& f, const std::vector<double>& prefix, int cell) {
    const TimeGrid& tg = f.tg;
    const int M = tg.cells();
    if (cell < 0 || cell >= M) throw std::invalid_argument("hl_maximal_at: cell out of range");
    double best = 0.0;
    for (int p = 0; p <= cell; ++p) {
        const double bp = tg.boundary(p);
        const double Fp = prefix[static_cast<std::size_t>(p)];
        for (int qq = cell + 1; qq <= M; ++qq) {
            const double avg = (prefix[static_cast<std::size_t>(qq)] - Fp) / (tg.boundary(qq) - bp);
            best = std::max(best, avg);
        }
    }
    return best;
}

inline double hl_maximal_at(const HalfLineFunction& f, int cell) {
    detail::require_nonneg(f, "hl_maximal_at");
    const auto prefix = detail::prefix_integrals(f);
    return hl_maximal_at(f, prefix, cell);
}

/// Full maximal function on the same grid.
inline HalfLineFunction hl_maximal_halfline(const HalfLineFunction& f) {
    detail::require_nonneg(f, "hl_maximal_halfline");
    const auto prefix = detail::prefix_integrals(f);
    std::vector<double> out(static_cast<std::size_t>(f.tg.cells()));
    for (int j = 0; j < f.tg.cells(); ++j) out[static_cast<std::size_t>(j)] = hl_maximal_at(f, prefix, j);
    return HalfLineFunction(f.tg, std::move(out));
}

/// integral_0^t a e^{-a(t-s)} f(s) ds for t at the midpoint of `cell`,
/// integrated exactly per cell against the step f.
inline double exp_kernel_integral(double a, const HalfLineFunction& f, int cell) {
    if (!(a > 0.0)) throw std::invalid_argument("exp_kernel_integral: a must be positive");
    const TimeGrid& tg = f.tg;
    const double t = tg.midpoint(cell);
    double acc = 0.0;
    for (int c = 0; c < cell; ++c) {
        const double w = std::exp(-a * (t - tg.right(c))) - std::exp(-a * (t - tg.boundary(c)));
        acc += f.values[static_cast<std::size_t>(c)] * w;
    }
    acc += f.values[static_cast<std::size_t>(cell)] * (1.0 - std::exp(-a * (t - tg.boundary(cell))));
    return acc;
}

/// Exponential-kernel maximal bound: returns (lhs, rhs) with
/// lhs = integral_0^t a e^{-a(t-s)} f(s) ds and rhs = (1 + e^{-1}) Mf(t).
inline std::pair<double, double> exp_kernel_bound_check(double a, const HalfLineFunction& f,
                                                        int cell) {
    detail::require_nonneg(f, "exp_kernel_bound_check");
    const double lhs = exp_kernel_integral(a, f, cell);
    const double rhs = (1.0 + std::exp(-1.0)) * hl_maximal_at(f, cell);
    return {lhs, rhs};
}

/// integral_s^T lambda e^{-lambda(t-s)} g(t) dt for s at the midpoint of
/// `cell`, exact against the step g.
inline double exp_tail_integral(double lambda, const HalfLineFunction& g, int cell) {
    if (!(lambda > 0.0)) throw std::invalid_argument("exp_tail_integral: lambda must be positive");
    const TimeGrid& tg = g.tg;
    const double s = tg.midpoint(cell);
    double acc = g.values[static_cast<std::size_t>(cell)] * (1.0 - std::exp(-lambda * (tg.right(cell) - s)));
    for (int c = cell + 1; c < tg.cells(); ++c) {
        const double w = std::exp(-lambda * (tg.boundary(c) - s)) - std::exp(-lambda * (tg.right(c) - s));
        acc += g.values[static_cast<std::size_t>(c)] * w;
    }
    return acc;
}

}  // namespace bfslab
