#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bfslab/fft.hpp"

namespace bfslab {

using cdouble = std::complex<double>;

/// Uniform periodic grid on [-L, L)^dim with N points per axis, N a power of
/// two. Sample points sit at x_i = (i - N/2) * h, h = 2L/N, so each point is
/// the center of a cell of measure h^dim and 0 is always a grid point.
///
/// The dual grid carries the DFT frequencies: spacing pi/L, Nyquist pi*N/(2L).
/// It is again a Grid (half_width = pi*N/(2L)), and dual() is an involution.
/// Frequency-domain functions store samples in ascending frequency order,
/// i.e. sample m corresponds to xi = (m - N/2) * pi/L.
class Grid {
public:
    Grid(int dim, int points_per_axis, double half_width)
        : dim_(dim), n_(points_per_axis), half_width_(half_width) {
        if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
        if (n_ < 4 || !detail::is_pow2(static_cast<std::size_t>(n_)))
            throw std::invalid_argument("Grid: points_per_axis must be a power of two >= 4");
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw std::invalid_argument("Grid: half_width must be positive and finite");
    }

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return 2.0 * half_width_ / n_; }
    double cell_measure() const { return dim_ == 1 ? spacing() : spacing() * spacing(); }
    double total_measure() const {
        const double side = 2.0 * half_width_;
        return dim_ == 1 ? side : side * side;
    }
    std::size_t size() const {
        const auto n = static_cast<std::size_t>(n_);
        return dim_ == 1 ? n : n * n;
    }

    /// Coordinate of index i along one axis.
    double coord(int i) const { return (i - n_ / 2) * spacing(); }

    std::size_t ravel(int i0, int i1 = 0) const {
        return static_cast<std::size_t>(i0) * (dim_ == 2 ? static_cast<std::size_t>(n_) : 1) +
               static_cast<std::size_t>(dim_ == 2 ? i1 : 0);
    }
    std::array<int, 2> unravel(std::size_t idx) const {
        if (dim_ == 1) return {static_cast<int>(idx), 0};
        return {static_cast<int>(idx / static_cast<std::size_t>(n_)),
                static_cast<int>(idx % static_cast<std::size_t>(n_))};
    }
    std::array<double, 2> point(std::size_t idx) const {
        const auto ij = unravel(idx);
        return {coord(ij[0]), dim_ == 2 ? coord(ij[1]) : 0.0};
    }

    int wrap(int i) const {
        int r = i % n_;
        return r < 0 ? r + n_ : r;
    }

    /// Frequency grid of this grid (and vice versa).
    Grid dual() const {
        return Grid(dim_, n_, std::numbers::pi * n_ / (2.0 * half_width_));
    }
    double nyquist() const { return std::numbers::pi * n_ / (2.0 * half_width_); }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_width_ == b.half_width_;
    }
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

    std::string str() const {
        std::ostringstream os;
        os << "Grid(dim=" << dim_ << ", N=" << n_ << ", L=" << half_width_ << ")";
        return os.str();
    }

private:
    int dim_;
    int n_;
    double half_width_;
};

/// Complex samples on a Grid, row-major over axes. Immutable by convention:
/// operations return new values. Construction rejects non-finite samples.
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<cdouble> samples)
        : grid_(grid), s_(std::move(samples)) {
        if (s_.size() != grid_.size())
            throw std::invalid_argument("GridFunction: sample count does not match grid size");
        for (std::size_t i = 0; i < s_.size(); ++i) {
            if (!std::isfinite(s_[i].real()) || !std::isfinite(s_[i].imag())) {
                const auto p = grid_.point(i);
                std::ostringstream os;
                os << "GridFunction: non-finite sample at x = (" << p[0];
                if (grid_.dim() == 2) os << ", " << p[1];
                os << ")";
                throw std::invalid_argument(os.str());
            }
        }
    }

    static GridFunction zero(const Grid& g) {
        return GridFunction(g, std::vector<cdouble>(g.size(), cdouble{0.0, 0.0}));
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return s_.size(); }
    const std::vector<cdouble>& samples() const { return s_; }
    const cdouble& operator[](std::size_t i) const { return s_[i]; }

    /// Builder access for operator implementations; keeps the checked
    /// constructor as the only public mutation path.
    static GridFunction unchecked(Grid grid, std::vector<cdouble> samples) {
        GridFunction f(std::move(grid));
        f.s_ = std::move(samples);
        return f;
    }

private:
    explicit GridFunction(Grid grid) : grid_(grid) {}
    Grid grid_;
    std::vector<cdouble> s_;
};

/// Sample a pointwise closure at the grid points. The closure takes
/// (double) in 1D, (double, double) in 2D, or (std::array<double,2>) in
/// either dimension, and returns double or cdouble.
template <class Fn>
GridFunction sample(const Grid& g, Fn&& fn) {
    std::vector<cdouble> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto p = g.point(i);
        cdouble v;
        if constexpr (std::is_invocable_v<Fn, double, double>) {
            v = cdouble(fn(p[0], p[1]));
        } else if constexpr (std::is_invocable_v<Fn, double>) {
            v = cdouble(fn(p[0]));
        } else {
            v = cdouble(fn(p));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "sample: closure returned non-finite value at x = (" << p[0];
            if (g.dim() == 2) os << ", " << p[1];
            os << ")";
            throw std::invalid_argument(os.str());
        }
        s[i] = v;
    }
    return GridFunction(g, std::move(s));
}

/// Midpoint quadrature: h^dim * sum of samples (componentwise for complex).
inline cdouble integrate_complex(const GridFunction& f) {
    cdouble acc{0.0, 0.0};
    for (const auto& v : f.samples()) acc += v;
    return acc * f.grid().cell_measure();
}

/// Real-part quadrature, the working form for real-valued data.
inline double integrate(const GridFunction& f) {
    double acc = 0.0;
    for (const auto& v : f.samples()) acc += v.real();
    return acc * f.grid().cell_measure();
}

namespace detail {

/// Shared core of the centered transforms. With points x_i = (i - N/2) h and
/// frequencies xi_m = (m - N/2) dxi, h*dxi = 2*pi/N, the centered DFT factors
/// as  F_m = c_N (-1)^m DFT[(-1)^i f_i]_m  per axis, c_N = (-1)^{N/2}.
inline std::vector<cdouble> centered_transform(const GridFunction& f, int sign, double scale) {
    const Grid& g = f.grid();
    const int n = g.points_per_axis();
    std::vector<cdouble> a = f.samples();
    const double cn = (n / 2) % 2 == 0 ? 1.0 : -1.0;
    const double c = scale * (g.dim() == 1 ? cn : cn * cn);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ij = g.unravel(i);
        if ((ij[0] + ij[1]) & 1) a[i] = -a[i];
    }
    fft_axes(a, g.dim(), static_cast<std::size_t>(n), sign);
    for (std::size_t m = 0; m < a.size(); ++m) {
        const auto ij = g.unravel(m);
        const double ph = ((ij[0] + ij[1]) & 1) ? -c : c;
        a[m] *= ph;
    }
    return a;
}

}  // namespace detail

/// Fourier transform with the (2*pi)^{-n/2} convention, approximating
/// (2*pi)^{-n/2} integral of f(x) e^{-i x.xi} dx by the midpoint rule.
/// Returns samples on the dual (frequency) grid in ascending-frequency order.
inline GridFunction fft_forward(const GridFunction& f) {
    const Grid& g = f.grid();
    const double scale =
        std::pow(2.0 * std::numbers::pi, -0.5 * g.dim()) * g.cell_measure();
    auto a = detail::centered_transform(f, -1, scale);
    return GridFunction::unchecked(g.dual(), std::move(a));
}

/// Inverse transform; fft_inverse(fft_forward(f)) == f to machine precision.
inline GridFunction fft_inverse(const GridFunction& F) {
    const Grid& g = F.grid();
    const double scale =
        std::pow(2.0 * std::numbers::pi, -0.5 * g.dim()) * g.cell_measure();
    auto a = detail::centered_transform(F, +1, scale);
    return GridFunction::unchecked(g.dual(), std::move(a));
}

/// l2 norm of the sample vector weighted by the cell measure.
inline double l2_norm(const GridFunction& f) {
    double acc = 0.0;
    for (const auto& v : f.samples()) acc += std::norm(v);
    return std::sqrt(acc * f.grid().cell_measure());
}

}  // namespace bfslab
