#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bfslab/grid.hpp"

namespace bfslab {

/// Deterministic RNG: mt19937_64 with explicit bit-to-double mapping and a
/// hand-rolled Box-Muller, so streams do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // in (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64-style mixer for deriving independent per-case seeds; cases can
/// then run in any order (or in parallel) with identical results.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Real Gaussian field with spectrum supported on lo <= |xi| <= hi, shaped by
/// |xi|^slope. Drawing i.i.d. complex normals and taking the real part of the
/// inverse transform keeps the spectrum inside the band.
inline GridFunction band_limited_field(const Grid& g, double lo, double hi, double slope,
                                       Rng& rng) {
    const Grid d = g.dual();
    std::vector<cdouble> F(g.size(), cdouble{0.0, 0.0});
    for (std::size_t m = 0; m < g.size(); ++m) {
        const auto xi = d.point(m);
        const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
        if (r < lo || r > hi) continue;
        const double amp = std::pow(r, slope);
        F[m] = cdouble(rng.normal(), rng.normal()) * amp;
    }
    GridFunction spec(d, std::move(F));
    auto f = fft_inverse(spec);
    std::vector<cdouble> re(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) re[i] = cdouble(f[i].real(), 0.0);
    return GridFunction(g, std::move(re));
}

/// Field whose spectrum sits where only the dyadic block j0 (and its two
/// neighbours) can see it: |xi| in [2^{j0+1}, 2^{j0+2}].
inline GridFunction single_band_field(const Grid& g, int j0, double slope, Rng& rng) {
    return band_limited_field(g, std::ldexp(1.0, j0 + 1), std::ldexp(1.0, j0 + 2), slope, rng);
}

/// Self-similar single-band family: the same coefficient draws placed on the
/// shell of j_lo and then at index-doubled frequencies for each higher band,
/// so member b is member 0 dilated by 2^b on the torus. The right probe for
/// scale-uniformity claims: any systematic trend of a ratio across the family
/// is grid or truncation bias, not content noise.
inline std::vector<GridFunction> dilated_band_family(const Grid& g, int j_lo, int bands,
                                                     Rng& rng) {
    const Grid d = g.dual();
    const int n = g.points_per_axis();
    if (g.dim() != 1)
        throw std::invalid_argument("dilated_band_family: implemented for dim = 1");
    const double lo = std::ldexp(1.0, j_lo + 1);
    const double hi = std::ldexp(1.0, j_lo + 2);
    std::vector<std::pair<int, cdouble>> base;  // (signed index, coefficient)
    for (int m = 0; m < n; ++m) {
        const double r = std::abs(d.point(static_cast<std::size_t>(m))[0]);
        if (r < lo || r > hi) continue;
        base.emplace_back(m - n / 2, cdouble(rng.normal(), rng.normal()));
    }
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
        std::vector<cdouble> F(g.size(), cdouble{0.0, 0.0});
        for (const auto& [k, coeff] : base) {
            const long kk = static_cast<long>(k) << b;
            if (std::abs(kk) >= n / 2) throw std::invalid_argument(
                "dilated_band_family: band exceeds the Nyquist frequency");
            F[static_cast<std::size_t>(kk + n / 2)] = coeff;
        }
        auto fc = fft_inverse(GridFunction(d, std::move(F)));
        std::vector<cdouble> re(fc.size());
        for (std::size_t i = 0; i < fc.size(); ++i) re[i] = cdouble(fc[i].real(), 0.0);
        out.push_back(GridFunction(g, std::move(re)));
    }
    return out;
}

inline GridFunction abs_field(const GridFunction& f) {
    std::vector<cdouble> s(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) s[i] = std::abs(f[i]);
    return GridFunction(f.grid(), std::move(s));
}

/// Centered Gaussian bump; sigma <= L/8 keeps the mass well inside the box.
inline GridFunction smooth_bump(const Grid& g, double sigma) {
    return sample(g, [sigma](std::array<double, 2> x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma * sigma));
    });
}

/// Non-negative step values for half-line experiments.
inline std::vector<double> random_step_values(int cells, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(cells));
    for (auto& x : v) x = std::abs(rng.normal());
    return v;
}

}  // namespace bfslab
