#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfslab/grid.hpp"
#include "bfslab/operators.hpp"
#include "bfslab/report.hpp"
#include "bfslab/spaces.hpp"

namespace bfslab {

namespace detail {

inline double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

}  // namespace detail

/// Dyadic frequency cutoffs phi_j(xi) = phi(2^{-j}|xi|) with the sandwich
///   chi_{B(4)\B(2)} <= phi <= chi_{B(8)\B(1)},
/// plus companions Phi_j that vanish on B(2^j) and equal 1 on supp phi_j.
///
/// The radial profile is a C^1 smoothstep: 0 on [0, 5/4], rise on [5/4, 2],
/// 1 on [2, 5], fall on [5, 8] as the dilated complement of the rise, 0
/// beyond. Complementarity under phi(rho) + phi(4 rho) makes the partition
/// sum exactly 2 on the interior of the covered annulus and in [1, 2] at
/// its edges. The gap (1, 5/4) left of supp phi is what lets Phi rise on
/// [1, 5/4] with O(1) width and still equal 1 on supp phi pointwise: the
/// L^1 norms of the kernels F^{-1}[Phi_j e^{-t|.|^2}] then converge under
/// grid refinement.
class LPFamily {
public:
    const Grid& grid() const { return grid_; }
    int j_min() const { return j_min_; }
    int j_max() const { return j_max_; }

    static constexpr double kRiseStart = 1.25;

    static double phi_profile(double rho) {
        if (rho <= kRiseStart || rho >= 8.0) return 0.0;
        if (rho < 2.0) return detail::smoothstep((rho - kRiseStart) / (2.0 - kRiseStart));
        if (rho <= 4.0 * kRiseStart) return 1.0;
        return 1.0 - detail::smoothstep((rho / 4.0 - kRiseStart) / (2.0 - kRiseStart));
    }

    static double Phi_profile(double rho) {
        if (rho <= 1.0) return 0.0;
        if (rho >= kRiseStart) return 1.0;
        return detail::smoothstep((rho - 1.0) / (kRiseStart - 1.0));
    }

    const std::vector<double>& phi(int j) const { return phi_[index(j)]; }
    const std::vector<double>& Phi(int j) const { return Phi_[index(j)]; }

    /// sum_j phi_j at every frequency sample.
    const std::vector<double>& partition_sum() const { return psum_; }

    /// [2^{j_min+1}, 2^{j_max+2}]: where the covering invariant is asserted.
    double annulus_lo() const { return std::ldexp(1.0, j_min_ + 1); }
    double annulus_hi() const { return std::ldexp(1.0, j_max_ + 2); }

    std::size_t index(int j) const {
        if (j < j_min_ || j > j_max_)
            throw std::invalid_argument("LPFamily: block index " + std::to_string(j) +
                                        " outside [" + std::to_string(j_min_) + ", " +
                                        std::to_string(j_max_) + "]");
        return static_cast<std::size_t>(j - j_min_);
    }

    friend LPFamily build_lp_family(const Grid& g, int j_min, int j_max);

private:
    LPFamily(Grid g, int j_min, int j_max) : grid_(g), j_min_(j_min), j_max_(j_max) {}

    Grid grid_;
    int j_min_, j_max_;
    std::vector<std::vector<double>> phi_, Phi_;
    std::vector<double> psum_;
    std::vector<double> sample_radius_;

public:
    const std::vector<double>& sample_radius() const { return sample_radius_; }
};

/// Constructs the family and asserts its pointwise invariants at every
/// frequency sample. The range must be representable: the covering annulus
/// bottom needs two frequency cells below it and the top block must see at
/// least one sample.
inline LPFamily build_lp_family(const Grid& g, int j_min, int j_max) {
    if (j_min >= j_max) throw std::invalid_argument("build_lp_family: need j_min < j_max");
    const Grid d = g.dual();
    const double dxi = d.spacing();
    const double nyq = g.nyquist();
    const int achievable_min = static_cast<int>(std::ceil(std::log2(dxi))) - 1;
    const int achievable_max = static_cast<int>(std::ceil(std::log2(nyq))) - 1;
    if (std::ldexp(1.0, j_min + 1) < dxi || std::ldexp(1.0, j_max) >= nyq) {
        std::ostringstream os;
        os << "build_lp_family: dyadic range [" << j_min << ", " << j_max
           << "] not representable on " << g.str() << "; achievable range is ["
           << achievable_min << ", " << achievable_max << "]";
        throw std::invalid_argument(os.str());
    }

    LPFamily fam(g, j_min, j_max);
    const std::size_t n = g.size();
    fam.sample_radius_.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const auto xi = d.point(m);
        fam.sample_radius_[m] = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1]);
    }

    const int blocks = j_max - j_min + 1;
    fam.phi_.assign(static_cast<std::size_t>(blocks), std::vector<double>(n));
    fam.Phi_.assign(static_cast<std::size_t>(blocks), std::vector<double>(n));
    fam.psum_.assign(n, 0.0);
    for (int j = j_min; j <= j_max; ++j) {
        const double scale = std::ldexp(1.0, -j);
        auto& ph = fam.phi_[static_cast<std::size_t>(j - j_min)];
        auto& Ph = fam.Phi_[static_cast<std::size_t>(j - j_min)];
        for (std::size_t m = 0; m < n; ++m) {
            const double rho = scale * fam.sample_radius_[m];
            ph[m] = LPFamily::phi_profile(rho);
            Ph[m] = LPFamily::Phi_profile(rho);
            fam.psum_[m] += ph[m];
        }
    }

    // construction-time invariant checks
    for (int j = j_min; j <= j_max; ++j) {
        const double scale = std::ldexp(1.0, -j);
        const auto& ph = fam.phi(j);
        const auto& Ph = fam.Phi(j);
        for (std::size_t m = 0; m < n; ++m) {
            const double rho = scale * fam.sample_radius_[m];
            const double lower = (rho > 2.0 && rho < 4.0) ? 1.0 : 0.0;
            const double upper = (rho > 1.0 && rho < 8.0) ? 1.0 : 0.0;
            if (ph[m] < lower || ph[m] > upper)
                throw std::logic_error("LPFamily: sandwich violated at a sample");
            if (ph[m] > 0.0 && Ph[m] != 1.0)
                throw std::logic_error("LPFamily: Phi does not dominate supp phi at a sample");
            if (rho <= 1.0 && Ph[m] != 0.0)
                throw std::logic_error("LPFamily: Phi does not vanish on B(1)");
        }
    }
    for (std::size_t m = 0; m < n; ++m) {
        const double r = fam.sample_radius_[m];
        if (r >= fam.annulus_lo() && r <= fam.annulus_hi()) {
            if (fam.psum_[m] < 1.0 - 1e-12 || fam.psum_[m] > 3.0 + 1e-12)
                throw std::logic_error("LPFamily: covering sum outside [1,3] on the annulus");
        }
    }
    return fam;
}

/// Legality scan as report rows: sandwich, Phi-dominance, covering.
inline ExperimentReport lp_family_legality(const LPFamily& fam) {
    ExperimentReport rep;
    rep.suite = "besov";
    const std::size_t n = fam.grid().size();
    long id = 0;

    long sandwich_bad = 0, dom_bad = 0, cover_bad = 0;
    double cover_min = kInf, cover_max = 0.0;
    for (int j = fam.j_min(); j <= fam.j_max(); ++j) {
        const double scale = std::ldexp(1.0, -j);
        const auto& ph = fam.phi(j);
        const auto& Ph = fam.Phi(j);
        for (std::size_t m = 0; m < n; ++m) {
            const double rho = scale * fam.sample_radius()[m];
            const double lower = (rho > 2.0 && rho < 4.0) ? 1.0 : 0.0;
            const double upper = (rho > 1.0 && rho < 8.0) ? 1.0 : 0.0;
            if (ph[m] < lower || ph[m] > upper) ++sandwich_bad;
            if (ph[m] > 0.0 && Ph[m] != 1.0) ++dom_bad;
        }
    }
    long annulus_samples = 0;
    for (std::size_t m = 0; m < n; ++m) {
        const double r = fam.sample_radius()[m];
        if (r < fam.annulus_lo() || r > fam.annulus_hi()) continue;
        ++annulus_samples;
        cover_min = std::min(cover_min, fam.partition_sum()[m]);
        cover_max = std::max(cover_max, fam.partition_sum()[m]);
        if (fam.partition_sum()[m] < 1.0 - 1e-12 || fam.partition_sum()[m] > 3.0 + 1e-12)
            ++cover_bad;
    }

    CaseRow s;
    s.suite = rep.suite;
    s.case_id = id++;
    s.params = "check=sandwich;samples=" + std::to_string(n);
    s.lhs = static_cast<double>(sandwich_bad);
    s.rhs = 0.0;
    s.ratio = 0.0;
    s.pass = sandwich_bad == 0;
    s.anchor = "lp-sandwich";
    rep.add(s);

    CaseRow dm;
    dm.suite = rep.suite;
    dm.case_id = id++;
    dm.params = "check=phi-dominance";
    dm.lhs = static_cast<double>(dom_bad);
    dm.rhs = 0.0;
    dm.ratio = 0.0;
    dm.pass = dom_bad == 0;
    dm.anchor = "lp-companion-dominance";
    rep.add(dm);

    CaseRow cv;
    cv.suite = rep.suite;
    cv.case_id = id++;
    cv.params = "check=covering;annulus_samples=" + std::to_string(annulus_samples) +
                ";min=" + fmt_real(cover_min) + ";max=" + fmt_real(cover_max);
    cv.lhs = cover_min;
    cv.rhs = cover_max;
    cv.ratio = annulus_samples > 0 ? cover_max / std::max(cover_min, 1e-300) : 0.0;
    cv.pass = cover_bad == 0 && annulus_samples > 0;
    cv.anchor = "lp-covering";
    rep.add(cv);
    return rep;
}

/// F^{-1}[phi_j F f].
inline GridFunction lp_block(const GridFunction& f, const LPFamily& fam, int j) {
    if (f.grid() != fam.grid()) throw std::invalid_argument("lp_block: grid mismatch");
    const auto& ph = fam.phi(j);
    auto F = fft_forward(f);
    std::vector<cdouble> prod(F.size());
    for (std::size_t m = 0; m < F.size(); ++m) prod[m] = ph[m] * F[m];
    return fft_inverse(GridFunction::unchecked(F.grid(), std::move(prod)));
}

struct BesovParams {
    double s = 0.0;
    double r = 1.0;  // in [1, inf]
    SpaceSpec spec;

    BesovParams(double s_, double r_, SpaceSpec spec_) : s(s_), r(r_), spec(spec_) {
        if (!(r >= 1.0)) throw std::invalid_argument("BesovParams: r must satisfy 1 <= r <= inf");
    }
};

struct BesovNormInfo {
    double outside_mass_ratio = 0.0;  // spectral l2 mass outside the covered annulus
    bool warned = false;
    std::vector<double> block_norms;  // ||phi_j(D) f||_X per j
};

/// X-norms of all dyadic blocks from a precomputed spectrum; the workhorse
/// shared by besov_norm and the space-time sweeps. For X = L^2 the block
/// norm is read off the spectrum by Plancherel (the transform is unitary),
/// skipping the inverse transform.
inline std::vector<double> besov_block_norms(const GridFunction& spectrum, const LPFamily& fam,
                                             const SpaceSpec& spec) {
    if (spectrum.grid() != fam.grid().dual())
        throw std::invalid_argument("besov_block_norms: spectrum not on the family's dual grid");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(fam.j_max() - fam.j_min() + 1));
    const bool plancherel = spec.family == SpaceSpec::Family::lebesgue && spec.p == 2.0;
    std::vector<cdouble> prod(spectrum.size());
    for (int j = fam.j_min(); j <= fam.j_max(); ++j) {
        const auto& ph = fam.phi(j);
        if (plancherel) {
            double acc = 0.0;
            for (std::size_t m = 0; m < spectrum.size(); ++m)
                acc += ph[m] * ph[m] * std::norm(spectrum[m]);
            out.push_back(std::sqrt(acc * spectrum.grid().cell_measure()));
            continue;
        }
        for (std::size_t m = 0; m < spectrum.size(); ++m) prod[m] = ph[m] * spectrum[m];
        auto block = fft_inverse(GridFunction::unchecked(spectrum.grid(), prod));
        out.push_back(x_norm(block, spec));
    }
    return out;
}

/// l^r aggregation of 2^{j s} * b_j, max for r = inf.
inline double ell_r_aggregate(const std::vector<double>& block_norms, int j_min, double s,
                              double r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < block_norms.size(); ++k) {
        const int j = j_min + static_cast<int>(k);
        const double term = std::exp2(j * s) * block_norms[k];
        if (r == kInf)
            acc = std::max(acc, term);
        else if (term > 0.0)
            acc += std::pow(term, r);
    }
    return r == kInf ? acc : std::pow(acc, 1.0 / r);
}

/// Homogeneous Besov norm (sum_j (2^{js} ||phi_j(D) f||_X)^r)^{1/r} over the
/// finite dyadic range. Spectral mass outside the covered annulus is recorded
/// as a warning, not an error.
inline double besov_norm(const GridFunction& f, const BesovParams& params, const LPFamily& fam,
                         BesovNormInfo* info = nullptr) {
    auto F = fft_forward(f);
    if (info) {
        double inside = 0.0, total = 0.0;
        for (std::size_t m = 0; m < F.size(); ++m) {
            const double a = std::norm(F[m]);
            total += a;
            if (fam.partition_sum()[m] >= 1.0 - 1e-9) inside += a;
        }
        info->outside_mass_ratio = total > 0.0 ? std::sqrt((total - inside) / total) : 0.0;
        info->warned = info->outside_mass_ratio > 1e-8;
    }
    auto blocks = besov_block_norms(F, fam, params.spec);
    if (info) info->block_norms = blocks;
    return ell_r_aggregate(blocks, fam.j_min(), params.s, params.r);
}

/// Fractional Laplacian (-Delta)^alpha as the multiplier |xi|^{2 alpha}; the
/// zero frequency is annihilated, matching the homogeneous quotient.
inline GridFunction laplacian_power(const GridFunction& f, double alpha) {
    const Grid d = f.grid().dual();
    auto symbol = sample(d, [alpha](std::array<double, 2> xi) {
        const double r2 = xi[0] * xi[0] + xi[1] * xi[1];
        return r2 > 0.0 ? std::pow(r2, alpha) : 0.0;
    });
    return fourier_multiplier(symbol, f);
}

/// Lift isomorphism probe: compares ||(-Delta)^alpha f||_{B^{s-2a}_{X,r}}
/// against ||f||_{B^s_{X,r}}.
inline std::pair<double, double> lift_check(const GridFunction& f, double alpha,
                                            const BesovParams& params, const LPFamily& fam) {
    if (!(alpha >= -2.0 && alpha <= 2.0))
        throw std::invalid_argument("lift_check: alpha must lie in [-2, 2]");
    const double lhs = besov_norm(laplacian_power(f, alpha),
                                  BesovParams(params.s - 2.0 * alpha, params.r, params.spec), fam);
    const double rhs = besov_norm(f, params, fam);
    return {lhs, rhs};
}

}  // namespace bfslab
