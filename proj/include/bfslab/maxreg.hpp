#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfslab/besov.hpp"
#include "bfslab/grid.hpp"
#include "bfslab/half_line.hpp"
#include "bfslab/operators.hpp"
#include "bfslab/spaces.hpp"

namespace bfslab {

/// Time-indexed grid functions: frame c is the value on the time cell
/// (b_c, b_{c+1}] (piecewise-constant data) or at its right boundary
/// (solution snapshots).
struct SpaceTimeField {
    TimeGrid tg;
    std::vector<GridFunction> frames;

    SpaceTimeField(TimeGrid grid, std::vector<GridFunction> fr)
        : tg(std::move(grid)), frames(std::move(fr)) {
        if (frames.empty()) throw std::invalid_argument("SpaceTimeField: empty time grid");
        if (frames.size() != static_cast<std::size_t>(tg.cells()))
            throw std::invalid_argument("SpaceTimeField: frame count must match cell count");
        for (const auto& f : frames)
            if (f.grid() != frames.front().grid())
                throw std::invalid_argument("SpaceTimeField: frames must share one spatial grid");
    }

    const Grid& space_grid() const { return frames.front().grid(); }

    static SpaceTimeField zero(const TimeGrid& tg, const Grid& g) {
        return SpaceTimeField(tg, std::vector<GridFunction>(static_cast<std::size_t>(tg.cells()),
                                                            GridFunction::zero(g)));
    }
};

struct DuhamelSolution {
    SpaceTimeField u;
    SpaceTimeField dt_u;
    SpaceTimeField lap_u;
    /// max over interior cells of || (u_{c+1}-u_c)/w - ((lap_c+lap_{c+1})/2 + f_{c+1}) ||_{L^2}
    double fd_residual = 0.0;
    /// sup_c ||f_c||_{L^2}, the natural scale for the residual
    double f_scale = 0.0;
};

/// Mild solution of dt u - Lap u = f with piecewise-constant-in-time f: per
/// Fourier mode and cell, u^ advances by
///   u^(t + d) = e^{-|xi|^2 d} u^(t) + f^_c (1 - e^{-|xi|^2 d})/|xi|^2,
/// the cell integral of the Duhamel kernel in closed form. Each cell is
/// traversed in two half-steps so the recorded frames sit at cell midpoints,
/// the same convention the step-function time norms use. dt_u = lap_u + f
/// holds exactly by construction; a finite-difference residual between
/// consecutive midpoints is recorded as a cross-check.
inline DuhamelSolution duhamel_solve(const GridFunction& u0, const SpaceTimeField& f) {
    const Grid& g = u0.grid();
    if (g != f.space_grid()) throw std::invalid_argument("duhamel_solve: grid mismatch");
    const TimeGrid& tg = f.tg;
    const int M = tg.cells();
    const Grid d = g.dual();

    std::vector<double> xi2(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        const auto xi = d.point(m);
        xi2[m] = xi[0] * xi[0] + xi[1] * xi[1];
    }

    std::vector<cdouble> Uhat = fft_forward(u0).samples();
    std::vector<GridFunction> u_frames, lap_frames, dt_frames;
    u_frames.reserve(static_cast<std::size_t>(M));
    lap_frames.reserve(static_cast<std::size_t>(M));
    dt_frames.reserve(static_cast<std::size_t>(M));

    std::vector<cdouble> lap_hat(g.size());
    auto advance = [&](std::vector<cdouble>& U, const std::vector<cdouble>& Fhat, double dstep) {
        for (std::size_t m = 0; m < g.size(); ++m) {
            const double a = xi2[m] * dstep;
            const double E = std::exp(-a);
            const double gain = xi2[m] > 0.0 ? -std::expm1(-a) / xi2[m] : dstep;
            U[m] = E * U[m] + Fhat[m] * gain;
        }
    };

    for (int c = 0; c < M; ++c) {
        const auto Fhat = fft_forward(f.frames[static_cast<std::size_t>(c)]).samples();
        advance(Uhat, Fhat, tg.midpoint(c) - tg.boundary(c));
        for (std::size_t m = 0; m < g.size(); ++m) lap_hat[m] = -xi2[m] * Uhat[m];
        auto uc = fft_inverse(GridFunction::unchecked(d, Uhat));
        auto lc = fft_inverse(GridFunction::unchecked(d, lap_hat));
        std::vector<cdouble> dtc(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            dtc[i] = lc[i] + f.frames[static_cast<std::size_t>(c)][i];
        u_frames.push_back(std::move(uc));
        lap_frames.push_back(std::move(lc));
        dt_frames.push_back(GridFunction::unchecked(g, std::move(dtc)));
        advance(Uhat, Fhat, tg.right(c) - tg.midpoint(c));
    }

    DuhamelSolution sol{SpaceTimeField(tg, std::move(u_frames)),
                        SpaceTimeField(tg, std::move(dt_frames)),
                        SpaceTimeField(tg, std::move(lap_frames)), 0.0, 0.0};

    for (int c = 0; c < M; ++c)
        sol.f_scale = std::max(sol.f_scale, l2_norm(f.frames[static_cast<std::size_t>(c)]));
    for (int c = 0; c + 1 < M; ++c) {
        const double dt = tg.midpoint(c + 1) - tg.midpoint(c);
        const double wa = tg.right(c) - tg.midpoint(c);        // left cell's share of f
        const double wb = tg.midpoint(c + 1) - tg.boundary(c + 1);
        const auto& ua = sol.u.frames[static_cast<std::size_t>(c)];
        const auto& ub = sol.u.frames[static_cast<std::size_t>(c + 1)];
        const auto& la = sol.lap_u.frames[static_cast<std::size_t>(c)];
        const auto& lb = sol.lap_u.frames[static_cast<std::size_t>(c + 1)];
        const auto& fa = f.frames[static_cast<std::size_t>(c)];
        const auto& fb = f.frames[static_cast<std::size_t>(c + 1)];
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const cdouble fd = (ub[i] - ua[i]) / dt;
            const cdouble rhs = 0.5 * (la[i] + lb[i]) + (wa * fa[i] + wb * fb[i]) / dt;
            acc += std::norm(fd - rhs);
        }
        sol.fd_residual = std::max(sol.fd_residual, std::sqrt(acc * g.cell_measure()));
    }
    return sol;
}

/// Lorentz norm in time of a non-negative step series, via the decreasing
/// rearrangement with the cell widths as measures. w = rho reduces to the
/// plain weighted L^rho norm; (inf, inf) is the sup over samples.
inline double time_lorentz_norm(std::vector<double> values, std::vector<double> weights,
                                double rho, double w) {
    if (values.size() != weights.size())
        throw std::invalid_argument("time_lorentz_norm: size mismatch");
    for (double v : values)
        if (!(v >= 0.0)) throw std::invalid_argument("time_lorentz_norm: values must be >= 0");
    if (rho == kInf) {
        if (w != kInf) throw std::invalid_argument("time_lorentz_norm: rho = inf requires w = inf");
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
    if (w == rho) {
        if (!(rho >= 1.0)) throw std::invalid_argument("time_lorentz_norm: need rho >= 1");
    } else {
        if (!(rho > 1.0) || !(rho < kInf) || !(w >= 1.0))
            throw std::invalid_argument(
                "time_lorentz_norm: need rho in (1, inf) and w in [1, inf] (w = rho allows more)");
    }
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> v(values.size()), ww(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        v[i] = values[order[i]];
        ww[i] = weights[order[i]];
    }
    return detail::lorentz_from_steps(v, ww, rho, w);
}

/// Plain weighted L^rho norm of a step series: the independent route used to
/// cross-check the Lorentz diagonal w = rho.
inline double time_lp_norm(const std::vector<double>& values, const std::vector<double>& weights,
                           double rho) {
    if (rho == kInf) {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] > 0.0) acc += std::pow(values[i], rho) * weights[i];
    return std::pow(acc, 1.0 / rho);
}

enum class TimeNormRoute { lorentz, plain_lp };

struct RegularityReport {
    double rho = 2.0, w = 2.0, sigma = 2.0, s = 1.0;
    std::string spec;
    double lhs_dt = 0.0, lhs_lap = 0.0;
    double rhs_u0 = 0.0, rhs_f = 0.0;
    double ratio = 0.0;
    double residual = 0.0;
    bool sup_in_time_approximate = false;  // an inf index was realized as a max over samples
};

namespace detail {

inline std::vector<double> cell_widths(const TimeGrid& tg) {
    std::vector<double> w(static_cast<std::size_t>(tg.cells()));
    for (int c = 0; c < tg.cells(); ++c) w[static_cast<std::size_t>(c)] = tg.width(c);
    return w;
}

}  // namespace detail

/// Per-frame dyadic block norms of one solved heat problem; all
/// (rho, w, sigma) aggregations read from this without re-solving.
struct MaxregCase {
    std::vector<std::vector<double>> dt_blocks, lap_blocks, f_blocks;  // [frame][block]
    std::vector<double> u0_blocks;
    std::vector<double> widths;
    int j_min = 0;
    double residual = 0.0;
    double f_scale = 0.0;
};

inline MaxregCase maxreg_precompute(const GridFunction& u0, const SpaceTimeField& f,
                                    const SpaceSpec& spec, const LPFamily& fam) {
    auto sol = duhamel_solve(u0, f);
    MaxregCase mc;
    mc.j_min = fam.j_min();
    mc.widths = detail::cell_widths(f.tg);
    mc.residual = sol.fd_residual;
    mc.f_scale = sol.f_scale;
    const std::size_t M = f.frames.size();
    mc.dt_blocks.reserve(M);
    mc.lap_blocks.reserve(M);
    mc.f_blocks.reserve(M);
    for (std::size_t c = 0; c < M; ++c) {
        mc.dt_blocks.push_back(besov_block_norms(fft_forward(sol.dt_u.frames[c]), fam, spec));
        mc.lap_blocks.push_back(besov_block_norms(fft_forward(sol.lap_u.frames[c]), fam, spec));
        mc.f_blocks.push_back(besov_block_norms(fft_forward(f.frames[c]), fam, spec));
    }
    mc.u0_blocks = besov_block_norms(fft_forward(u0), fam, spec);
    return mc;
}

inline RegularityReport maxreg_ratio_from(const MaxregCase& mc, double rho, double w, double sigma,
                                          const std::string& spec_name,
                                          TimeNormRoute route = TimeNormRoute::lorentz) {
    if (!(sigma >= 1.0)) throw std::invalid_argument("maxreg_ratio: sigma must be >= 1");
    if (route == TimeNormRoute::plain_lp && w != rho)
        throw std::invalid_argument("maxreg_ratio: plain_lp route requires w = rho");

    auto series = [&](const std::vector<std::vector<double>>& blocks) {
        std::vector<double> out(blocks.size());
        for (std::size_t c = 0; c < blocks.size(); ++c)
            out[c] = ell_r_aggregate(blocks[c], mc.j_min, 0.0, sigma);
        return out;
    };
    auto tnorm = [&](const std::vector<double>& s) {
        return route == TimeNormRoute::lorentz ? time_lorentz_norm(s, mc.widths, rho, w)
                                               : time_lp_norm(s, mc.widths, rho);
    };

    RegularityReport rep;
    rep.rho = rho;
    rep.w = w;
    rep.sigma = sigma;
    rep.s = rho == kInf ? 2.0 : 2.0 - 2.0 / rho;
    rep.spec = spec_name;
    rep.lhs_dt = tnorm(series(mc.dt_blocks));
    rep.lhs_lap = tnorm(series(mc.lap_blocks));
    rep.rhs_f = tnorm(series(mc.f_blocks));
    rep.rhs_u0 = ell_r_aggregate(mc.u0_blocks, mc.j_min, rep.s, w);
    rep.residual = mc.residual;
    rep.sup_in_time_approximate = rho == kInf || sigma == kInf || w == kInf;
    const double rhs = rep.rhs_u0 + rep.rhs_f;
    if (!(rhs > 0.0)) throw std::invalid_argument("maxreg_ratio: zero right-hand side");
    rep.ratio = (rep.lhs_dt + rep.lhs_lap) / rhs;
    return rep;
}

/// Heat maximal-regularity ratio
///   (||dt u|| + ||Lap u||) / (||u0||_{B^{2-2/rho}_{X,w}} + ||f||)
/// with the time norm L^{rho,w}(0,T; B^0_{X,sigma}); w = rho is the plain
/// L^rho estimate, route plain_lp evaluates that diagonal without the
/// rearrangement machinery.
inline RegularityReport maxreg_ratio(const GridFunction& u0, const SpaceTimeField& f, double rho,
                                     double w, double sigma, const SpaceSpec& spec,
                                     const LPFamily& fam,
                                     TimeNormRoute route = TimeNormRoute::lorentz) {
    return maxreg_ratio_from(maxreg_precompute(u0, f, spec, fam), rho, w, sigma, spec.str(),
                             route);
}

/// tau-independent ingredients of the linear-term estimate: the time series
/// t -> ||Lap e^{t Lap} u0||_{B^0_{X,1}} at cell midpoints (scale-uniform
/// midpoint quadrature) plus the dyadic block norms of u0.
struct LinearTermSeries {
    std::vector<double> series;
    std::vector<double> widths;
    std::vector<double> u0_blocks;
    int j_min = 0;
};

inline LinearTermSeries linear_term_series(const GridFunction& u0, const SpaceSpec& spec,
                                           const LPFamily& fam, const TimeGrid& tg) {
    const Grid& g = u0.grid();
    const Grid d = g.dual();
    std::vector<double> xi2(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        const auto xi = d.point(m);
        xi2[m] = xi[0] * xi[0] + xi[1] * xi[1];
    }
    const auto U0 = fft_forward(u0).samples();
    LinearTermSeries out;
    out.j_min = fam.j_min();
    out.widths = detail::cell_widths(tg);
    out.series.resize(static_cast<std::size_t>(tg.cells()));
    std::vector<cdouble> spec_t(g.size());
    for (int c = 0; c < tg.cells(); ++c) {
        const double t = tg.midpoint(c);
        for (std::size_t m = 0; m < g.size(); ++m)
            spec_t[m] = -xi2[m] * std::exp(-t * xi2[m]) * U0[m];
        auto blocks = besov_block_norms(GridFunction::unchecked(d, spec_t), fam, spec);
        out.series[static_cast<std::size_t>(c)] = ell_r_aggregate(blocks, fam.j_min(), 0.0, 1.0);
    }
    out.u0_blocks = besov_block_norms(fft_forward(u0), fam, spec);
    return out;
}

inline std::pair<double, double> linear_term_from_series(const LinearTermSeries& ls, double tau) {
    if (!(tau >= 1.0)) throw std::invalid_argument("linear_term_check: tau must be >= 1");
    const double lhs = time_lp_norm(ls.series, ls.widths, tau);
    const double s = tau == kInf ? 2.0 : 2.0 - 2.0 / tau;
    const double rhs = ell_r_aggregate(ls.u0_blocks, ls.j_min, s, tau);
    return {lhs, rhs};
}

/// Linear-term estimate: (lhs, rhs) with
///   lhs = || t -> ||Lap e^{t Lap} u0||_{B^0_{X,1}} ||_{L^tau(0,T]}
///   rhs = ||u0||_{B^{2-2/tau}_{X,tau}}.
inline std::pair<double, double> linear_term_check(const GridFunction& u0, double tau,
                                                   const SpaceSpec& spec, const LPFamily& fam,
                                                   const TimeGrid& tg) {
    return linear_term_from_series(linear_term_series(u0, spec, fam, tg), tau);
}

/// Dyadic heat-kernel decay: (measured, bound) with
///   measured = ||F^{-1}[Phi_j e^{-t|.|^2}]||_{L^1},  bound = e^{-4^j t}.
inline std::pair<double, double> kernel_decay_check(const LPFamily& fam, int j, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_decay_check: t must be positive");
    const Grid& g = fam.grid();
    const Grid d = g.dual();
    const auto& Ph = fam.Phi(j);
    std::vector<cdouble> sym(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        const double r = fam.sample_radius()[m];
        sym[m] = Ph[m] * std::exp(-t * r * r);
    }
    auto kernel = fft_inverse(GridFunction::unchecked(d, std::move(sym)));
    const double measured = x_norm(kernel, SpaceSpec::lebesgue(1.0));
    const double bound = std::exp(-std::ldexp(1.0, 2 * j) * t);
    return {measured, bound};
}

/// sigma = 1 duality bound: (lhs, rhs) with
///   lhs = integral_s^T 4^j e^{-4^j(t-s)} g(t) dt,  rhs = M g(s),
/// s at the midpoint of the given cell.
inline std::pair<double, double> duality_exp_check(int j, const HalfLineFunction& g, int s_cell) {
    detail::require_nonneg(g, "duality_exp_check");
    const double lambda = std::ldexp(1.0, 2 * j);
    const double lhs = lambda > 0.0 ? exp_tail_integral(lambda, g, s_cell) : 0.0;
    const double rhs = hl_maximal_at(g, s_cell);
    return {lhs, rhs};
}

/// Vector-valued maximal inequality data: (lhs, rhs) with
///   lhs = integral (sum_j (M f_j)^sigma)^{rho/sigma} dt
///   rhs = integral (sum_j |f_j|^sigma)^{rho/sigma} dt.
inline std::pair<double, double> fs_vector_check(const std::vector<HalfLineFunction>& fs,
                                                 double rho, double sigma) {
    if (!(rho > 1.0) || !(rho < kInf))
        throw std::invalid_argument("fs_vector_check: need 1 < rho < inf");
    if (!(sigma > 1.0)) throw std::invalid_argument("fs_vector_check: need 1 < sigma <= inf");
    if (fs.empty()) throw std::invalid_argument("fs_vector_check: need at least one function");
    const TimeGrid& tg = fs.front().tg;
    for (const auto& f : fs)
        if (f.tg != tg) throw std::invalid_argument("fs_vector_check: time grids differ");

    std::vector<HalfLineFunction> Ms;
    Ms.reserve(fs.size());
    for (const auto& f : fs) Ms.push_back(hl_maximal_halfline(f));

    auto aggregate = [&](const std::vector<HalfLineFunction>& hs) {
        double acc = 0.0;
        for (int c = 0; c < tg.cells(); ++c) {
            double inner = 0.0;
            if (sigma == kInf) {
                for (const auto& h : hs) inner = std::max(inner, h.values[static_cast<std::size_t>(c)]);
            } else {
                for (const auto& h : hs) {
                    const double v = h.values[static_cast<std::size_t>(c)];
                    if (v > 0.0) inner += std::pow(v, sigma);
                }
                inner = std::pow(inner, 1.0 / sigma);
            }
            if (inner > 0.0) acc += std::pow(inner, rho) * tg.width(c);
        }
        return acc;
    };
    return {aggregate(Ms), aggregate(fs)};
}

struct Rho1FubiniResult {
    double lhs = 0.0;  // || Lap int_0^t e^{(t-s) Lap} f ds ||_{L^1(0,T; B^0_{X,1})}
    double rhs = 0.0;  // || f ||_{L^1(0,T; B^0_{X,1})}
    long tail_violations = 0;
    double tail_max = 0.0;  // sup of 1 - e^{-4^j (T - s)} over the (j, s) scan
};

/// rho = 1 case: both sides of the L^1-in-time estimate, plus the exact
/// per-(j, s) tail integral integral_s^T 4^j e^{-4^j(t-s)} dt = 1 - e^{-4^j(T-s)} <= 1.
inline Rho1FubiniResult rho1_fubini_check(const SpaceTimeField& f, const SpaceSpec& spec,
                                          const LPFamily& fam) {
    auto sol = duhamel_solve(GridFunction::zero(f.space_grid()), f);
    const auto widths = detail::cell_widths(f.tg);
    std::vector<double> lap_series(f.frames.size()), f_series(f.frames.size());
    for (std::size_t c = 0; c < f.frames.size(); ++c) {
        lap_series[c] = ell_r_aggregate(besov_block_norms(fft_forward(sol.lap_u.frames[c]), fam, spec),
                                        fam.j_min(), 0.0, 1.0);
        f_series[c] = ell_r_aggregate(besov_block_norms(fft_forward(f.frames[c]), fam, spec),
                                      fam.j_min(), 0.0, 1.0);
    }
    Rho1FubiniResult out;
    out.lhs = time_lp_norm(lap_series, widths, 1.0);
    out.rhs = time_lp_norm(f_series, widths, 1.0);
    const double T = f.tg.total();
    for (int j = fam.j_min(); j <= fam.j_max(); ++j) {
        const double lam = std::ldexp(1.0, 2 * j);
        for (int c = 0; c < f.tg.cells(); ++c) {
            const double tail = -std::expm1(-lam * (T - f.tg.boundary(c)));
            out.tail_max = std::max(out.tail_max, tail);
            if (tail > 1.0) ++out.tail_violations;
        }
    }
    return out;
}

}  // namespace bfslab
