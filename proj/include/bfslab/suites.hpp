#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bfslab/besov.hpp"
#include "bfslab/config.hpp"
#include "bfslab/half_line.hpp"
#include "bfslab/maxreg.hpp"
#include "bfslab/operators.hpp"
#include "bfslab/random_fields.hpp"
#include "bfslab/report.hpp"
#include "bfslab/spaces.hpp"

namespace bfslab {

namespace detail {

/// Work-stealing loop over independent cases; each case writes only its own
/// slot, so the assembled output is schedule-independent.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline Grid make_grid(const SuiteConfig& cfg) {
    return Grid(cfg.grid.dim, cfg.grid.n, cfg.grid.half_width);
}

inline TimeGrid make_time_grid(const SuiteConfig& cfg) {
    return TimeGrid::geometric(cfg.time.total, cfg.time.cells, cfg.time.first_cell);
}

inline std::optional<double> ceiling_for(const SuiteConfig& cfg, const std::string& suite,
                                         std::optional<double> dflt = std::nullopt) {
    auto it = cfg.ceilings.find(suite);
    if (it != cfg.ceilings.end()) return it->second;
    return dflt;
}

/// Band-limited field inside the configured dyadic annulus; redraws (with a
/// salted seed) if the draw is degenerate, so sweeps never see zero rows.
inline GridFunction sweep_field(const Grid& g, const LpCfg& lp, std::uint64_t seed,
                                std::uint64_t salt, double slope = -0.5) {
    const double lo = std::ldexp(1.0, lp.j_min + 1);
    const double hi = std::ldexp(1.0, lp.j_max + 2);
    for (std::uint64_t retry = 0; retry < 8; ++retry) {
        Rng rng(mix_seed(seed, salt * 8 + retry));
        auto f = band_limited_field(g, lo, hi, slope, rng);
        if (l2_norm(f) > 1e-12) return f;
    }
    throw std::runtime_error("sweep_field: degenerate draws");
}

inline void renumber(ExperimentReport& rep) {
    long id = 0;
    for (auto& r : rep.rows) r.case_id = id++;
}

inline void apply_ceiling(ExperimentReport& rep, std::optional<double> ceiling) {
    rep.ceiling = ceiling;
    if (ceiling && rep.aggregate.empirical_sup > *ceiling)
        rep.notes.push_back("empirical sup " + fmt_real(rep.aggregate.empirical_sup) +
                            " exceeds configured ceiling " + fmt_real(*ceiling));
}

}  // namespace detail

// --------------------------------------------------------------------------
// suite runners
// --------------------------------------------------------------------------

inline ExperimentReport run_axioms(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    ExperimentReport rep;
    rep.suite = "axioms";
    for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
        const auto& spec = cfg.spaces[si];
        auto gen = [&, si](long c) {
            return detail::sweep_field(g, cfg.lp, cfg.sweep.seed,
                                       si * 1000003ULL + static_cast<std::uint64_t>(c));
        };
        rep.merge(axiom_suite(spec, gen, cfg.sweep.count));
    }
    detail::renumber(rep);
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "axioms"));
    return rep;
}

inline ExperimentReport run_young(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const double tol = detail::ceiling_for(cfg, "young", 1.0 + 1e-6).value();
    const std::size_t n = cfg.spaces.size() * static_cast<std::size_t>(cfg.sweep.count);
    std::vector<CaseRow> rows(n);
    detail::parallel_for(n, [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(cfg.sweep.count);
        const long c = static_cast<long>(idx % static_cast<std::size_t>(cfg.sweep.count));
        const auto& spec = cfg.spaces[si];
        CaseRow row;
        row.suite = "young";
        row.case_id = static_cast<long>(idx);
        row.anchor = "young-convolution-bound";
        row.params = spec.str() + ";case=" + std::to_string(c);
        try {
            auto f = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, idx * 2 + 1);
            auto h = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, idx * 2 + 2);
            row.lhs = x_norm(convolve(f, h), spec);
            row.rhs = x_norm(f, spec) * x_norm(h, SpaceSpec::lebesgue(1.0));
            row.ratio = row.lhs / row.rhs;
            row.pass = row.ratio <= tol;
        } catch (const std::exception& e) {
            row.pass = false;
            row.anchor = "case-error";
            row.params += std::string(";error=") + e.what();
        }
        rows[idx] = std::move(row);
    });
    ExperimentReport rep;
    rep.suite = "young";
    for (auto& r : rows) rep.add(std::move(r));
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "young", 1.0 + 1e-6));
    return rep;
}

inline ExperimentReport run_converse_young(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const double tol = detail::ceiling_for(cfg, "converse-young", 1e-2).value();
    std::vector<int> ks;
    for (int k : {2, 4, 8, 16, 32})
        if (1.0 / k >= g.spacing()) ks.push_back(k);
    if (ks.size() < 3)
        throw ConfigError("grid.N", "grid too coarse for the mollifier ladder (need 1/32 >= h)");

    ExperimentReport rep;
    rep.suite = "converse-young";
    const GridFunction bump = smooth_bump(g, g.half_width() / 16.0);
    for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
        Rng rng(mix_seed(cfg.sweep.seed, 5000 + si));
        const int range = g.points_per_axis() / 8;
        std::array<int, 2> z{static_cast<int>(rng.bits() % (2 * range + 1)) - range, 0};
        if (g.dim() == 2) z[1] = static_cast<int>(rng.bits() % (2 * range + 1)) - range;
        auto sub = converse_young_check(bump, z, cfg.spaces[si], ks, tol);
        for (auto& r : sub.rows) r.params += ";z0=" + std::to_string(z[0]);
        rep.merge(sub);
    }
    detail::renumber(rep);
    rep.ceiling = std::nullopt;  // convergence tolerance already enforced per check
    return rep;
}

inline ExperimentReport run_maximal(const SuiteConfig& cfg) {
    const TimeGrid tg = detail::make_time_grid(cfg);
    const double constant = 1.0 + std::exp(-1.0);
    const std::size_t n = static_cast<std::size_t>(cfg.sweep.count);
    std::vector<CaseRow> rows(n);
    detail::parallel_for(n, [&](std::size_t idx) {
        Rng rng(mix_seed(cfg.sweep.seed, 9000 + idx));
        HalfLineFunction f(tg, random_step_values(tg.cells(), rng));
        const double a = rng.uniform(0.1, 100.0);
        const int cell = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(tg.cells()));
        auto [lhs, rhs_scaled] = exp_kernel_bound_check(a, f, cell);
        const double mf = rhs_scaled / constant;
        CaseRow row;
        row.suite = "maximal";
        row.case_id = static_cast<long>(idx);
        row.params = "a=" + fmt_real(a) + ";cell=" + std::to_string(cell);
        row.lhs = lhs;
        row.rhs = mf;
        row.ratio = mf > 0 ? lhs / mf : 0.0;
        row.pass = lhs <= rhs_scaled * (1.0 + 1e-10);
        row.anchor = "exp-kernel-maximal-bound";
        rows[idx] = std::move(row);
    });
    ExperimentReport rep;
    rep.suite = "maximal";
    for (auto& r : rows) rep.add(std::move(r));
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "maximal", constant));
    return rep;
}

inline ExperimentReport run_besov(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const auto fam = build_lp_family(g, cfg.lp.j_min, cfg.lp.j_max);
    ExperimentReport rep;
    rep.suite = "besov";
    rep.merge(lp_family_legality(fam));

    const double tol = 1.0 + 1e-10;
    const std::vector<std::pair<double, double>> pairs = {{1.0, 2.0}, {2.0, kInf}, {1.0, kInf}};
    const std::size_t n =
        cfg.spaces.size() * static_cast<std::size_t>(cfg.sweep.count);
    std::vector<std::vector<CaseRow>> groups(n);
    detail::parallel_for(n, [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(cfg.sweep.count);
        const auto& spec = cfg.spaces[si];
        auto f = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 31000 + idx);
        auto blocks = besov_block_norms(fft_forward(f), fam, spec);
        for (const auto& [r1, r2] : pairs) {
            const double n1 = ell_r_aggregate(blocks, fam.j_min(), 0.0, r1);
            const double n2 = ell_r_aggregate(blocks, fam.j_min(), 0.0, r2);
            CaseRow row;
            row.suite = "besov";
            row.params = spec.str() + ";r1=" + fmt_real(r1) + ";r2=" + fmt_real(r2);
            row.lhs = n2;
            row.rhs = n1;
            row.ratio = n1 > 0 ? n2 / n1 : 0.0;
            row.pass = n2 <= n1 * tol;
            row.anchor = "besov-embedding";
            groups[idx].push_back(std::move(row));
        }
    });
    for (auto& grp : groups)
        for (auto& r : grp) rep.add(std::move(r));

    // lift isomorphism probes across single bands
    for (int j0 = cfg.lp.j_min + 1; j0 < cfg.lp.j_max; ++j0) {
        Rng rng(mix_seed(cfg.sweep.seed, 47000 + static_cast<std::uint64_t>(j0 - cfg.lp.j_min)));
        auto f = single_band_field(g, j0, 0.0, rng);
        auto [lhs, rhs] = lift_check(f, 1.0, BesovParams(1.0, 1.0, cfg.spaces.front()), fam);
        CaseRow row;
        row.suite = "besov";
        row.params = cfg.spaces.front().str() + ";alpha=1;j0=" + std::to_string(j0);
        row.lhs = lhs;
        row.rhs = rhs;
        row.ratio = rhs > 0 ? lhs / rhs : 0.0;
        row.pass = row.ratio >= std::pow(4.0, -2.0) && row.ratio <= std::pow(4.0, 2.0);
        row.anchor = "lift-isomorphism";
        rep.add(std::move(row));
    }
    detail::renumber(rep);
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "besov"));
    return rep;
}

inline ExperimentReport run_linear_term(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const auto fam = build_lp_family(g, cfg.lp.j_min, cfg.lp.j_max);
    ExperimentReport rep;
    rep.suite = "linear-term";

    // kernel decay sweep over (j, t)
    const int jlo = std::max(cfg.lp.j_min, -3);
    const int jhi = std::min(cfg.lp.j_max, 3);
    std::vector<double> ts;
    const int nt = 11;
    for (int i = 0; i < nt; ++i)
        ts.push_back(0.01 * std::pow(16.0 / 0.01, static_cast<double>(i) / (nt - 1)));
    std::vector<std::vector<double>> ratio_table(static_cast<std::size_t>(jhi - jlo + 1),
                                                 std::vector<double>(ts.size()));
    for (int j = jlo; j <= jhi; ++j) {
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            if (std::ldexp(1.0, 2 * j) * ts[ti] > 600.0) {
                ratio_table[static_cast<std::size_t>(j - jlo)][ti] = 0.0;
                continue;  // both sides underflow; nothing to measure
            }
            auto [measured, bound] = kernel_decay_check(fam, j, ts[ti]);
            const double ratio = measured / bound;
            ratio_table[static_cast<std::size_t>(j - jlo)][ti] = ratio;
            CaseRow row;
            row.suite = "linear-term";
            row.params = "j=" + std::to_string(j) + ";t=" + fmt_real(ts[ti]);
            row.lhs = measured;
            row.rhs = bound;
            row.ratio = ratio;
            row.pass = std::isfinite(ratio);
            row.anchor = "kernel-l1-decay";
            rep.add(std::move(row));
        }
    }
    // self-similarity (j, t) ~ (j+1, t/4) on interior points
    for (int j = jlo; j < jhi; ++j) {
        for (std::size_t ti = 2; ti + 2 < ts.size(); ++ti) {
            if (std::ldexp(1.0, 2 * j) * ts[ti] > 600.0) continue;
            auto [m2, b2] = kernel_decay_check(fam, j + 1, ts[ti] / 4.0);
            const double r1 = ratio_table[static_cast<std::size_t>(j - jlo)][ti];
            const double r2 = m2 / b2;
            CaseRow row;
            row.suite = "linear-term";
            row.params = "j=" + std::to_string(j) + ";t=" + fmt_real(ts[ti]) + ";pair=(j+1,t/4)";
            row.lhs = r2;
            row.rhs = r1;
            row.ratio = r1 > 0 ? r2 / r1 : 0.0;
            row.pass = std::abs(row.ratio - 1.0) <= 0.05;
            row.anchor = "kernel-decay-self-similarity";
            rep.add(std::move(row));
        }
    }

    // scale uniformity of the linear term over dilated bands: the series is
    // tau-independent, so compute it once per (spec, band)
    if (g.dim() == 1) {
        const int b_lo = std::max(cfg.lp.j_min + 1, -3);
        const int b_hi = std::min(cfg.lp.j_max - 1, 3);
        const int bands = b_hi - b_lo + 1;
        const double first =
            std::min(cfg.time.first_cell, 0.01 * std::pow(4.0, -(b_hi + 2)));
        const TimeGrid tg = TimeGrid::geometric(cfg.time.total, cfg.time.cells, first);
        Rng rng(mix_seed(cfg.sweep.seed, 61000));
        const auto family = dilated_band_family(g, b_lo, bands, rng);
        const std::size_t n_series = cfg.spaces.size() * static_cast<std::size_t>(bands);
        std::vector<LinearTermSeries> series(n_series);
        detail::parallel_for(n_series, [&](std::size_t idx) {
            const std::size_t si = idx / static_cast<std::size_t>(bands);
            const int b = static_cast<int>(idx % static_cast<std::size_t>(bands));
            series[idx] = linear_term_series(family[static_cast<std::size_t>(b)],
                                             cfg.spaces[si], fam, tg);
        });
        for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
            const auto& spec = cfg.spaces[si];
            for (double tau : {1.0, 2.0, kInf}) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (int b = 0; b < bands; ++b) {
                    auto [lhs, rhs] = linear_term_from_series(
                        series[si * static_cast<std::size_t>(bands) + static_cast<std::size_t>(b)],
                        tau);
                    CaseRow row;
                    row.suite = "linear-term";
                    row.params = spec.str() + ";tau=" + fmt_real(tau) +
                                 ";j0=" + std::to_string(b_lo + b);
                    row.lhs = lhs;
                    row.rhs = rhs;
                    row.ratio = rhs > 0 ? lhs / rhs : 0.0;
                    row.pass = std::isfinite(row.ratio) && row.ratio > 0.0;
                    row.anchor = "linear-term-bound";
                    rep.add(std::move(row));
                    const double x = b_lo + b;
                    const double y = std::log2(lhs / rhs);
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    sxy += x * y;
                }
                const double slope = (bands * sxy - sx * sy) / (bands * sxx - sx * sx);
                CaseRow row;
                row.suite = "linear-term";
                row.params = spec.str() + ";tau=" + fmt_real(tau) + ";check=slope";
                row.lhs = slope;
                row.rhs = 0.05;
                row.ratio = std::abs(slope) / 0.05;
                row.pass = std::abs(slope) <= 0.05;
                row.anchor = "linear-term-scale-uniformity";
                rep.add(std::move(row));
            }
        }
    } else {
        rep.notes.push_back("scale-uniformity battery skipped: dilated bands need dim = 1");
    }
    detail::renumber(rep);
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "linear-term"));
    return rep;
}

inline ExperimentReport run_duhamel_term(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const auto fam = build_lp_family(g, cfg.lp.j_min, cfg.lp.j_max);
    const TimeGrid tg = detail::make_time_grid(cfg);
    ExperimentReport rep;
    rep.suite = "duhamel-term";

    // sigma = 1 duality bound sweep
    const std::size_t n_dual = static_cast<std::size_t>(cfg.sweep.count);
    std::vector<CaseRow> dual_rows(n_dual);
    detail::parallel_for(n_dual, [&](std::size_t idx) {
        Rng rng(mix_seed(cfg.sweep.seed, 71000 + idx));
        HalfLineFunction gstep(tg, random_step_values(tg.cells(), rng));
        const int j = cfg.lp.j_min +
                      static_cast<int>(rng.bits() %
                                       static_cast<std::uint64_t>(cfg.lp.j_max - cfg.lp.j_min + 1));
        const int cell = static_cast<int>(rng.bits() % static_cast<std::uint64_t>(tg.cells()));
        auto [lhs, rhs] = duality_exp_check(j, gstep, cell);
        CaseRow row;
        row.suite = "duhamel-term";
        row.case_id = static_cast<long>(idx);
        row.params = "j=" + std::to_string(j) + ";cell=" + std::to_string(cell);
        row.lhs = lhs;
        row.rhs = rhs;
        row.ratio = rhs > 0 ? lhs / rhs : 0.0;
        row.pass = lhs <= rhs * (1.0 + 1e-10);
        row.anchor = "duality-tail-bound";
        dual_rows[idx] = std::move(row);
    });
    for (auto& r : dual_rows) rep.add(std::move(r));

    // Fefferman-Stein vector data
    const long n_fs = std::max<long>(cfg.sweep.count / 50, 4);
    for (auto [rho, sigma] : {std::pair{2.0, 2.0}, {3.0, 1.5}, {2.0, kInf}}) {
        for (long c = 0; c < n_fs; ++c) {
            std::vector<HalfLineFunction> fs;
            for (int k = 0; k < 8; ++k) {
                Rng rng(mix_seed(cfg.sweep.seed, 83000 + static_cast<std::uint64_t>(c) * 16 +
                                                     static_cast<std::uint64_t>(k)));
                fs.emplace_back(tg, random_step_values(tg.cells(), rng));
            }
            auto [lhs, rhs] = fs_vector_check(fs, rho, sigma);
            CaseRow row;
            row.suite = "duhamel-term";
            row.params = "rho=" + fmt_real(rho) + ";sigma=" + fmt_real(sigma) +
                         ";case=" + std::to_string(c);
            row.lhs = lhs;
            row.rhs = rhs;
            row.ratio = rhs > 0 ? lhs / rhs : 0.0;
            row.pass = std::isfinite(row.ratio);
            row.anchor = "fefferman-stein-vector";
            rep.add(std::move(row));
        }
    }

    // rho = 1 Fubini case with the exact tail identity
    const long n_rho1 = std::max<long>(cfg.sweep.count / 100, 2);
    for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
        for (long c = 0; c < n_rho1; ++c) {
            Rng rng(mix_seed(cfg.sweep.seed, 91000 + si * 1000 + static_cast<std::uint64_t>(c)));
            auto shape = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 92000 + si * 1000 +
                                                                            static_cast<std::uint64_t>(c));
            std::vector<GridFunction> frames;
            frames.reserve(static_cast<std::size_t>(tg.cells()));
            const double t0 = rng.uniform(0.1, 2.0);
            for (int cc = 0; cc < tg.cells(); ++cc) {
                const double amp = std::exp(-tg.midpoint(cc) / t0);
                std::vector<cdouble> s(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) s[i] = amp * shape[i];
                frames.push_back(GridFunction(g, std::move(s)));
            }
            auto res = rho1_fubini_check(SpaceTimeField(tg, std::move(frames)), cfg.spaces[si], fam);
            CaseRow row;
            row.suite = "duhamel-term";
            row.params = cfg.spaces[si].str() + ";case=" + std::to_string(c) +
                         ";tail_max=" + fmt_real(res.tail_max) +
                         ";tail_violations=" + std::to_string(res.tail_violations);
            row.lhs = res.lhs;
            row.rhs = res.rhs;
            row.ratio = res.rhs > 0 ? res.lhs / res.rhs : 0.0;
            row.pass = res.tail_violations == 0 && std::isfinite(row.ratio);
            row.anchor = "fubini-tail-bound";
            rep.add(std::move(row));
        }
    }

    // pure Duhamel-term regularity ratios (u0 = 0) over the (rho, sigma) grid
    const long n_mr = std::max<long>(cfg.sweep.count / 100, 4);
    for (std::size_t si = 0; si < cfg.spaces.size(); ++si) {
        for (long c = 0; c < n_mr; ++c) {
            auto shape1 = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 95000 + si * 1000 +
                                                                             static_cast<std::uint64_t>(c));
            auto shape2 = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 96000 + si * 1000 +
                                                                             static_cast<std::uint64_t>(c));
            std::vector<GridFunction> frames;
            frames.reserve(static_cast<std::size_t>(tg.cells()));
            for (int cc = 0; cc < tg.cells(); ++cc) {
                const double t = tg.midpoint(cc);
                const double a1 = std::exp(-t / 4.0);
                const double a2 = t * std::exp(-t);
                std::vector<cdouble> s(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) s[i] = a1 * shape1[i] + a2 * shape2[i];
                frames.push_back(GridFunction(g, std::move(s)));
            }
            const SpaceTimeField f(tg, std::move(frames));
            const auto mc = maxreg_precompute(GridFunction::zero(g), f, cfg.spaces[si], fam);
            for (double rho : {1.0, 2.0, 4.0}) {
                for (double sigma : {1.0, 2.0, kInf}) {
                    auto rr = maxreg_ratio_from(mc, rho, rho, sigma, cfg.spaces[si].str());
                    CaseRow row;
                    row.suite = "duhamel-term";
                    row.params = cfg.spaces[si].str() + ";rho=" + fmt_real(rho) +
                                 ";sigma=" + fmt_real(sigma) + ";case=" + std::to_string(c);
                    row.lhs = rr.lhs_dt + rr.lhs_lap;
                    row.rhs = rr.rhs_u0 + rr.rhs_f;
                    row.ratio = rr.ratio;
                    row.pass = std::isfinite(rr.ratio);
                    row.anchor = "duhamel-term-bound";
                    rep.add(std::move(row));
                }
            }
        }
    }
    detail::renumber(rep);
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "duhamel-term"));
    return rep;
}

inline ExperimentReport run_maxreg(const SuiteConfig& cfg) {
    const Grid g = detail::make_grid(cfg);
    const auto fam = build_lp_family(g, cfg.lp.j_min, cfg.lp.j_max);
    const TimeGrid tg = detail::make_time_grid(cfg);
    ExperimentReport rep;
    rep.suite = "maxreg";

    const std::size_t n =
        cfg.spaces.size() * static_cast<std::size_t>(std::max<long>(cfg.sweep.count / 10, 2));
    const long per_spec = std::max<long>(cfg.sweep.count / 10, 2);
    std::vector<std::vector<CaseRow>> groups(n);
    detail::parallel_for(n, [&](std::size_t idx) {
        const std::size_t si = idx / static_cast<std::size_t>(per_spec);
        const long c = static_cast<long>(idx % static_cast<std::size_t>(per_spec));
        const auto& spec = cfg.spaces[si];
        auto u0 = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 101000 + idx);
        auto shape1 = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 102000 + idx);
        auto shape2 = detail::sweep_field(g, cfg.lp, cfg.sweep.seed, 103000 + idx);
        std::vector<GridFunction> frames;
        frames.reserve(static_cast<std::size_t>(tg.cells()));
        for (int cc = 0; cc < tg.cells(); ++cc) {
            const double t = tg.midpoint(cc);
            const double a1 = std::exp(-t / 4.0);
            const double a2 = t * std::exp(-t);
            std::vector<cdouble> s(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) s[i] = a1 * shape1[i] + a2 * shape2[i];
            frames.push_back(GridFunction(g, std::move(s)));
        }
        const SpaceTimeField f(tg, std::move(frames));
        const auto mc = maxreg_precompute(u0, f, spec, fam);
        for (double rho : {1.0, 2.0, 4.0}) {
            for (double sigma : {1.0, 2.0, kInf}) {
                auto rr = maxreg_ratio_from(mc, rho, rho, sigma, spec.str());
                CaseRow row;
                row.suite = "maxreg";
                row.params = spec.str() + ";rho=" + fmt_real(rho) + ";w=" + fmt_real(rho) +
                             ";sigma=" + fmt_real(sigma) + ";case=" + std::to_string(c) +
                             ";residual=" + fmt_real(rr.residual);
                row.lhs = rr.lhs_dt + rr.lhs_lap;
                row.rhs = rr.rhs_u0 + rr.rhs_f;
                row.ratio = rr.ratio;
                row.pass = std::isfinite(rr.ratio);
                row.anchor = "heat-maximal-regularity";
                groups[idx].push_back(std::move(row));
            }
        }
        // Lorentz-in-time off-diagonal variants
        for (double w : {1.0, kInf}) {
            auto rr = maxreg_ratio_from(mc, 2.0, w, 2.0, spec.str());
            CaseRow row;
            row.suite = "maxreg";
            row.params = spec.str() + ";rho=2;w=" + fmt_real(w) + ";sigma=2;case=" +
                         std::to_string(c);
            row.lhs = rr.lhs_dt + rr.lhs_lap;
            row.rhs = rr.rhs_u0 + rr.rhs_f;
            row.ratio = rr.ratio;
            row.pass = std::isfinite(rr.ratio);
            row.anchor = "heat-maximal-regularity-lorentz";
            groups[idx].push_back(std::move(row));
        }
        // diagonal consistency: rearrangement route vs plain quadrature route
        for (double rho : {2.0, 4.0}) {
            auto a = maxreg_ratio_from(mc, rho, rho, 2.0, spec.str(), TimeNormRoute::lorentz);
            auto b = maxreg_ratio_from(mc, rho, rho, 2.0, spec.str(), TimeNormRoute::plain_lp);
            CaseRow row;
            row.suite = "maxreg";
            row.params = spec.str() + ";rho=" + fmt_real(rho) + ";case=" + std::to_string(c) +
                         ";check=diagonal";
            row.lhs = a.ratio;
            row.rhs = b.ratio;
            row.ratio = b.ratio > 0 ? a.ratio / b.ratio : 0.0;
            row.pass = std::abs(a.ratio - b.ratio) <= 1e-10 * std::max(1.0, std::abs(b.ratio));
            row.anchor = "lorentz-lp-diagonal";
            groups[idx].push_back(std::move(row));
        }
    });
    for (auto& grp : groups)
        for (auto& r : grp) rep.add(std::move(r));
    detail::renumber(rep);
    detail::apply_ceiling(rep, detail::ceiling_for(cfg, "maxreg"));
    return rep;
}

inline ExperimentReport run_suite(const SuiteConfig& cfg) {
    if (cfg.suite == "axioms") return run_axioms(cfg);
    if (cfg.suite == "young") return run_young(cfg);
    if (cfg.suite == "converse-young") return run_converse_young(cfg);
    if (cfg.suite == "maximal") return run_maximal(cfg);
    if (cfg.suite == "besov") return run_besov(cfg);
    if (cfg.suite == "linear-term") return run_linear_term(cfg);
    if (cfg.suite == "duhamel-term") return run_duhamel_term(cfg);
    if (cfg.suite == "maxreg") return run_maxreg(cfg);
    if (cfg.suite == "all") {
        ExperimentReport rep;
        rep.suite = "all";
        bool ok = true;
        for (const auto& name : suite_names()) {
            if (name == "all") continue;
            SuiteConfig sub = cfg;
            sub.suite = name;
            auto r = run_suite(sub);
            ok = ok && r.passed();
            if (!r.passed() && r.aggregate.violations == 0)
                rep.notes.push_back(name + ": ceiling exceeded");
            rep.merge(r);
        }
        detail::renumber(rep);
        if (!ok && rep.aggregate.violations == 0) rep.aggregate.violations = 1;
        return rep;
    }
    throw ConfigError("suite", "unknown suite '" + cfg.suite + "'");
}

struct RefineOutcome {
    ExperimentReport combined;
    double base_sup = 0.0;
    double refined_sup = 0.0;
    double delta = 0.0;
    bool passed = false;
};

/// Runs the suite at (N, cells) and (2N, 2 cells) and compares the empirical
/// suprema; resource bounds are checked before any computation starts.
inline RefineOutcome refine_suite(const SuiteConfig& cfg) {
    const long refined_points = 2L * cfg.grid.n;
    const long total = cfg.grid.dim == 2 ? refined_points * refined_points : refined_points;
    if (total > (1L << 22)) throw ConfigError("grid.N", "refinement exceeds the memory bound");
    if (2 * cfg.time.cells > 16384)
        throw ConfigError("time.cells", "refinement exceeds the memory bound");

    auto base = run_suite(cfg);
    SuiteConfig fine = cfg;
    fine.grid.n *= 2;
    fine.time.cells *= 2;
    auto refined = run_suite(fine);

    RefineOutcome out;
    out.base_sup = base.aggregate.empirical_sup;
    out.refined_sup = refined.aggregate.empirical_sup;
    out.delta = std::abs(out.refined_sup - out.base_sup) /
                std::max(std::abs(out.base_sup), 1e-300);
    out.passed = base.passed() && refined.passed() && out.delta <= 0.05;

    out.combined.suite = cfg.suite;
    for (auto& r : base.rows) r.params = "phase=base;" + r.params;
    for (auto& r : refined.rows) r.params = "phase=refined;" + r.params;
    out.combined.merge(base);
    out.combined.merge(refined);
    detail::renumber(out.combined);
    out.combined.aggregate.refinement_delta = out.delta;
    if (!out.passed && out.combined.aggregate.violations == 0)
        out.combined.aggregate.violations = 1;
    return out;
}

// --------------------------------------------------------------------------
// persistence
// --------------------------------------------------------------------------

inline void write_report_json(const std::string& path, const ExperimentReport& rep,
                              const nlohmann::ordered_json& config_echo_json) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["passed"] = rep.passed();
    j["config"] = config_echo_json;
    nlohmann::ordered_json agg;
    agg["count"] = rep.aggregate.count;
    agg["violations"] = rep.aggregate.violations;
    agg["empirical_sup"] = rep.aggregate.empirical_sup;
    if (rep.ceiling) agg["ceiling"] = *rep.ceiling;
    if (rep.aggregate.refinement_delta) agg["refinement_delta"] = *rep.aggregate.refinement_delta;
    j["aggregate"] = agg;
    j["notes"] = rep.notes;
    std::vector<std::string> anchors;
    for (const auto& r : rep.rows)
        if (std::find(anchors.begin(), anchors.end(), r.anchor) == anchors.end())
            anchors.push_back(r.anchor);
    j["anchors"] = anchors;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open JSON output: " + path);
    os << j.dump(2) << "\n";
}

inline void persist_report(const std::string& prefix, const ExperimentReport& rep,
                           const SuiteConfig& cfg) {
    const std::filesystem::path p(prefix);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    write_report_json(prefix + ".report.json", rep, config_echo(cfg));
    write_cases_csv(prefix + ".cases.csv", rep);
}

}  // namespace bfslab
