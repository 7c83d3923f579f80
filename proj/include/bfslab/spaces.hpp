#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfslab/grid.hpp"
#include "bfslab/report.hpp"

namespace bfslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tagged choice of norm family. Lebesgue(p), Lorentz(p,q) and Morrey(p,q)
/// stand in for the abstract space X; all three are lattice norms on |f|.
struct SpaceSpec {
    enum class Family { lebesgue, lorentz, morrey };

    Family family = Family::lebesgue;
    double p = 2.0;
    double q = 2.0;  // unused for Lebesgue

    static SpaceSpec lebesgue(double p) {
        if (!(p >= 1.0)) throw std::invalid_argument("Lebesgue: p must satisfy 1 <= p <= inf");
        return SpaceSpec{Family::lebesgue, p, p};
    }
    static SpaceSpec lorentz(double p, double q) {
        if (!(p > 1.0) || !(p < kInf))
            throw std::invalid_argument("Lorentz: p must satisfy 1 < p < inf");
        if (!(q >= 1.0)) throw std::invalid_argument("Lorentz: q must satisfy 1 <= q <= inf");
        return SpaceSpec{Family::lorentz, p, q};
    }
    static SpaceSpec morrey(double p, double q) {
        if (!(q >= 1.0) || !(q <= p) || !(p < kInf))
            throw std::invalid_argument("Morrey: need 1 <= q <= p < inf");
        return SpaceSpec{Family::morrey, p, q};
    }

    std::string str() const {
        std::ostringstream os;
        switch (family) {
            case Family::lebesgue: os << "lebesgue(p=" << p << ")"; break;
            case Family::lorentz: os << "lorentz(p=" << p << ",q=" << q << ")"; break;
            case Family::morrey: os << "morrey(p=" << p << ",q=" << q << ")"; break;
        }
        return os.str();
    }
};

/// Step representation of the decreasing rearrangement: values non-increasing,
/// each carrying the measure of the cells it came from.
struct Rearrangement {
    std::vector<double> values;
    std::vector<double> weights;
};

inline Rearrangement decreasing_rearrangement(const GridFunction& f) {
    Rearrangement r;
    r.values.reserve(f.size());
    for (const auto& v : f.samples()) r.values.push_back(std::abs(v));
    std::sort(r.values.begin(), r.values.end(), std::greater<double>());
    r.weights.assign(f.size(), f.grid().cell_measure());
    return r;
}

namespace detail {

/// Lorentz functional of a step function given by (values desc, weights):
/// ( integral_0^inf (t^{1/p} f*(t))^q dt/t )^{1/q}, each step integrated in
/// closed form; sup form for q = inf. Shared by the space and time norms.
inline double lorentz_from_steps(const std::vector<double>& values,
                                 const std::vector<double>& weights, double p, double q) {
    double W = 0.0;
    if (q == kInf) {
        double best = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            W += weights[i];
            if (values[i] <= 0.0) break;  // descending; the sup over a step sits at its right end
            best = std::max(best, std::pow(W, 1.0 / p) * values[i]);
        }
        return best;
    }
    double acc = 0.0;
    double Wq = 0.0;  // W^{q/p} carried across steps
    const double e = q / p;
    for (std::size_t i = 0; i < values.size(); ++i) {
        W += weights[i];
        const double Wq_next = std::pow(W, e);
        if (values[i] > 0.0) acc += std::pow(values[i], q) * (p / q) * (Wq_next - Wq);
        Wq = Wq_next;
    }
    return std::pow(acc, 1.0 / q);
}

/// Circular window sums over grid cells via prefix tables; the shared
/// evaluation engine for the Morrey norm and the ball maximal operator.
class BallScanner {
public:
    BallScanner(const Grid& g, std::vector<double> cell_values) : g_(g) {
        const int n = g.points_per_axis();
        rows_ = g.dim() == 2 ? n : 1;
        cols_ = n;
        pref_.assign(static_cast<std::size_t>(rows_) * (cols_ + 1), 0.0);
        for (int r = 0; r < rows_; ++r) {
            double acc = 0.0;
            pref_[pidx(r, 0)] = 0.0;
            for (int c = 0; c < cols_; ++c) {
                acc += cell_values[static_cast<std::size_t>(r) * cols_ + c];
                pref_[pidx(r, c + 1)] = acc;
            }
        }
    }

    /// Sum and cell count over the torus ball of radius R cells (strict
    /// Euclidean distance < R*h) centered at cell (c0, c1).
    std::pair<double, long> sum_count(int c0, int c1, int R) const {
        if (g_.dim() == 1) {
            const int half = R - 1;
            return {row_sum(0, c0 - half, c0 + half), 2L * half + 1};
        }
        double s = 0.0;
        long cnt = 0;
        const long R2 = static_cast<long>(R) * R;
        for (int d0 = -(R - 1); d0 <= R - 1; ++d0) {
            const long rem = R2 - static_cast<long>(d0) * d0;
            int half = static_cast<int>(std::sqrt(static_cast<double>(rem)));
            while (static_cast<long>(half) * half >= rem) --half;  // strict |d| < sqrt(rem)
            s += row_sum(g_.wrap(c0 + d0), c1 - half, c1 + half);
            cnt += 2L * half + 1;
        }
        return {s, cnt};
    }

    template <class Fn>
    void for_each_member(int c0, int c1, int R, Fn&& fn) const {
        if (g_.dim() == 1) {
            for (int d = -(R - 1); d <= R - 1; ++d) fn(static_cast<std::size_t>(g_.wrap(c0 + d)));
            return;
        }
        const long R2 = static_cast<long>(R) * R;
        const std::size_t n = static_cast<std::size_t>(cols_);
        for (int d0 = -(R - 1); d0 <= R - 1; ++d0) {
            const long rem = R2 - static_cast<long>(d0) * d0;
            int half = static_cast<int>(std::sqrt(static_cast<double>(rem)));
            while (static_cast<long>(half) * half >= rem) --half;
            const std::size_t row = static_cast<std::size_t>(g_.wrap(c0 + d0)) * n;
            for (int d1 = -half; d1 <= half; ++d1) fn(row + static_cast<std::size_t>(g_.wrap(c1 + d1)));
        }
    }

private:
    std::size_t pidx(int r, int c) const {
        return static_cast<std::size_t>(r) * (cols_ + 1) + static_cast<std::size_t>(c);
    }
    /// Inclusive circular sum over columns [a, b] of row r; b - a + 1 < n.
    double row_sum(int r, int a, int b) const {
        const int len = b - a + 1;
        const int lo = g_.wrap(a);
        if (lo + len <= cols_) return pref_[pidx(r, lo + len)] - pref_[pidx(r, lo)];
        return (pref_[pidx(r, cols_)] - pref_[pidx(r, lo)]) + pref_[pidx(r, lo + len - cols_)];
    }

    Grid g_;
    int rows_, cols_;
    std::vector<double> pref_;
};

}  // namespace detail

/// Dyadic ball family used by the Morrey norm and the ball maximal operator:
/// centers on every `stride`-th grid point per axis, radii 2^k * h for
/// 0 <= k <= log2(N/4). With stride 1 the family is closed under every
/// lattice translation, which keeps the norms exactly shift-invariant.
struct BallFamily {
    int stride = 1;
    std::vector<int> radii_cells;

    static BallFamily standard(const Grid& g, int stride = 1) {
        if (stride < 1) throw std::invalid_argument("BallFamily: stride must be >= 1");
        BallFamily fam;
        fam.stride = stride;
        for (int r = 1; r <= g.points_per_axis() / 4; r *= 2) fam.radii_cells.push_back(r);
        return fam;
    }
};

namespace detail {

inline double lebesgue_norm(const GridFunction& f, double p) {
    if (p == kInf) {
        double m = 0.0;
        for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (const auto& v : f.samples()) {
        const double a = std::abs(v);
        if (a > 0.0) acc += std::pow(a, p);
    }
    return std::pow(acc * f.grid().cell_measure(), 1.0 / p);
}

inline double morrey_norm(const GridFunction& f, double p, double q, const BallFamily& fam) {
    const Grid& g = f.grid();
    std::vector<double> powq(f.size());
    if (q == 1.0) {
        for (std::size_t i = 0; i < f.size(); ++i) powq[i] = std::abs(f[i]);
    } else if (q == 2.0) {
        for (std::size_t i = 0; i < f.size(); ++i) powq[i] = std::norm(f[i]);
    } else {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double a = std::abs(f[i]);
            powq[i] = a > 0.0 ? std::pow(a, q) : 0.0;
        }
    }
    const BallScanner scan(g, std::move(powq));
    const double hmeas = g.cell_measure();
    const int n = g.points_per_axis();
    const double expo = 1.0 / p - 1.0 / q;
    // maximize the q-th power of the functional; the ball volume depends only
    // on the radius, so its weight is precomputed once per radius
    std::vector<double> meas_weight(fam.radii_cells.size());
    for (std::size_t ri = 0; ri < fam.radii_cells.size(); ++ri) {
        const auto [s0, cnt] = scan.sum_count(n / 2, n / 2, fam.radii_cells[ri]);
        (void)s0;
        meas_weight[ri] = std::pow(static_cast<double>(cnt) * hmeas, expo * q) * hmeas;
    }
    double best_pow = 0.0;
    for (int c0 = 0; c0 < (g.dim() == 2 ? n : 1); c0 += fam.stride) {
        for (int c1 = 0; c1 < n; c1 += fam.stride) {
            for (std::size_t ri = 0; ri < fam.radii_cells.size(); ++ri) {
                const int R = fam.radii_cells[ri];
                const auto [s, cnt] =
                    g.dim() == 1 ? scan.sum_count(c1, 0, R) : scan.sum_count(c0, c1, R);
                (void)cnt;
                best_pow = std::max(best_pow, meas_weight[ri] * s);
            }
        }
    }
    return best_pow > 0.0 ? std::pow(best_pow, 1.0 / q) : 0.0;
}

}  // namespace detail

/// Norm of f in the space described by spec. Lebesgue and Lorentz are exact
/// on the samples; Morrey takes the maximum over the given ball family.
inline double x_norm(const GridFunction& f, const SpaceSpec& spec,
                     const BallFamily* family = nullptr) {
    switch (spec.family) {
        case SpaceSpec::Family::lebesgue:
            return detail::lebesgue_norm(f, spec.p);
        case SpaceSpec::Family::lorentz: {
            const auto r = decreasing_rearrangement(f);
            return detail::lorentz_from_steps(r.values, r.weights, spec.p, spec.q);
        }
        case SpaceSpec::Family::morrey: {
            if (family) return detail::morrey_norm(f, spec.p, spec.q, *family);
            const auto fam = BallFamily::standard(f.grid());
            return detail::morrey_norm(f, spec.p, spec.q, fam);
        }
    }
    throw std::logic_error("x_norm: unknown family");
}

/// Holder pairing for X = L^p, X' = L^{p'}: returns (integral of |fg|,
/// ||f||_p * ||g||_{p'}). The contract lhs <= rhs*(1+1e-10) is the caller's
/// check; this only evaluates the two sides.
inline std::pair<double, double> holder_pair_check(const GridFunction& f, const GridFunction& g,
                                                   double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("holder_pair_check: need 1 <= p <= inf");
    if (f.grid() != g.grid()) throw std::invalid_argument("holder_pair_check: grid mismatch");
    double lhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) lhs += std::abs(f[i]) * std::abs(g[i]);
    lhs *= f.grid().cell_measure();
    const double pc = p == kInf ? 1.0 : (p == 1.0 ? kInf : p / (p - 1.0));
    const double rhs = detail::lebesgue_norm(f, p) * detail::lebesgue_norm(g, pc);
    return {lhs, rhs};
}

/// Runs the norm-axiom battery on sampled data: lattice monotonicity,
/// monotone (Fatou) convergence of truncations, finiteness of ball
/// indicators, and the measured local-integrability constant
/// sup_f integral_B |f| / ||f||_X. Failures are recorded, not thrown.
inline ExperimentReport axiom_suite(const SpaceSpec& spec,
                                    const std::function<GridFunction(long)>& family,
                                    long count) {
    ExperimentReport rep;
    rep.suite = "axioms";
    long id = 0;

    for (long c = 0; c < count; ++c) {
        GridFunction f = family(2 * c);
        GridFunction u = family(2 * c + 1);
        const Grid& g = f.grid();

        // lattice: |g| <= |f| pointwise forces ||g|| <= ||f||
        std::vector<cdouble> damped(f.size());
        double umax = 0.0;
        for (const auto& v : u.samples()) umax = std::max(umax, std::abs(v));
        for (std::size_t i = 0; i < f.size(); ++i)
            damped[i] = f[i] * (umax > 0 ? std::abs(u[i]) / umax : 0.0);
        GridFunction fd(g, std::move(damped));
        const double nf = x_norm(f, spec);
        const double nd = x_norm(fd, spec);
        CaseRow lat;
        lat.suite = rep.suite;
        lat.case_id = id++;
        lat.params = spec.str() + ";check=lattice;case=" + std::to_string(c);
        lat.lhs = nd;
        lat.rhs = nf;
        lat.ratio = nf > 0 ? nd / nf : 0.0;
        lat.pass = nd <= nf * (1.0 + 1e-12);
        lat.anchor = "lattice-monotonicity";
        rep.add(lat);

        // Fatou: truncations f_k = min(|f|, k) increase to |f|
        double fmax = 0.0;
        for (const auto& v : f.samples()) fmax = std::max(fmax, std::abs(v));
        double prev = 0.0;
        bool monotone = true;
        double last = 0.0;
        for (int m = 1; m <= 6; ++m) {
            const double level = fmax * m / 6.0;
            std::vector<cdouble> trunc(f.size());
            for (std::size_t i = 0; i < f.size(); ++i)
                trunc[i] = std::min(std::abs(f[i]), level);
            last = x_norm(GridFunction(g, std::move(trunc)), spec);
            if (last < prev * (1.0 - 1e-12)) monotone = false;
            prev = last;
        }
        CaseRow fat;
        fat.suite = rep.suite;
        fat.case_id = id++;
        fat.params = spec.str() + ";check=fatou;case=" + std::to_string(c);
        fat.lhs = last;
        fat.rhs = nf;
        fat.ratio = nf > 0 ? last / nf : 0.0;
        fat.pass = monotone && std::abs(last - nf) <= 1e-8 * std::max(nf, 1e-300);
        fat.anchor = "fatou-monotone-convergence";
        rep.add(fat);
    }

    // ball-indicator finiteness and local integral bound on a reference ball
    GridFunction probe = family(0);
    const Grid& g = probe.grid();
    const auto fam = BallFamily::standard(g);
    int ref_cells = fam.radii_cells.front();
    for (int r : fam.radii_cells)
        if (r * g.spacing() <= 1.0) ref_cells = r;

    for (int r : fam.radii_cells) {
        const double rad = r * g.spacing();
        auto chi = sample(g, [rad](std::array<double, 2> x) {
            return (x[0] * x[0] + x[1] * x[1] < rad * rad) ? 1.0 : 0.0;
        });
        const double nb = x_norm(chi, spec);
        CaseRow row;
        row.suite = rep.suite;
        row.case_id = id++;
        row.params = spec.str() + ";check=bsi;radius=" + fmt_real(rad);
        row.lhs = nb;
        row.rhs = nb;
        row.ratio = 1.0;
        row.pass = std::isfinite(nb) && nb > 0.0;
        row.anchor = "ball-indicator-finite";
        rep.add(row);
    }

    const double rad = ref_cells * g.spacing();
    for (long c = 0; c < count; ++c) {
        GridFunction f = family(2 * c);
        std::vector<double> av(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) av[i] = std::abs(f[i]);
        const detail::BallScanner scan(g, std::move(av));
        const int n = g.points_per_axis();
        const auto [s, cnt] = g.dim() == 1 ? scan.sum_count(n / 2, 0, ref_cells)
                                           : scan.sum_count(n / 2, n / 2, ref_cells);
        const double lhsv = s * g.cell_measure();
        const double nf = x_norm(f, spec);
        CaseRow row;
        row.suite = rep.suite;
        row.case_id = id++;
        row.params = spec.str() + ";check=bli;radius=" + fmt_real(rad) + ";case=" + std::to_string(c);
        row.lhs = lhsv;
        row.rhs = nf;
        row.ratio = nf > 0 ? lhsv / nf : 0.0;
        row.pass = std::isfinite(row.ratio);
        row.anchor = "ball-local-integral";
        rep.add(row);
    }
    return rep;
}

}  // namespace bfslab
