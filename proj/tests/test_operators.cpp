#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "bfslab/operators.hpp"
#include "bfslab/random_fields.hpp"
#include "helpers.hpp"

using namespace bfslab;
using Catch::Approx;
using testutil::max_abs_diff;
using testutil::random_function;

namespace {

// Independent oracle: cyclic quadrature convolution straight from the sum
// h^n sum_j f(x - y_j) g(y_j).
GridFunction convolve_direct(const GridFunction& f, const GridFunction& g) {
    const Grid& gr = f.grid();
    const int n = gr.points_per_axis();
    std::vector<cdouble> out(gr.size(), cdouble{0.0, 0.0});
    if (gr.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            cdouble acc{0.0, 0.0};
            for (int j = 0; j < n; ++j)
                acc += f[static_cast<std::size_t>(gr.wrap(i - j + n / 2))] *
                       g[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = acc * gr.cell_measure();
        }
    } else {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                cdouble acc{0.0, 0.0};
                for (int j0 = 0; j0 < n; ++j0)
                    for (int j1 = 0; j1 < n; ++j1)
                        acc += f[gr.ravel(gr.wrap(i0 - j0 + n / 2), gr.wrap(i1 - j1 + n / 2))] *
                               g[gr.ravel(j0, j1)];
                out[gr.ravel(i0, i1)] = acc * gr.cell_measure();
            }
    }
    return GridFunction(gr, std::move(out));
}

int cell_with_midpoint_near(const TimeGrid& tg, double t) {
    int best = 0;
    double d = kInf;
    for (int j = 0; j < tg.cells(); ++j) {
        const double dj = std::abs(tg.midpoint(j) - t);
        if (dj < d) {
            d = dj;
            best = j;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("translate: identity, group property, norm preservation") {
    Grid g(1, 128, 4.0);
    auto f = random_function(g, 3);
    CHECK(max_abs_diff(translate(f, {0, 0}), f) == 0.0);
    CHECK(max_abs_diff(translate(translate(f, {37, 0}), {-37, 0}), f) == 0.0);

    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int s = static_cast<int>(rng.bits() % 128);
        auto fz = translate(f, {s, 0});
        for (const auto& spec : {SpaceSpec::lebesgue(2.0), SpaceSpec::lorentz(2.0, 1.0),
                                 SpaceSpec::morrey(2.0, 1.0)}) {
            CHECK(x_norm(fz, spec) == Approx(x_norm(f, spec)).epsilon(1e-12));
        }
    }

    // off-lattice shifts are rounded and the rounding recorded
    auto r = translate_rounded(f, {0.3 * g.spacing(), 0.0});
    CHECK(r.cells[0] == 0);
    CHECK(r.rounding[0] == Approx(0.3 * g.spacing()));
}

TEST_CASE("convolve agrees with the direct cyclic sum") {
    Grid g(1, 64, 4.0);
    auto f = random_function(g, 8);
    auto h = random_function(g, 9);
    auto fast = convolve(f, h);
    auto slow = convolve_direct(f, h);
    CHECK(max_abs_diff(fast, slow) < 1e-10);

    Grid g2(2, 16, 2.0);
    auto f2 = random_function(g2, 10);
    auto h2 = random_function(g2, 11);
    CHECK(max_abs_diff(convolve(f2, h2), convolve_direct(f2, h2)) < 1e-10);

    Grid other(1, 128, 4.0);
    CHECK_THROWS_AS(convolve(f, random_function(other, 1)), std::invalid_argument);
}

TEST_CASE("convolve: discrete identity element and commutativity") {
    Grid g(1, 128, 4.0);
    auto f = random_function(g, 12);
    std::vector<cdouble> d(g.size(), cdouble{0.0, 0.0});
    d[static_cast<std::size_t>(g.points_per_axis() / 2)] = 1.0 / g.cell_measure();  // unit mass at 0
    GridFunction delta(g, std::move(d));
    CHECK(max_abs_diff(convolve(f, delta), f) < 1e-12);

    auto h = random_function(g, 13);
    CHECK(max_abs_diff(convolve(f, h), convolve(h, f)) < 1e-12);
}

TEST_CASE("convolve: tent function from box indicators") {
    // h = 1/17 puts the box edges +-1/2 half a cell off the lattice, so the
    // midpoint quadrature of the indicator is exact.
    const int n = 256;
    const double h = 1.0 / 17.0;
    Grid g(1, n, n * h / 2.0);
    auto box = sample(g, [](double x) { return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0; });
    auto tent = convolve(box, box);
    CHECK(tent[static_cast<std::size_t>(n / 2)].real() == Approx(1.0).margin(1e-10));
    // tent profile (1 - |x|)+ at lattice points away from the kink
    const double x1 = g.coord(n / 2 + 5);
    CHECK(tent[static_cast<std::size_t>(n / 2 + 5)].real() == Approx(1.0 - x1).margin(1e-10));
}

TEST_CASE("young_ratio: identity, L2 sweep, Morrey sweep") {
    Grid g(1, 64, 4.0);
    std::vector<cdouble> d(g.size(), cdouble{0.0, 0.0});
    d[static_cast<std::size_t>(g.points_per_axis() / 2)] = 1.0 / g.cell_measure();
    GridFunction delta(g, std::move(d));
    auto f0 = random_function(g, 20);
    CHECK(young_ratio(f0, delta, SpaceSpec::lebesgue(2.0)) == Approx(1.0).epsilon(1e-12));

    for (unsigned s = 0; s < 20; ++s) {
        auto f = abs_field(random_function(g, 600 + s));
        auto h = abs_field(random_function(g, 700 + s));
        const double r = young_ratio(f, h, SpaceSpec::lebesgue(2.0));
        CHECK(r <= 1.0 + 1e-8);
        // oracle route: same ratio from the direct-sum convolution
        const double r2 = x_norm(convolve_direct(f, h), SpaceSpec::lebesgue(2.0)) /
                          (x_norm(f, SpaceSpec::lebesgue(2.0)) *
                           x_norm(h, SpaceSpec::lebesgue(1.0)));
        CHECK(r == Approx(r2).epsilon(1e-10));
    }

    double sup = 0.0;
    for (unsigned s = 0; s < 20; ++s) {
        auto f = random_function(g, 800 + s);
        auto h = random_function(g, 900 + s);
        sup = std::max(sup, young_ratio(f, h, SpaceSpec::morrey(2.0, 1.0)));
    }
    CHECK(sup <= 1.0 + 1e-6);

    CHECK_THROWS_AS(young_ratio(GridFunction::zero(g), delta, SpaceSpec::lebesgue(2.0)),
                    std::invalid_argument);

    // L1 Young with constant 1
    for (unsigned s = 0; s < 10; ++s) {
        auto f = abs_field(random_function(g, 950 + s));
        auto h = abs_field(random_function(g, 960 + s));
        CHECK(young_ratio(f, h, SpaceSpec::lebesgue(1.0)) <= 1.0 + 1e-10);
    }
}

TEST_CASE("box mollifier: mass, support, resolvability") {
    Grid g(1, 512, 8.0);  // h = 1/32
    for (int k : {2, 4, 8, 16, 32}) {
        auto gk = make_box_mollifier(k, {64, 0}, g);
        CHECK(integrate(gk) == Approx(1.0).epsilon(1e-14));
        long cnt = 0;
        for (const auto& v : gk.samples())
            if (std::abs(v) > 0) ++cnt;
        CHECK(std::abs(cnt * g.cell_measure() - 1.0 / k) <= g.spacing() + 1e-15);
        // support inside z + [0, 1/k)
        const double z = 64 * g.spacing();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(gk[i]) == 0.0) continue;
            double o = std::fmod(g.point(i)[0] - z, 2 * g.half_width());
            if (o < 0) o += 2 * g.half_width();
            CHECK(o < 1.0 / k);
        }
    }
    CHECK_THROWS_AS(make_box_mollifier(64, {0, 0}, g), std::invalid_argument);

    Grid g2(2, 64, 2.0);  // h = 1/16
    auto gk2 = make_box_mollifier(4, {3, -5}, g2);
    CHECK(integrate(gk2) == Approx(1.0).epsilon(1e-14));
    long cnt2 = 0;
    for (const auto& v : gk2.samples())
        if (std::abs(v) > 0) ++cnt2;
    CHECK(std::abs(cnt2 * g2.cell_measure() - 1.0 / 16.0) <= 2 * g2.spacing());
}

TEST_CASE("mollifier reconstruction error decreases in k") {
    Grid g(1, 512, 8.0);
    auto f = smooth_bump(g, 0.7);
    const std::array<int, 2> z{48, 0};
    auto ref = translate(f, z);
    for (const auto& spec : {SpaceSpec::lebesgue(2.0), SpaceSpec::lorentz(2.0, 1.0),
                             SpaceSpec::morrey(2.0, 1.0)}) {
        double prev = kInf;
        for (int k : {2, 4, 8, 16}) {
            auto conv = convolve(f, make_box_mollifier(k, z, g));
            std::vector<cdouble> diff(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) diff[i] = conv[i] - ref[i];
            const double err = x_norm(GridFunction(g, std::move(diff)), spec);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("converse Young reconstruction converges to 1") {
    Grid g(1, 1024, 8.0);
    auto f = smooth_bump(g, 0.5);
    for (const auto& spec : {SpaceSpec::lebesgue(2.0), SpaceSpec::lorentz(2.0, 1.0),
                             SpaceSpec::morrey(2.0, 1.0)}) {
        auto rep = converse_young_check(f, {32, 0}, spec, {2, 4, 8, 16}, 1e-3);
        CHECK(rep.aggregate.violations == 0);
        CHECK(std::abs(rep.rows.back().ratio - 1.0) <= 1e-3);
    }

    // averaging contracts: ||f * g_k|| <= ||f|| for an indicator at z = 0
    auto box = sample(g, [](double x) { return (x >= -1.0 && x < 1.0) ? 1.0 : 0.0; });
    for (int k : {2, 4, 8}) {
        auto conv = convolve(box, make_box_mollifier(k, {0, 0}, g));
        CHECK(x_norm(conv, SpaceSpec::lebesgue(2.0)) <=
              x_norm(box, SpaceSpec::lebesgue(2.0)) * (1.0 + 1e-12));
    }

    CHECK_THROWS_AS(converse_young_check(f, {0, 0}, SpaceSpec::lebesgue(2.0), {4, 2}),
                    std::invalid_argument);
}

TEST_CASE("half-line maximal operator") {
    auto tg = TimeGrid::geometric(8.0, 128);
    CHECK(tg.boundary(0) == 0.0);
    CHECK(tg.boundary(1) <= 1e-3);
    CHECK(tg.total() == 8.0);
    double sum = 0.0;
    for (int j = 0; j < tg.cells(); ++j) sum += tg.width(j);
    CHECK(sum == Approx(8.0).epsilon(1e-12));

    // constant function: M c = c
    HalfLineFunction cf(tg, std::vector<double>(128, 2.5));
    auto M = hl_maximal_halfline(cf);
    for (double v : M.values) CHECK(v == Approx(2.5).epsilon(1e-13));

    // chi_(0,1): M chi (t) = 1/t for t > 1, resolved to one cell
    std::vector<double> chi(128);
    for (int j = 0; j < 128; ++j) chi[static_cast<std::size_t>(j)] = tg.midpoint(j) < 1.0 ? 1.0 : 0.0;
    HalfLineFunction f(tg, chi);
    const int cell2 = cell_with_midpoint_near(tg, 2.0);
    const double t2 = tg.midpoint(cell2);
    CHECK(std::abs(hl_maximal_at(f, cell2) - 1.0 / t2) <= tg.width(cell2));

    // M f >= f pointwise (single-cell interval)
    Rng rng(31);
    HalfLineFunction rf(tg, random_step_values(128, rng));
    auto Mr = hl_maximal_halfline(rf);
    for (int j = 0; j < 128; ++j)
        CHECK(Mr.values[static_cast<std::size_t>(j)] >=
              rf.values[static_cast<std::size_t>(j)] * (1.0 - 1e-13));

    // sublinearity
    HalfLineFunction rg(tg, random_step_values(128, rng));
    std::vector<double> sum_v(128);
    for (int j = 0; j < 128; ++j)
        sum_v[static_cast<std::size_t>(j)] =
            rf.values[static_cast<std::size_t>(j)] + rg.values[static_cast<std::size_t>(j)];
    auto Ms = hl_maximal_halfline(HalfLineFunction(tg, sum_v));
    auto Mg = hl_maximal_halfline(rg);
    for (int j = 0; j < 128; ++j)
        CHECK(Ms.values[static_cast<std::size_t>(j)] <=
              (Mr.values[static_cast<std::size_t>(j)] + Mg.values[static_cast<std::size_t>(j)]) *
                  (1.0 + 1e-12));

    CHECK_THROWS_AS(hl_maximal_halfline(HalfLineFunction(tg, std::vector<double>(128, -1.0))),
                    std::invalid_argument);
}

TEST_CASE("exponential kernel bound") {
    auto tg = TimeGrid::geometric(8.0, 256);

    // constant f: lhs = 1 - e^{-a t} <= 1 <= (1 + e^{-1}) M f(t)
    HalfLineFunction one(tg, std::vector<double>(256, 1.0));
    const int cell = cell_with_midpoint_near(tg, 3.0);
    const double t = tg.midpoint(cell);
    for (double a : {0.3, 2.0, 50.0}) {
        auto [lhs, rhs] = exp_kernel_bound_check(a, one, cell);
        CHECK(lhs == Approx(1.0 - std::exp(-a * t)).epsilon(1e-12));
        CHECK(rhs == Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
        CHECK(lhs <= rhs * (1.0 + 1e-10));
    }

    // mass concentrated near t with a large: lhs close to the captured mass
    std::vector<double> near(256, 0.0);
    for (int j = 0; j < 256; ++j)
        if (tg.midpoint(j) > 0.8 * t && tg.midpoint(j) < t) near[static_cast<std::size_t>(j)] = 1.0;
    HalfLineFunction fn(tg, near);
    auto [lhs_n, rhs_n] = exp_kernel_bound_check(100.0, fn, cell);
    CHECK(lhs_n <= rhs_n * (1.0 + 1e-10));

    // randomized sweep
    long violations = 0;
    double sup = 0.0;
    for (int c = 0; c < 200; ++c) {
        Rng rng(mix_seed(99, static_cast<std::uint64_t>(c)));
        HalfLineFunction f(tg, random_step_values(256, rng));
        const double a = rng.uniform(0.1, 100.0);
        const int at = static_cast<int>(rng.bits() % 256);
        auto [lhs, rhs] = exp_kernel_bound_check(a, f, at);
        if (lhs > rhs * (1.0 + 1e-10)) ++violations;
        if (rhs > 0) sup = std::max(sup, lhs / rhs * (1.0 + std::exp(-1.0)));
    }
    CHECK(violations == 0);
    CHECK(sup <= 1.0 + std::exp(-1.0));
}

TEST_CASE("grid maximal operator over the ball family") {
    Grid g(1, 64, 4.0);
    auto one = sample(g, [](double) { return 1.0; });
    auto M1 = hl_maximal_grid(one);
    for (const auto& v : M1.samples()) CHECK(v.real() == Approx(1.0).epsilon(1e-13));

    // spike: brute-force oracle over the family
    std::vector<cdouble> sp(g.size(), cdouble{0.0, 0.0});
    sp[20] = 1.0;
    GridFunction spike(g, std::move(sp));
    auto Ms = hl_maximal_grid(spike);
    const auto fam = BallFamily::standard(g);
    for (int i = 0; i < g.points_per_axis(); ++i) {
        double expect = 0.0;
        for (int c = 0; c < g.points_per_axis(); ++c) {
            for (int R : fam.radii_cells) {
                // ball membership: |d| < R cells
                auto member = [&](int idx) {
                    int d = std::abs(idx - c);
                    d = std::min(d, g.points_per_axis() - d);
                    return d < R;
                };
                if (member(i) && member(20)) expect = std::max(expect, 1.0 / (2 * R - 1));
            }
        }
        CHECK(Ms[static_cast<std::size_t>(i)].real() == Approx(expect).margin(1e-14));
    }

    // M f >= |f| and translation equivariance
    auto f = abs_field(random_function(g, 55));
    auto Mf = hl_maximal_grid(f);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(Mf[i].real() >= std::abs(f[i]) * (1.0 - 1e-13));
    auto lhs = hl_maximal_grid(translate(f, {11, 0}));
    auto rhs = translate(Mf, {11, 0});
    CHECK(max_abs_diff(lhs, rhs) < 1e-13);
}

TEST_CASE("fourier multiplier") {
    Grid g(1, 256, 8.0);
    const Grid d = g.dual();
    auto f = random_function(g, 70);

    auto ident = sample(d, [](double) { return 1.0; });
    CHECK(max_abs_diff(fourier_multiplier(ident, f), f) < 1e-12);

    // |xi|^2 on a DFT eigenfunction
    const double omega = 16 * d.spacing();
    auto sine = sample(g, [omega](double x) { return std::sin(omega * x); });
    auto sym = sample(d, [](double xi) { return xi * xi; });
    auto out = fourier_multiplier(sym, sine);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(out[i] - omega * omega * sine[i]) < 1e-10 * omega * omega);

    // composition
    auto s1 = sample(d, [](double xi) { return std::cos(xi); });
    auto s2 = sample(d, [](double xi) { return 1.0 / (1.0 + xi * xi); });
    auto both = sample(d, [](double xi) { return std::cos(xi) / (1.0 + xi * xi); });
    auto a = fourier_multiplier(s1, fourier_multiplier(s2, f));
    auto b = fourier_multiplier(both, f);
    CHECK(max_abs_diff(a, b) < 1e-12);

    auto bad = sample(g, [](double) { return 1.0; });  // spatial grid, not the dual
    CHECK_THROWS_AS(fourier_multiplier(bad, f), std::invalid_argument);
}

TEST_CASE("heat semigroup") {
    Grid g(1, 512, 10.0);
    auto f = random_function(g, 80);
    CHECK(max_abs_diff(heat_semigroup(f, 0.0), f) == 0.0);
    CHECK_THROWS_AS(heat_semigroup(f, -0.1), std::invalid_argument);

    CHECK(std::abs(integrate_complex(heat_semigroup(f, 1.7)) - integrate_complex(f)) < 1e-10);

    // semigroup property
    auto one_step = heat_semigroup(f, 0.9);
    CHECK(max_abs_diff(heat_semigroup(heat_semigroup(f, 0.4), 0.5), heat_semigroup(f, 0.9)) <
          1e-10);

    // closed-form Gaussian evolution
    const double s = 0.5, t = 1.0;
    auto gauss = sample(g, [s](double x) { return std::exp(-x * x / (4.0 * s)); });
    auto evolved = heat_semigroup(gauss, t);
    const double amp = std::sqrt(s / (s + t));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i)[0];
        if (std::abs(x) > 0.5 * g.half_width()) continue;
        CHECK(evolved[i].real() == Approx(amp * std::exp(-x * x / (4.0 * (s + t)))).margin(1e-6));
    }

    // 2D
    Grid g2(2, 64, 6.0);
    auto gauss2 = sample(g2, [s](double x, double y) { return std::exp(-(x * x + y * y) / (4.0 * s)); });
    auto ev2 = heat_semigroup(gauss2, t);
    const double amp2 = s / (s + t);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const auto p = g2.point(i);
        if (p[0] * p[0] + p[1] * p[1] > 9.0) continue;
        CHECK(ev2[i].real() ==
              Approx(amp2 * std::exp(-(p[0] * p[0] + p[1] * p[1]) / (4.0 * (s + t)))).margin(1e-6));
    }
}
