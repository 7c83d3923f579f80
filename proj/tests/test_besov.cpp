#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bfslab/besov.hpp"
#include "bfslab/random_fields.hpp"
#include "helpers.hpp"

using namespace bfslab;
using Catch::Approx;
using testutil::max_abs_diff;

namespace {

const Grid kGrid(1, 256, 16.0);  // supports j in [-3, 3]

GridFunction spectrum_field(const Grid& g, double lo, double hi, unsigned seed) {
    Rng rng(seed);
    return band_limited_field(g, lo, hi, 0.0, rng);
}

}  // namespace

TEST_CASE("lp family: construction, legality, achievable-range errors") {
    auto fam = build_lp_family(kGrid, -3, 3);
    auto rep = lp_family_legality(fam);
    CHECK(rep.aggregate.violations == 0);

    // partition sum equals 2 away from the annulus edges
    const Grid d = kGrid.dual();
    for (std::size_t m = 0; m < kGrid.size(); ++m) {
        const double r = fam.sample_radius()[m];
        if (r >= 4.0 * fam.annulus_lo() && r <= 0.25 * fam.annulus_hi())
            CHECK(fam.partition_sum()[m] == Approx(2.0).margin(1e-12));
    }

    // Phi_j * phi_j == phi_j at every sample
    for (int j = -3; j <= 3; ++j)
        for (std::size_t m = 0; m < kGrid.size(); ++m)
            CHECK(fam.Phi(j)[m] * fam.phi(j)[m] == fam.phi(j)[m]);

    CHECK_THROWS_AS(build_lp_family(kGrid, 3, 3), std::invalid_argument);
    try {
        build_lp_family(kGrid, -10, 10);
        FAIL("expected range error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("achievable range") != std::string::npos);
    }

    // 2D family at a small size
    Grid g2(2, 64, 13.0);
    auto fam2 = build_lp_family(g2, -2, 2);
    CHECK(lp_family_legality(fam2).aggregate.violations == 0);
}

TEST_CASE("lp blocks: disjoint spectra vanish, linearity") {
    auto fam = build_lp_family(kGrid, -3, 3);
    // spectrum inside B(2^{j-1}) for j = 2 -> block 2 vanishes
    auto f = spectrum_field(kGrid, 0.3, 1.9, 5);
    auto blk = lp_block(f, fam, 2);
    CHECK(l2_norm(blk) <= 1e-12 * l2_norm(f));

    auto a = spectrum_field(kGrid, 0.5, 8.0, 6);
    auto b = spectrum_field(kGrid, 0.5, 8.0, 7);
    std::vector<cdouble> comb(kGrid.size());
    for (std::size_t i = 0; i < kGrid.size(); ++i) comb[i] = 2.0 * a[i] - 3.0 * b[i];
    auto lhs = lp_block(GridFunction(kGrid, std::move(comb)), fam, 0);
    auto ba = lp_block(a, fam, 0);
    auto bb = lp_block(b, fam, 0);
    std::vector<cdouble> rhs(kGrid.size());
    for (std::size_t i = 0; i < kGrid.size(); ++i) rhs[i] = 2.0 * ba[i] - 3.0 * bb[i];
    CHECK(max_abs_diff(lhs, GridFunction(kGrid, std::move(rhs))) < 1e-12);

    CHECK_THROWS_AS(lp_block(a, fam, 4), std::invalid_argument);
}

TEST_CASE("lp blocks: partition-sum reconstruction on the scanned region") {
    auto fam = build_lp_family(kGrid, -3, 3);
    // scan for the region where the partition sum is a constant
    double c = 0.0;
    std::vector<bool> in_region(kGrid.size(), false);
    for (std::size_t m = 0; m < kGrid.size(); ++m) {
        const double r = fam.sample_radius()[m];
        if (r >= 4.0 * fam.annulus_lo() && r <= 0.25 * fam.annulus_hi()) {
            c = fam.partition_sum()[m];
            break;
        }
    }
    long region_count = 0;
    for (std::size_t m = 0; m < kGrid.size(); ++m) {
        if (std::abs(fam.partition_sum()[m] - c) <= 1e-12) {
            in_region[m] = true;
            ++region_count;
        }
    }
    REQUIRE(region_count > 10);

    // band-limit a random spectrum to the region and reconstruct
    Rng rng(9);
    const Grid d = kGrid.dual();
    std::vector<cdouble> F(kGrid.size(), cdouble{0.0, 0.0});
    for (std::size_t m = 0; m < kGrid.size(); ++m)
        if (in_region[m]) F[m] = cdouble(rng.normal(), rng.normal());
    auto f = fft_inverse(GridFunction(d, std::move(F)));

    auto acc = GridFunction::zero(kGrid);
    std::vector<cdouble> sum(kGrid.size(), cdouble{0.0, 0.0});
    for (int j = -3; j <= 3; ++j) {
        auto blk = lp_block(f, fam, j);
        for (std::size_t i = 0; i < kGrid.size(); ++i) sum[i] += blk[i];
    }
    double scale = 0.0;
    for (const auto& v : f.samples()) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < kGrid.size(); ++i)
        CHECK(std::abs(sum[i] - c * f[i]) <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("besov norm: zero input, embedding in r, quasi-triangle") {
    auto fam = build_lp_family(kGrid, -3, 3);
    const SpaceSpec l2 = SpaceSpec::lebesgue(2.0);
    CHECK(besov_norm(GridFunction::zero(kGrid), BesovParams(0.5, 1.0, l2), fam) == 0.0);

    for (unsigned seed = 0; seed < 20; ++seed) {
        auto f = spectrum_field(kGrid, fam.annulus_lo(), fam.annulus_hi(), 100 + seed);
        for (auto [r1, r2] : {std::pair{1.0, 2.0}, {2.0, kInf}, {1.0, kInf}}) {
            const double n1 = besov_norm(f, BesovParams(0.7, r1, l2), fam);
            const double n2 = besov_norm(f, BesovParams(0.7, r2, l2), fam);
            CHECK(n2 <= n1 * (1.0 + 1e-10));
        }
    }

    for (unsigned seed = 0; seed < 10; ++seed) {
        auto f = spectrum_field(kGrid, 0.5, 8.0, 200 + seed);
        auto g = spectrum_field(kGrid, 0.5, 8.0, 300 + seed);
        std::vector<cdouble> sum(kGrid.size());
        for (std::size_t i = 0; i < kGrid.size(); ++i) sum[i] = f[i] + g[i];
        for (const auto& spec : {l2, SpaceSpec::lorentz(2.0, 1.0), SpaceSpec::morrey(2.0, 1.0)}) {
            BesovParams bp(0.0, 1.5, spec);
            CHECK(besov_norm(GridFunction(kGrid, sum), bp, fam) <=
                  (besov_norm(f, bp, fam) + besov_norm(g, bp, fam)) * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("besov norm: single-band bracket and translation invariance") {
    auto fam = build_lp_family(kGrid, -3, 3);
    const SpaceSpec l2 = SpaceSpec::lebesgue(2.0);
    Rng rng(4);
    for (int j0 : {-2, 0, 2}) {
        auto f = single_band_field(kGrid, j0, 0.0, rng);
        BesovNormInfo info;
        for (double s : {0.0, 1.0}) {
            const double nb = besov_norm(f, BesovParams(s, 1.0, l2), fam, &info);
            CHECK_FALSE(info.warned);
            double bmax = 0.0;
            for (double b : info.block_norms) bmax = std::max(bmax, b);
            CHECK(nb >= std::exp2((j0 - 1) * s) * bmax * (1.0 - 1e-12));
            CHECK(nb <= 3.0 * std::exp2((j0 + 1) * s) * bmax * (1.0 + 1e-12));
        }
        // shifts commute with the multipliers
        const double n0 = besov_norm(f, BesovParams(0.5, 2.0, l2), fam);
        auto fz = translate(f, {37, 0});
        CHECK(besov_norm(fz, BesovParams(0.5, 2.0, l2), fam) == Approx(n0).epsilon(1e-10));
    }
}

TEST_CASE("besov norm: dyadic dilation scales by 2^s in L2") {
    auto fam = build_lp_family(kGrid, -3, 3);
    const Grid d = kGrid.dual();
    const int n = kGrid.points_per_axis();
    Rng rng(17);

    // content on the shell of j0 = 0, then the same coefficients at doubled
    // frequency indices: every block norm shifts one index up exactly.
    std::vector<cdouble> F(kGrid.size(), cdouble{0.0, 0.0});
    std::vector<cdouble> F2(kGrid.size(), cdouble{0.0, 0.0});
    for (int m = 0; m < n; ++m) {
        const double r = std::abs(d.point(static_cast<std::size_t>(m))[0]);
        if (r < 2.0 || r > 4.0) continue;
        const int k = m - n / 2;
        if (std::abs(2 * k) >= n / 2) continue;
        const cdouble coeff(rng.normal(), rng.normal());
        F[static_cast<std::size_t>(m)] = coeff;
        F2[static_cast<std::size_t>(2 * k + n / 2)] = coeff;
    }
    auto f = fft_inverse(GridFunction(d, std::move(F)));
    auto f2 = fft_inverse(GridFunction(d, std::move(F2)));
    for (double s : {0.0, 1.0, -0.5}) {
        for (double r : {1.0, 2.0, kInf}) {
            BesovParams bp(s, r, SpaceSpec::lebesgue(2.0));
            const double n1 = besov_norm(f, bp, fam);
            const double n2 = besov_norm(f2, bp, fam);
            CHECK(n2 == Approx(std::exp2(s) * n1).epsilon(1e-12));
        }
    }
}

TEST_CASE("besov norm warns on out-of-band spectral mass") {
    auto fam = build_lp_family(kGrid, -3, 3);
    auto f = sample(kGrid, [](double) { return 1.0; });  // pure DC: fully outside
    BesovNormInfo info;
    besov_norm(f, BesovParams(0.0, 1.0, SpaceSpec::lebesgue(2.0)), fam, &info);
    CHECK(info.warned);
    CHECK(info.outside_mass_ratio == Approx(1.0));
}

TEST_CASE("lift operator checks") {
    auto fam = build_lp_family(kGrid, -3, 3);
    const SpaceSpec l2 = SpaceSpec::lebesgue(2.0);
    Rng rng(8);
    auto f = single_band_field(kGrid, 0, 0.0, rng);

    auto [l0, r0] = lift_check(f, 0.0, BesovParams(0.5, 1.0, l2), fam);
    CHECK(l0 == Approx(r0).epsilon(1e-12));

    // exact inverse on nonzero frequencies
    auto roundtrip = laplacian_power(laplacian_power(f, 0.75), -0.75);
    double scale = 0.0;
    for (const auto& v : f.samples()) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(roundtrip, f) <= 1e-8 * scale);

    // single-band ratio stays in a j-independent band for alpha = 1
    double cmin = kInf, cmax = 0.0;
    for (int j0 = -2; j0 <= 2; ++j0) {
        Rng r2(mix_seed(21, static_cast<std::uint64_t>(j0 + 10)));
        auto fb = single_band_field(kGrid, j0, 0.0, r2);
        auto [lhs, rhs] = lift_check(fb, 1.0, BesovParams(1.0, 1.0, l2), fam);
        const double ratio = lhs / rhs;
        CHECK(ratio >= std::pow(4.0, -2.0));
        CHECK(ratio <= std::pow(4.0, 2.0));
        cmin = std::min(cmin, ratio);
        cmax = std::max(cmax, ratio);
    }
    CHECK(cmax / cmin < 2.0);  // j-independence of the band

    CHECK_THROWS_AS(lift_check(f, 3.0, BesovParams(0.0, 1.0, l2), fam), std::invalid_argument);
}
