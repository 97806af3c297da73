#include <catch2/catch_amalgamated.hpp>

#include "qflow/harmonics.hpp"
#include "qflow/spheregrid.hpp"

#include <cmath>
#include <random>

using namespace qflow;
using grid::ScalarField;
using harmonics::HarmonicSpectrum;

namespace {

HarmonicSpectrum random_spectrum(std::mt19937_64& rng, int dim, int l_max, double amp = 1.0)
{
    std::normal_distribution<double> dist(0.0, amp);
    HarmonicSpectrum s;
    s.dim = dim;
    s.l_max = l_max;
    s.coeff.assign(static_cast<std::size_t>(s.count()), 0.0);
    s.for_each([&](int l, int m, double) {
        s.coeff[static_cast<std::size_t>(s.index(l, m))] = dist(rng) / (1.0 + l * l);
    });
    return s;
}

}  // namespace

TEST_CASE("basis orthonormality under quadrature")
{
    const auto g = grid::build_grid(2, 24, 48);
    const int pairs[][2] = {{0, 0}, {1, 0}, {1, 1}, {1, -1}, {2, 0}, {3, 2}, {5, -4}, {8, 7}};
    for (const auto& a : pairs) {
        for (const auto& b : pairs) {
            const ScalarField fa = grid::make_field(g, [&](double t, double p) {
                return harmonics::real_harmonic(a[0], a[1], t, p);
            });
            const ScalarField fb = grid::make_field(g, [&](double t, double p) {
                return harmonics::real_harmonic(b[0], b[1], t, p);
            });
            double inner = 0.0;
            for (std::size_t k = 0; k < fa.values.size(); ++k)
                inner += g->weight[k] * fa.values[k] * fb.values[k];
            const double expect = (a[0] == b[0] && a[1] == b[1]) ? 1.0 : 0.0;
            REQUIRE(std::abs(inner - expect) <= 1e-12);
        }
    }
}

TEST_CASE("analyze: pinned coefficients")
{
    const auto g = grid::build_grid(2, 32, 64);
    const ScalarField y10 = grid::make_field(g, [](double t, double p) {
        return harmonics::real_harmonic(1, 0, t, p);
    });
    const auto s = harmonics::analyze(y10, 8);
    s.for_each([&](int l, int m, double a) {
        if (l == 1 && m == 0)
            REQUIRE(std::abs(a - 1.0) <= 1e-12);
        else
            REQUIRE(std::abs(a) <= 1e-10);
    });

    const ScalarField one = grid::make_field(g, [](double, double) { return 1.0; });
    const auto s0 = harmonics::analyze(one, 4);
    REQUIRE(s0.at(0, 0) == Catch::Approx(std::sqrt(4.0 * M_PI)).epsilon(1e-13));

    CHECK_THROWS_AS(harmonics::analyze(one, 40), std::domain_error);
}

TEST_CASE("synthesize/analyze round trip on band-limited fields")
{
    std::mt19937_64 rng(5);
    const auto g = grid::build_grid(2, 32, 64);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_spectrum(rng, 2, 10);
        const ScalarField f = harmonics::synthesize(s, g);
        const auto back = harmonics::analyze(f, 10);
        for (std::size_t k = 0; k < s.coeff.size(); ++k)
            REQUIRE(std::abs(back.coeff[k] - s.coeff[k]) <= 1e-11);
        const ScalarField f2 = harmonics::synthesize(back, g);
        for (std::size_t k = 0; k < f.values.size(); ++k)
            REQUIRE(std::abs(f2.values[k] - f.values[k]) <= 1e-10);
    }
}

TEST_CASE("sobolev_norms: pinned values")
{
    HarmonicSpectrum s;
    s.dim = 2;
    s.l_max = 3;
    s.coeff.assign(16, 0.0);

    s.coeff[static_cast<std::size_t>(s.index(2, 1))] = 1.0;
    auto n = harmonics::sobolev_norms(s);
    CHECK(n.l2_sq == Catch::Approx(1.0));
    CHECK(n.grad_sq == Catch::Approx(6.0));
    CHECK(n.lap_sq == Catch::Approx(36.0));

    std::fill(s.coeff.begin(), s.coeff.end(), 0.0);
    s.coeff[static_cast<std::size_t>(s.index(1, -1))] = 1.0;
    n = harmonics::sobolev_norms(s);
    CHECK(n.l2_sq == Catch::Approx(1.0));
    CHECK(n.grad_sq == Catch::Approx(2.0));
    CHECK(n.lap_sq == Catch::Approx(4.0));

    std::fill(s.coeff.begin(), s.coeff.end(), 0.0);
    s.coeff[static_cast<std::size_t>(s.index(1, 0))] = 0.3;
    s.coeff[static_cast<std::size_t>(s.index(2, 0))] = 0.4;
    n = harmonics::sobolev_norms(s);
    CHECK(n.l2_sq == Catch::Approx(0.25));
    CHECK(n.grad_sq == Catch::Approx(1.14));
    CHECK(n.lap_sq == Catch::Approx(6.12));
}

TEST_CASE("strip_low_modes")
{
    HarmonicSpectrum s;
    s.dim = 2;
    s.l_max = 2;
    s.coeff.assign(9, 0.0);
    s.coeff[static_cast<std::size_t>(s.index(0, 0))] = 1.0;
    s.coeff[static_cast<std::size_t>(s.index(1, 0))] = 1.0;
    s.coeff[static_cast<std::size_t>(s.index(2, 0))] = 1.0;

    const auto stripped = harmonics::strip_low_modes(s, 1);
    CHECK(stripped.at(0, 0) == 0.0);
    CHECK(stripped.at(1, 0) == 0.0);
    CHECK(stripped.at(2, 0) == 1.0);

    const auto only0 = harmonics::strip_low_modes(s, 0);
    CHECK(only0.at(0, 0) == 0.0);
    CHECK(only0.at(1, 0) == 1.0);
    CHECK(only0.at(2, 0) == 1.0);

    // spectral gap after stripping l <= 1
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = harmonics::strip_low_modes(random_spectrum(rng, 2, 9), 1);
        const auto n = harmonics::sobolev_norms(r);
        if (n.grad_sq > 0.0) REQUIRE(n.lap_sq / n.grad_sq >= 6.0 - 1e-12);
    }
}

TEST_CASE("poincare_margin")
{
    HarmonicSpectrum s;
    s.dim = 2;
    s.l_max = 2;
    s.coeff.assign(9, 0.0);
    s.coeff[static_cast<std::size_t>(s.index(2, 0))] = 1.0;
    CHECK(harmonics::poincare_margin(s) == Catch::Approx(0.0).margin(1e-12));

    std::fill(s.coeff.begin(), s.coeff.end(), 0.0);
    s.coeff[static_cast<std::size_t>(s.index(1, 1))] = 1.0;
    CHECK(harmonics::poincare_margin(s) == Catch::Approx(-8.0));

    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = harmonics::strip_low_modes(random_spectrum(rng, 2, 8), 1);
        REQUIRE(harmonics::poincare_margin(r) >= -1e-10);
    }
}

TEST_CASE("Parseval and gradient-norm identities against quadrature")
{
    std::mt19937_64 rng(31);
    const auto g = grid::build_grid(2, 64, 128);
    const auto s = random_spectrum(rng, 2, 8);
    const ScalarField f = harmonics::synthesize(s, g);
    const auto n = harmonics::sobolev_norms(s);

    double l2 = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k)
        l2 += g->weight[k] * f.values[k] * f.values[k];
    CHECK(std::abs(n.l2_sq - l2) <= 1e-8 * n.l2_sq);

    const auto df = grid::gradient(f);
    const auto gn = grid::grad_norm_sq(df);
    const double grad = grid::integrate(gn);
    CHECK(std::abs(n.grad_sq - grad) <= 1e-6 * n.grad_sq);

    const auto lap = grid::laplacian(f);
    double lap2 = 0.0;
    for (std::size_t k = 0; k < lap.values.size(); ++k)
        lap2 += g->weight[k] * lap.values[k] * lap.values[k];
    CHECK(std::abs(n.lap_sq - lap2) <= 1e-6 * n.lap_sq);
}

TEST_CASE("circle harmonics: round trip and norms")
{
    const auto g = grid::build_grid(1, 0, 64);
    std::mt19937_64 rng(9);
    const auto s = random_spectrum(rng, 1, 6);
    const ScalarField f = harmonics::synthesize(s, g);
    const auto back = harmonics::analyze(f, 6);
    for (std::size_t k = 0; k < s.coeff.size(); ++k)
        REQUIRE(std::abs(back.coeff[k] - s.coeff[k]) <= 1e-12);

    HarmonicSpectrum one;
    one.dim = 1;
    one.l_max = 2;
    one.coeff.assign(5, 0.0);
    one.coeff[static_cast<std::size_t>(one.index(2, 2))] = 1.0;  // cos(2t)/sqrt(pi)
    const auto n = harmonics::sobolev_norms(one);
    CHECK(n.grad_sq == Catch::Approx(4.0));  // lambda_2 = 4 on S^1
    CHECK(harmonics::poincare_margin(one) == Catch::Approx(16.0 - 2.0 * 2.0 * 4.0));
}
