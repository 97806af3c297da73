#include <catch2/catch_amalgamated.hpp>

#include "qflow/geometry.hpp"
#include "qflow/harmonics.hpp"
#include "qflow/oracle.hpp"
#include "qflow/spheregrid.hpp"
#include "qflow/symfun.hpp"

#include <cmath>
#include <random>

using namespace qflow;
using geometry::Hypersurface;
using grid::ScalarField;

namespace {

Hypersurface sphere_surface(const grid::GridPtr& g, double radius)
{
    ScalarField u = grid::make_field(g, [radius](double, double) { return radius - 1.0; });
    return geometry::make_hypersurface(std::move(u));
}

Hypersurface harmonic_surface(const grid::GridPtr& g, int l, int m, double amp)
{
    ScalarField u = grid::make_field(g, [&](double t, double p) {
        return amp * harmonics::real_harmonic(l, m, t, p);
    });
    return geometry::make_hypersurface(std::move(u));
}

Hypersurface spheroid_surface(const grid::GridPtr& g, const oracle::SpheroidSpec& s)
{
    ScalarField u = grid::make_field(g, [&](double t, double) {
        return oracle::spheroid_radius(s, t) - 1.0;
    });
    return geometry::make_hypersurface(std::move(u));
}

/// Random n-symmetric band-limited surface scaled to a C2 target.
Hypersurface random_even_surface(const grid::GridPtr& g, std::mt19937_64& rng, double c2_target,
                                 int l_hi = 4)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    harmonics::HarmonicSpectrum s;
    s.dim = 2;
    s.l_max = l_hi;
    s.coeff.assign(static_cast<std::size_t>(s.count()), 0.0);
    for (int l = 2; l <= l_hi; l += 2)
        for (int m = 0; m <= l; m += 2)
            s.coeff[static_cast<std::size_t>(s.index(l, m))] = dist(rng) / (1.0 + l * l);
    ScalarField u = harmonics::synthesize(s, g);
    const auto norms = grid::sup_norms(u);
    const double scale = norms.c2 > 0 ? c2_target / norms.c2 : 0.0;
    for (double& v : u.values) v *= scale;
    return geometry::make_hypersurface(std::move(u));
}

}  // namespace

TEST_CASE("curvature_bundle: spheres are exact")
{
    const auto g = grid::build_grid(2, 32, 64);

    const auto b0 = geometry::curvature_bundle(sphere_surface(g, 1.0));
    for (int id = 0; id < g->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        REQUIRE(std::abs(b0.h_tt[i] - 1.0) <= 1e-12);
        REQUIRE(std::abs(b0.h_pp[i] - 1.0) <= 1e-12);
        REQUIRE(std::abs(b0.h_tp[i]) <= 1e-12);
        REQUIRE(std::abs(b0.sigma[1][i] - 2.0) <= 1e-12);
        REQUIRE(std::abs(b0.sigma[2][i] - 1.0) <= 1e-12);
        REQUIRE(std::abs(b0.area_element[i] - 1.0) <= 1e-12);
    }

    const double c = 0.2;
    const auto bc = geometry::curvature_bundle(sphere_surface(g, 1.0 + c));
    for (int id = 0; id < g->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        REQUIRE(std::abs(bc.kappa1[i] - 1.0 / (1.0 + c)) <= 1e-8);
        REQUIRE(std::abs(bc.kappa2[i] - 1.0 / (1.0 + c)) <= 1e-8);
        REQUIRE(std::abs(bc.sigma[2][i] - 1.0 / ((1.0 + c) * (1.0 + c))) <= 1e-8);
    }

    ScalarField bad = grid::make_field(g, [](double, double) { return -1.5; });
    CHECK_THROWS_AS(geometry::curvature_bundle(geometry::make_hypersurface(std::move(bad))),
                    std::domain_error);
}

TEST_CASE("curvature_bundle: spheroid principal curvatures match the closed form")
{
    const auto g = grid::build_grid(2, 64, 128);
    const oracle::SpheroidSpec s{1.0, 1.1};
    const auto b = geometry::curvature_bundle(spheroid_surface(g, s));
    for (int i = 0; i < g->n_lat; ++i) {
        const auto pc = oracle::spheroid_curvatures(s, g->theta[static_cast<std::size_t>(i)]);
        const double hi = std::max(pc.meridian, pc.parallel);
        const double lo = std::min(pc.meridian, pc.parallel);
        for (int j = 0; j < g->n_lon; ++j) {
            const std::size_t id = static_cast<std::size_t>(g->index(i, j));
            REQUIRE(std::abs(b.kappa1[id] - hi) <= 1e-5);
            REQUIRE(std::abs(b.kappa2[id] - lo) <= 1e-5);
        }
    }
}

TEST_CASE("sigma from eigenvalues equals sigma of the shape-operator matrix")
{
    const auto g = grid::build_grid(2, 16, 32);
    std::mt19937_64 rng(40);
    const auto m = random_even_surface(g, rng, 0.25);
    const auto b = geometry::curvature_bundle(m);
    for (int id = 0; id < g->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        Eigen::MatrixXd h(2, 2);
        h << b.h_tt[i], b.h_tp[i], b.h_pt[i], b.h_pp[i];
        for (int k = 0; k <= 2; ++k) {
            const double via_matrix = symfun::sigma_k_matrix(h, k);
            REQUIRE(std::abs(via_matrix - b.sigma[static_cast<std::size_t>(k)][i]) <= 1e-10);
        }
    }
}

TEST_CASE("quermass_integral: spheres and scaling")
{
    const auto g = grid::build_grid(2, 32, 64);
    const auto unit = sphere_surface(g, 1.0);
    CHECK(geometry::quermass_integral(unit, -1) == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
    CHECK(geometry::quermass_integral(unit, 0) == Catch::Approx(4.0 * M_PI).epsilon(1e-12));
    CHECK(geometry::quermass_integral(unit, 1) == Catch::Approx(8.0 * M_PI).epsilon(1e-12));
    CHECK(geometry::quermass_integral(unit, 2) == Catch::Approx(4.0 * M_PI).epsilon(1e-12));

    for (double radius : {0.8, 1.7}) {
        const auto m = sphere_surface(g, radius);
        for (int k = -1; k <= 2; ++k) {
            const double expect = k == -1
                                      ? 4.0 * M_PI / 3.0 * std::pow(radius, 3)
                                      : symfun::binomial(2, k) * std::pow(radius, 2 - k) * 4.0 * M_PI;
            REQUIRE(geometry::quermass_integral(m, k) == Catch::Approx(expect).epsilon(1e-8));
        }
    }
}

TEST_CASE("quermass_integral: spheroid against the 1-D oracle")
{
    const oracle::SpheroidSpec s{1.0, 1.1};
    const auto g = grid::build_grid(2, 64, 128);
    const auto m = spheroid_surface(g, s);
    for (int k : {0, 1}) {
        const double ref = oracle::spheroid_reference(s, k);
        REQUIRE(std::abs(geometry::quermass_integral(m, k) - ref) <= 1e-4 * ref);
    }
    CHECK(geometry::quermass_integral(m, -1) ==
          Catch::Approx(oracle::spheroid_reference(s, -1)).epsilon(1e-10));
}

TEST_CASE("dilation covariance of the quermass integrals")
{
    const auto g = grid::build_grid(2, 32, 64);
    std::mt19937_64 rng(41);
    const auto m = random_even_surface(g, rng, 0.2);
    const double lambda = 1.37;
    Hypersurface scaled = m;
    for (double& v : scaled.u.values) v = lambda * (1.0 + v) - 1.0;
    for (int k = -1; k <= 2; ++k) {
        const double a = geometry::quermass_integral(m, k);
        const double b = geometry::quermass_integral(scaled, k);
        const double power = k == -1 ? 3.0 : 2.0 - k;
        REQUIRE(std::abs(b - std::pow(lambda, power) * a) <= 1e-8 * std::abs(b));
    }
}

TEST_CASE("Gauss-Bonnet: total sigma_2 curvature is 4 pi on random starshaped surfaces")
{
    const auto g = grid::build_grid(2, 64, 128);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_even_surface(g, rng, 0.3);
        const double total = geometry::quermass_integral(m, 2);
        REQUIRE(std::abs(total - 4.0 * M_PI) <= 1e-6 * 4.0 * M_PI);
    }
}

TEST_CASE("barycenter")
{
    const auto g = grid::build_grid(2, 32, 64);
    CHECK(geometry::barycenter(sphere_surface(g, 1.0)).norm() <= 1e-14);

    std::mt19937_64 rng(43);
    const auto even = random_even_surface(g, rng, 0.2);
    CHECK(geometry::barycenter(even).norm() <= 1e-12);

    const double eps = 1e-4;
    const auto tilted = harmonic_surface(g, 1, 0, eps);
    const Eigen::Vector3d bar = geometry::barycenter(tilted);
    // linearization: (n+2) eps int Y10 x3 dA / |S^2|
    const double predict = 4.0 * eps * std::sqrt(4.0 * M_PI / 3.0) / (4.0 * M_PI);
    CHECK(std::abs(bar[2] - predict) <= 1e-2 * std::abs(predict));
    CHECK(std::abs(bar[0]) <= 1e-12);
    CHECK(std::abs(bar[1]) <= 1e-12);
}

TEST_CASE("symmetric_difference_centered")
{
    const auto g = grid::build_grid(2, 32, 64);
    CHECK(geometry::symmetric_difference_centered(sphere_surface(g, 1.0)) <= 1e-14);

    const double c = 0.13;
    const double expect = 4.0 * M_PI / 3.0 * (std::pow(1.0 + c, 3) - 1.0);
    CHECK(geometry::symmetric_difference_centered(sphere_surface(g, 1.0 + c)) ==
          Catch::Approx(expect).epsilon(1e-12));

    // one-signed u: the binomial-sum form agrees with the ray integral
    const auto m = harmonic_surface(g, 2, 0, 0.05);
    ScalarField shifted = m.u;
    for (double& v : shifted.values) v = std::abs(v);  // u >= 0
    const auto mp = geometry::make_hypersurface(shifted);
    double binom_sum = 0.0;
    for (std::size_t i = 0; i < shifted.values.size(); ++i) {
        const double a = std::abs(shifted.values[i]);
        double term = 0.0;
        for (int k = 1; k <= 3; ++k) term += symfun::binomial(3, k) * std::pow(a, k) / 3.0;
        binom_sum += g->weight[i] * term;
    }
    CHECK(geometry::symmetric_difference_centered(mp) == Catch::Approx(binom_sum).epsilon(1e-12));

    // sign-changing u: direct re-evaluation of the ray integral
    double direct = 0.0;
    for (std::size_t i = 0; i < m.u.values.size(); ++i)
        direct += g->weight[i] * std::abs(std::pow(1.0 + m.u.values[i], 3) - 1.0) / 3.0;
    CHECK(geometry::symmetric_difference_centered(m) == Catch::Approx(direct).epsilon(1e-10));
}

TEST_CASE("fraenkel_asymmetry: balls")
{
    const auto g = grid::build_grid(2, 32, 64);
    const auto centered = geometry::fraenkel_asymmetry(sphere_surface(g, 1.2));
    CHECK(centered.alpha <= 1e-9);

    // unit ball centered at (0, 0, 0.1), written as a radial graph over the origin
    const Eigen::Vector3d c(0.0, 0.0, 0.1);
    ScalarField u = grid::make_field(g, [&](double t, double) {
        const double ct = std::cos(t);
        const double beta = 0.1 * ct;
        return beta + std::sqrt(1.0 - 0.01 + beta * beta) - 1.0;
    });
    const auto m = geometry::make_hypersurface(std::move(u));
    const auto res = geometry::fraenkel_asymmetry(m);
    CHECK(res.optimizer_ok);
    CHECK(res.alpha <= 1e-6);
    CHECK((res.center - c).norm() <= 1e-4);
}

TEST_CASE("fraenkel_asymmetry: even surfaces minimize at the origin")
{
    const auto g = grid::build_grid(2, 32, 64);
    const auto m = harmonic_surface(g, 2, 0, 0.05);
    const auto res = geometry::fraenkel_asymmetry(m);
    CHECK(res.optimizer_ok);
    // the basin is quadratic and flat near the center, so the argmin is soft
    CHECK(res.center.norm() <= 2e-3);

    // centered value: symmetric difference against the centered equal-volume ball
    const double vol = geometry::quermass_integral(m, -1);
    const double radius = std::pow(3.0 * vol / (4.0 * M_PI), 1.0 / 3.0);
    double overlap = 0.0;
    for (std::size_t i = 0; i < m.u.values.size(); ++i)
        overlap += g->weight[i] * std::pow(std::min(1.0 + m.u.values[i], radius), 3) / 3.0;
    const double centered_alpha = 2.0 * (vol - overlap) / vol;
    CHECK(res.alpha <= centered_alpha + 1e-10);
    CHECK(res.alpha == Catch::Approx(centered_alpha).epsilon(1e-4));
}

TEST_CASE("deficit: spheres, scaling invariance, quantitative bound sample")
{
    const auto g = grid::build_grid(2, 32, 64);
    for (double radius : {0.9, 1.0, 1.4}) {
        const auto m = sphere_surface(g, radius);
        for (int k = 0; k <= 2; ++k)
            for (int j = -1; j < k; ++j)
                REQUIRE(std::abs(geometry::deficit(m, k, j)) <= 1e-10);
    }

    std::mt19937_64 rng(44);
    const auto m = random_even_surface(g, rng, 0.2);
    Hypersurface scaled = m;
    for (double& v : scaled.u.values) v = 1.31 * (1.0 + v) - 1.0;
    for (int k = 1; k <= 2; ++k) {
        for (int j = -1; j < k; ++j) {
            const double d0 = geometry::deficit(m, k, j);
            const double d1 = geometry::deficit(scaled, k, j);
            REQUIRE(std::abs(d1 - d0) <= 1e-8 * std::max(1.0, std::abs(d0)));
        }
    }

    // quantitative isoperimetric-type bound, one nearly spherical sample
    const auto g64 = grid::build_grid(2, 64, 128);
    std::mt19937_64 rng2(45);
    auto small = random_even_surface(g64, rng2, 0.05);
    small = geometry::normalize_quermass(small, 0);
    const double delta = geometry::deficit(small, 1, 0);
    const double alpha = geometry::fraenkel_asymmetry(small).alpha;
    CHECK(delta >= (1.0 / 18.0 - 0.01) * alpha * alpha);
}

TEST_CASE("normalize_quermass")
{
    const auto g = grid::build_grid(2, 32, 64);
    const auto m2 = sphere_surface(g, 2.0);
    const auto unit = geometry::normalize_quermass(m2, 0);
    for (double v : unit.u.values) REQUIRE(std::abs(v) <= 1e-12);

    std::mt19937_64 rng(46);
    const auto m = random_even_surface(g, rng, 0.2);
    const auto once = geometry::normalize_quermass(m, 0);
    const auto twice = geometry::normalize_quermass(once, 0);
    for (std::size_t i = 0; i < once.u.values.size(); ++i)
        REQUIRE(std::abs(once.u.values[i] - twice.u.values[i]) <= 1e-12);
    CHECK(geometry::quermass_integral(once, 0) == Catch::Approx(4.0 * M_PI).epsilon(1e-10));

    const auto y = harmonic_surface(g, 2, 0, 0.05);
    const auto ny = geometry::normalize_quermass(y, 0);
    CHECK(geometry::quermass_integral(ny, 0) == Catch::Approx(4.0 * M_PI).epsilon(1e-9));

    const auto nvol = geometry::normalize_quermass(y, -1);
    CHECK(geometry::quermass_integral(nvol, -1) ==
          Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
}

TEST_CASE("stability_functional_A")
{
    const auto g = grid::build_grid(2, 32, 64);
    CHECK(geometry::stability_functional_A(sphere_surface(g, 1.0), 1) == 0.0);

    // ||u||^2 = 1, ||grad u||^2 = 2 -> A = C(2,1) (1/4) (1 + 1) = 1
    const auto y1 = harmonic_surface(g, 1, 0, 1.0);
    CHECK(geometry::stability_functional_A(y1, 1) == Catch::Approx(1.0).epsilon(1e-9));

    const auto y = harmonic_surface(g, 2, 0, 0.05);
    const double a1 = geometry::stability_functional_A(y, 1);
    Hypersurface doubled = y;
    for (double& v : doubled.u.values) v *= 2.0;
    CHECK(geometry::stability_functional_A(doubled, 1) == Catch::Approx(4.0 * a1).epsilon(1e-12));

    CHECK_THROWS_AS(geometry::stability_functional_A(y, 2), std::domain_error);
}

TEST_CASE("linearization_residual_sigma")
{
    const auto g = grid::build_grid(2, 48, 96);
    CHECK(geometry::linearization_residual_sigma(sphere_surface(g, 1.0), 2) <= 1e-12);
    CHECK(geometry::linearization_residual_sigma(harmonic_surface(g, 2, 0, 0.05), 1) <= 1e-12);

    const double r1 = geometry::linearization_residual_sigma(harmonic_surface(g, 2, 0, 0.04), 2);
    const double r2 = geometry::linearization_residual_sigma(harmonic_surface(g, 2, 0, 0.02), 2);
    CHECK(r2 / r1 >= 0.15);
    CHECK(r2 / r1 <= 0.35);
}

TEST_CASE("shape_report assembles all quantities")
{
    const auto g = grid::build_grid(2, 32, 64);
    const auto rep = geometry::shape_report(harmonic_surface(g, 2, 0, 0.05));
    CHECK(rep.quermass_at(-1) > 0.0);
    CHECK(rep.quermass_at(2) == Catch::Approx(4.0 * M_PI).epsilon(1e-6));
    CHECK(rep.alpha > 0.0);
    CHECK(rep.deficits.size() == 6);
    CHECK(rep.a_functional.has_value());
    CHECK(rep.norms.c0 > 0.0);
}

TEST_CASE("circle geometry: ellipse curvature and length")
{
    const auto g = grid::build_grid(1, 0, 256);
    const double a = 1.0, b = 0.8;
    ScalarField u = grid::make_field(g, [&](double t, double) {
        const double ct = std::cos(t), st = std::sin(t);
        return 1.0 / std::sqrt(ct * ct / (a * a) + st * st / (b * b)) - 1.0;
    });
    const auto m = geometry::make_hypersurface(std::move(u), 1);
    const auto bundle = geometry::curvature_bundle(m);
    for (int j = 0; j < g->n_lon; ++j) {
        const double t = g->theta[static_cast<std::size_t>(j)];
        const double w = 1.0 + m.u.values[static_cast<std::size_t>(j)];
        const double x = w * std::cos(t), y = w * std::sin(t);
        // curvature of the ellipse (a cos psi, b sin psi) expressed through (x, y)
        const double q = a * a * y * y / (b * b) + b * b * x * x / (a * a);
        const double kappa_exact = a * b / std::pow(q, 1.5);
        REQUIRE(std::abs(bundle.kappa1[static_cast<std::size_t>(j)] - kappa_exact) <= 1e-8);
    }
    // total turning
    CHECK(geometry::quermass_integral(m, 1) == Catch::Approx(2.0 * M_PI).epsilon(1e-10));
    // area of the ellipse
    CHECK(geometry::quermass_integral(m, -1) == Catch::Approx(M_PI * a * b).epsilon(1e-12));
}
