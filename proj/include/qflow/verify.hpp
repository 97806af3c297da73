#pragma once

#include "qflow/flows.hpp"
#include "qflow/geometry.hpp"
#include "qflow/harmonics.hpp"
#include "qflow/oracle.hpp"
#include "qflow/spheregrid.hpp"
#include "qflow/symfun.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace qflow::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline Check bound(const std::string& name, double value, double limit)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3e (limit %.1e)", value, limit);
    return {name, value <= limit, buf};
}

inline grid::ScalarField random_band_field(const grid::GridPtr& g, std::mt19937_64& rng, int l_hi,
                                           bool even_only, double c2_target)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    harmonics::HarmonicSpectrum s;
    s.dim = g->dim;
    s.l_max = l_hi;
    s.coeff.assign(static_cast<std::size_t>(s.count()), 0.0);
    s.for_each([&](int l, int m, double) {
        if (l < 2) return;
        if (even_only && (l % 2 != 0 || m < 0 || m % 2 != 0)) return;
        s.coeff[static_cast<std::size_t>(s.index(l, m))] = dist(rng) / (1.0 + s.eigenvalue(l));
    });
    grid::ScalarField u = harmonics::synthesize(s, g);
    const auto norms = grid::sup_norms(u);
    if (norms.c2 > 0.0) {
        const double scale = c2_target / norms.c2;
        for (double& v : u.values) v *= scale;
    }
    return u;
}

}  // namespace detail

[[nodiscard]] inline std::vector<Check> verify_symfun()
{
    std::vector<Check> out;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);

    double worst_oracle = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        Eigen::VectorXd lam(n);
        for (int i = 0; i < n; ++i) lam(i) = dist(rng);
        const int k = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
        const double slow = oracle::brute_sigma(lam, k);
        const double fast = symfun::sigma_k_eigen(lam, k);
        worst_oracle = std::max(worst_oracle,
                                std::abs(slow - fast) / std::max(1.0, std::abs(slow)));
    }
    out.push_back(detail::bound("sigma oracle equivalence (1e4 samples)", worst_oracle, 1e-12));

    double worst_trace = 0.0, worst_cascade = 0.0, worst_deriv = 0.0, worst_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a(i, j) = a(j, i) = dist(rng) / 2.0;
        const auto chain = symfun::newton_chain(a, n - 1);
        for (int k = 1; k <= n; ++k) {
            const double via = (a * chain.tensor[static_cast<std::size_t>(k - 1)]).trace() / k;
            worst_trace = std::max(worst_trace,
                                   std::abs(via - chain.sigma[static_cast<std::size_t>(k)]));
        }
        for (int m = 0; m + 1 <= n; ++m) {
            const Eigen::MatrixXd lhs = a * chain.tensor[static_cast<std::size_t>(m)] +
                                        symfun::newton_tensor(a, m + 1);
            const Eigen::MatrixXd rhs =
                chain.sigma[static_cast<std::size_t>(m + 1)] * Eigen::MatrixXd::Identity(n, n);
            worst_cascade = std::max(worst_cascade, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        const double h = 1e-6;
        for (int k = 1; k <= n; ++k) {
            const Eigen::MatrixXd t = symfun::newton_tensor(a, k - 1);
            const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
            const int j = static_cast<int>(rng() % static_cast<unsigned>(n));
            Eigen::MatrixXd ap = a, am = a;
            ap(i, j) += h;
            am(i, j) -= h;
            const double fd = (symfun::sigma_k_matrix(ap, k) - symfun::sigma_k_matrix(am, k)) / (2 * h);
            worst_deriv = std::max(worst_deriv,
                                   std::abs(fd - t(j, i)) / std::max(1.0, std::abs(t(j, i))));
        }
        Eigen::VectorXd lam(n);
        for (int i = 0; i < n; ++i) lam(i) = 0.2 + std::abs(dist(rng));
        for (int k = 1; k <= n - 1; ++k) {
            const auto gap = symfun::newton_maclaurin_gap(lam, k);
            if (gap.in_cone) worst_gap = std::max(worst_gap, -gap.value);
        }
    }
    out.push_back(detail::bound("trace identity", worst_trace, 1e-12));
    out.push_back(detail::bound("newton cascade identity", worst_cascade, 1e-12));
    out.push_back(detail::bound("derivative identity vs finite differences", worst_deriv, 1e-6));
    out.push_back(detail::bound("newton-maclaurin gap nonnegative in cone", worst_gap, 1e-12));
    return out;
}

[[nodiscard]] inline std::vector<Check> verify_spheregrid()
{
    std::vector<Check> out;
    const auto g = grid::build_grid(2, 32, 64);
    double sum = 0.0;
    for (double w : g->weight) sum += w;
    out.push_back(detail::bound("quadrature weight sum = |S^2|",
                                std::abs(sum - 4.0 * M_PI) / (4.0 * M_PI), 1e-12));

    const auto g1 = grid::build_grid(1, 0, 64);
    double csum = 0.0;
    for (double w : g1->weight) csum += w;
    out.push_back(detail::bound("circle weight sum = |S^1|",
                                std::abs(csum - 2.0 * M_PI) / (2.0 * M_PI), 1e-12));

    std::mt19937_64 rng(7);
    const auto g64 = grid::build_grid(2, 64, 128);
    const grid::ScalarField u = detail::random_band_field(g64, rng, 4, false, 0.2);
    const grid::ScalarField v = detail::random_band_field(g64, rng, 4, false, 0.2);
    const auto du = grid::gradient(u);
    const auto dv = grid::gradient(v);
    const auto lapv = grid::laplacian(v);
    double a = 0.0, b = 0.0;
    for (int id = 0; id < g64->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        const double s2 = g64->sin_theta[static_cast<std::size_t>(g64->row_of(id))] *
                          g64->sin_theta[static_cast<std::size_t>(g64->row_of(id))];
        a += g64->weight[i] * u.values[i] * lapv.values[i];
        b += g64->weight[i] *
             (du.comp_theta[i] * dv.comp_theta[i] + du.comp_phi[i] * dv.comp_phi[i] / s2);
    }
    out.push_back(detail::bound("integration by parts", std::abs(a + b) / std::abs(b), 1e-8));

    const auto hs = grid::hessian(u);
    const auto lap = grid::laplacian(u);
    double worst_tr = 0.0;
    for (int id = 0; id < g64->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        const double s2 = g64->sin_theta[static_cast<std::size_t>(g64->row_of(id))] *
                          g64->sin_theta[static_cast<std::size_t>(g64->row_of(id))];
        worst_tr = std::max(worst_tr, std::abs(hs.tt[i] + hs.pp[i] / s2 - lap.values[i]));
    }
    out.push_back(detail::bound("hessian trace = laplacian", worst_tr, 1e-10));
    return out;
}

[[nodiscard]] inline std::vector<Check> verify_harmonics()
{
    std::vector<Check> out;
    std::mt19937_64 rng(11);
    const auto g = grid::build_grid(2, 64, 128);

    harmonics::HarmonicSpectrum s;
    s.dim = 2;
    s.l_max = 8;
    s.coeff.assign(static_cast<std::size_t>(s.count()), 0.0);
    std::normal_distribution<double> dist(0.0, 1.0);
    s.for_each([&](int l, int m, double) {
        s.coeff[static_cast<std::size_t>(s.index(l, m))] = dist(rng) / (1.0 + l * l);
    });
    const grid::ScalarField f = harmonics::synthesize(s, g);

    const auto back = harmonics::analyze(f, 8);
    double worst_rt = 0.0;
    for (std::size_t i = 0; i < s.coeff.size(); ++i)
        worst_rt = std::max(worst_rt, std::abs(back.coeff[i] - s.coeff[i]));
    out.push_back(detail::bound("analysis/synthesis round trip", worst_rt, 1e-10));

    const auto n = harmonics::sobolev_norms(s);
    double l2 = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        l2 += g->weight[i] * f.values[i] * f.values[i];
    out.push_back(detail::bound("Parseval vs quadrature", std::abs(n.l2_sq - l2) / n.l2_sq, 1e-8));

    const double grad = grid::integrate(grid::grad_norm_sq(grid::gradient(f)));
    out.push_back(
        detail::bound("gradient-norm identity", std::abs(n.grad_sq - grad) / n.grad_sq, 1e-6));

    double worst_margin = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        harmonics::HarmonicSpectrum r;
        r.dim = 2;
        r.l_max = 8;
        r.coeff.assign(static_cast<std::size_t>(r.count()), 0.0);
        r.for_each([&](int l, int m, double) {
            r.coeff[static_cast<std::size_t>(r.index(l, m))] = dist(rng);
        });
        const auto stripped = harmonics::strip_low_modes(r, 1);
        worst_margin = std::max(worst_margin, -harmonics::poincare_margin(stripped));
    }
    out.push_back(detail::bound("spectral gap after stripping l <= 1", worst_margin, 1e-10));
    return out;
}

[[nodiscard]] inline std::vector<Check> verify_geometry()
{
    std::vector<Check> out;
    const auto g = grid::build_grid(2, 64, 128);

    grid::ScalarField uc = grid::make_field(g, [](double, double) { return 0.2; });
    const auto bundle = geometry::curvature_bundle(geometry::make_hypersurface(std::move(uc)));
    double worst_kappa = 0.0;
    for (std::size_t i = 0; i < bundle.kappa1.size(); ++i) {
        worst_kappa = std::max(worst_kappa, std::abs(bundle.kappa1[i] - 1.0 / 1.2));
        worst_kappa = std::max(worst_kappa, std::abs(bundle.kappa2[i] - 1.0 / 1.2));
    }
    out.push_back(detail::bound("sphere exactness of principal curvatures", worst_kappa, 1e-8));

    std::mt19937_64 rng(13);
    double worst_gb = 0.0, worst_sigma = 0.0, worst_dilation = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        grid::ScalarField u = detail::random_band_field(g, rng, 4, false, 0.3);
        const auto m = geometry::make_hypersurface(std::move(u));
        const auto b = geometry::curvature_bundle(m);
        worst_gb = std::max(worst_gb, std::abs(geometry::quermass_integral(b, 2) - 4.0 * M_PI) /
                                          (4.0 * M_PI));
        for (int id = 0; id < g->node_count(); id += 37) {
            const std::size_t i = static_cast<std::size_t>(id);
            Eigen::MatrixXd h(2, 2);
            h << b.h_tt[i], b.h_tp[i], b.h_pt[i], b.h_pp[i];
            for (int k = 1; k <= 2; ++k)
                worst_sigma = std::max(worst_sigma, std::abs(symfun::sigma_k_matrix(h, k) -
                                                             b.sigma[static_cast<std::size_t>(k)][i]));
        }
        geometry::Hypersurface scaled = m;
        for (double& v : scaled.u.values) v = 1.23 * (1.0 + v) - 1.0;
        for (int k = -1; k <= 2; ++k) {
            const double p = k == -1 ? 3.0 : 2.0 - k;
            const double lhs = geometry::quermass_integral(scaled, k);
            const double rhs = std::pow(1.23, p) * geometry::quermass_integral(m, k);
            worst_dilation = std::max(worst_dilation, std::abs(lhs - rhs) / std::abs(rhs));
        }
    }
    out.push_back(detail::bound("Gauss-Bonnet on random starshaped surfaces", worst_gb, 1e-6));
    out.push_back(detail::bound("sigma consistency (eigen vs matrix)", worst_sigma, 1e-10));
    out.push_back(detail::bound("dilation covariance of I_k", worst_dilation, 1e-8));

    const auto small = geometry::normalize_quermass(
        geometry::make_hypersurface(detail::random_band_field(g, rng, 4, true, 0.05)), 0);
    const double delta = geometry::deficit(small, 1, 0);
    const auto asym = geometry::fraenkel_asymmetry(small);
    const double needed = (1.0 / 18.0 - 0.01) * asym.alpha * asym.alpha;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "delta=%.3e >= %.3e", delta, needed);
    out.push_back({"quantitative deficit bound (one sample)", delta >= needed, buf});

    double centered = 0.0;
    {
        const double vol = geometry::quermass_integral(small, -1);
        const double radius = std::pow(3.0 * vol / (4.0 * M_PI), 1.0 / 3.0);
        double overlap = 0.0;
        for (std::size_t i = 0; i < small.u.values.size(); ++i)
            overlap += g->weight[i] * std::pow(std::min(1.0 + small.u.values[i], radius), 3) / 3.0;
        centered = 2.0 * (vol - overlap) / vol;
    }
    std::snprintf(buf, sizeof(buf), "alpha=%.3e centered=%.3e", asym.alpha, centered);
    out.push_back({"asymmetry bounded by the centered value",
                   asym.alpha >= 0.0 && asym.alpha <= centered + 1e-10, buf});
    return out;
}

[[nodiscard]] inline std::vector<Check> verify_oracle()
{
    std::vector<Check> out;
    for (double radius : {0.8, 1.0, 1.5}) {
        const oracle::SpheroidSpec s{radius, radius};
        double worst = 0.0;
        for (int k = -1; k <= 2; ++k) {
            const double expect = k == -1 ? 4.0 * M_PI / 3.0 * std::pow(radius, 3)
                                          : symfun::binomial(2, k) * std::pow(radius, 2 - k) * 4.0 * M_PI;
            worst = std::max(worst, std::abs(oracle::spheroid_reference(s, k) - expect) /
                                        std::abs(expect));
        }
        char name[64];
        std::snprintf(name, sizeof(name), "spheroid reference on the sphere R=%.1f", radius);
        out.push_back(detail::bound(name, worst, 1e-10));
    }
    return out;
}

[[nodiscard]] inline std::vector<Check> verify_flows()
{
    std::vector<Check> out;
    flows::FlowConfig cfg;
    cfg.kind = flows::FlowKind::inverse;
    cfg.dim = 2;
    cfg.k = 1;
    cfg.t_end = 1.0;
    cfg.dt_init = 1e-3;
    cfg.dt_max = 1e-3;
    const auto g = grid::build_grid(2, 16, 32);
    grid::ScalarField u = grid::make_field(g, [](double, double) { return 0.0; });
    flows::FlowState s = flows::initial_state(cfg, geometry::make_hypersurface(std::move(u)));
    while (s.t < cfg.t_end - 1e-12) s = flows::step(s, cfg);
    double worst = 0.0;
    for (double v : s.w.values) worst = std::max(worst, std::abs(v - std::exp(0.5)) / std::exp(0.5));
    out.push_back(detail::bound("expanding sphere tracks e^{t/2}", worst, 1e-6));

    out.push_back(detail::bound("rescaling rate for n=2,k=1",
                                std::abs(symfun::binomial(2, 0) / symfun::binomial(2, 1) - 0.5), 0.0));
    out.push_back(detail::bound("rescaling rate for n=2,k=2",
                                std::abs(symfun::binomial(2, 1) / symfun::binomial(2, 2) - 2.0), 0.0));
    return out;
}

using Suite = std::function<std::vector<Check>()>;

[[nodiscard]] inline const std::map<std::string, Suite>& suites()
{
    static const std::map<std::string, Suite> table = {
        {"symfun", verify_symfun},     {"spheregrid", verify_spheregrid},
        {"harmonics", verify_harmonics}, {"geometry", verify_geometry},
        {"oracle", verify_oracle},     {"flows", verify_flows},
    };
    return table;
}

}  // namespace qflow::verify
