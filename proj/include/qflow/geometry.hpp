#pragma once

#include "qflow/spheregrid.hpp"
#include "qflow/symfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow::geometry {

using grid::CovectorField;
using grid::GridPtr;
using grid::ScalarField;

[[nodiscard]] inline double sphere_measure(int dim)
{
    return dim == 1 ? 2.0 * M_PI : 4.0 * M_PI;
}

[[nodiscard]] inline double unit_ball_volume(int dim)
{
    return sphere_measure(dim) / (dim + 1);
}

/// Starshaped hypersurface M = {(1+u(x)) x : x in S^n}, radial field w = 1+u.
struct Hypersurface {
    GridPtr grid;
    ScalarField u;
    int k_max = 0;  // largest curvature order carried by bundles
};

[[nodiscard]] inline Hypersurface make_hypersurface(ScalarField u, int k_max = -1)
{
    Hypersurface m;
    m.grid = u.grid;
    m.k_max = k_max < 0 ? m.grid->dim : k_max;
    m.u = std::move(u);
    return m;
}

struct NumericError : std::runtime_error {
    int node = -1;
    double theta = 0.0;
    double phi = 0.0;
    NumericError(const std::string& what, int node_, double theta_, double phi_)
        : std::runtime_error(what + " at node " + std::to_string(node_) +
                             " (theta=" + std::to_string(theta_) + ", phi=" + std::to_string(phi_) + ")"),
          node(node_), theta(theta_), phi(phi_)
    {
    }
};

/// Per-node extrinsic data of a radial graph: support quantity
/// D = sqrt(|grad w|^2 + w^2), induced metric and its explicit inverse, shape
/// operator, principal curvatures, sigma_0..sigma_{k_max}, and the area
/// element relative to the round measure.
struct CurvatureBundle {
    GridPtr grid;
    int k_max = 0;

    std::vector<double> w;        // radial field 1+u
    CovectorField grad_w;         // lowered components
    std::vector<double> grad_sq;  // |grad w|^2
    std::vector<double> d_support;

    std::vector<double> g_tt, g_tp, g_pp;     // metric (lowered)
    std::vector<double> gi_tt, gi_tp, gi_pp;  // inverse metric (raised)

    // shape operator, mixed indices (theta/phi frame); dim 1 uses h_tt only
    std::vector<double> h_tt, h_tp, h_pt, h_pp;

    std::vector<double> kappa1, kappa2;        // principal curvatures
    std::vector<std::vector<double>> sigma;    // sigma[j][node], j = 0..k_max
    std::vector<double> area_element;          // w^{n-1} D

    [[nodiscard]] double measure(int node) const
    {
        return grid->weight[static_cast<std::size_t>(node)] *
               area_element[static_cast<std::size_t>(node)];
    }
};

namespace detail {

/// sigma_0..sigma_n of up to two values by the same prefix recurrence as
/// symfun::sigma_all, allocation-free for the per-node hot path.
inline void sigma_small(const double* kappa, int n, double* out)
{
    out[0] = 1.0;
    for (int k = 1; k <= n; ++k) out[k] = 0.0;
    for (int m = 0; m < n; ++m)
        for (int k = m + 1; k >= 1; --k) out[k] += kappa[m] * out[k - 1];
}

}  // namespace detail

[[nodiscard]] inline CurvatureBundle curvature_bundle(const Hypersurface& m)
{
    const GridPtr& gp = m.grid;
    const grid::GridSpec& g = *gp;
    const int n = g.dim;
    const int count = g.node_count();
    const int k_max = std::clamp(m.k_max, 0, n);

    CurvatureBundle b;
    b.grid = gp;
    b.k_max = k_max;
    b.w.resize(static_cast<std::size_t>(count));
    for (int id = 0; id < count; ++id) {
        const double w = 1.0 + m.u.values[static_cast<std::size_t>(id)];
        if (!(w > 0.0))
            throw std::domain_error("curvature_bundle: surface not starshaped (1+u <= 0 at node " +
                                    std::to_string(id) + ")");
        b.w[static_cast<std::size_t>(id)] = w;
    }

    ScalarField wf(gp);
    wf.values = b.w;
    b.grad_w = grid::gradient(wf);
    const grid::SymTensorField hw = grid::hessian(wf);

    b.grad_sq.resize(static_cast<std::size_t>(count));
    b.d_support.resize(static_cast<std::size_t>(count));
    b.g_tt.resize(static_cast<std::size_t>(count));
    b.g_tp.resize(static_cast<std::size_t>(count));
    b.g_pp.resize(static_cast<std::size_t>(count));
    b.gi_tt.resize(static_cast<std::size_t>(count));
    b.gi_tp.resize(static_cast<std::size_t>(count));
    b.gi_pp.resize(static_cast<std::size_t>(count));
    b.h_tt.resize(static_cast<std::size_t>(count));
    b.h_tp.assign(static_cast<std::size_t>(count), 0.0);
    b.h_pt.assign(static_cast<std::size_t>(count), 0.0);
    b.h_pp.assign(static_cast<std::size_t>(count), 0.0);
    b.kappa1.resize(static_cast<std::size_t>(count));
    b.kappa2.assign(static_cast<std::size_t>(count), 0.0);
    b.area_element.resize(static_cast<std::size_t>(count));
    b.sigma.assign(static_cast<std::size_t>(k_max + 1),
                   std::vector<double>(static_cast<std::size_t>(count), 0.0));

    for (int id = 0; id < count; ++id) {
        const std::size_t k = static_cast<std::size_t>(id);
        const double w = b.w[k];
        const double wt = b.grad_w.comp_theta[k];

        double kappa[2] = {0.0, 0.0};
        if (n == 1) {
            const double gsq = wt * wt;
            const double d = std::sqrt(gsq + w * w);
            const double wtt = hw.tt[k];
            b.grad_sq[k] = gsq;
            b.d_support[k] = d;
            b.g_tt[k] = w * w + wt * wt;
            b.gi_tt[k] = 1.0 / b.g_tt[k];
            const double h = 1.0 / d - wtt / (w * d) + wt * wt * wtt / (w * d * d * d) +
                             wt * wt / (d * d * d);
            b.h_tt[k] = h;
            kappa[0] = h;
            b.kappa1[k] = h;
            b.area_element[k] = d;  // w^{n-1} D with n = 1
        } else {
            const int row = g.row_of(id);
            const double s = g.sin_theta[static_cast<std::size_t>(row)];
            const double s2 = s * s;
            const double wp = b.grad_w.comp_phi[k];
            // raised gradient components
            const double wut = wt;
            const double wup = wp / s2;
            const double gsq = wt * wut + wp * wup;
            const double d = std::sqrt(gsq + w * w);
            const double d3 = d * d * d;
            b.grad_sq[k] = gsq;
            b.d_support[k] = d;

            b.g_tt[k] = w * w + wt * wt;
            b.g_tp[k] = wt * wp;
            b.g_pp[k] = w * w * s2 + wp * wp;
            // explicit inverse g^{ij} = s^{ij}/w^2 - w^i w^j / (w^2 D^2)
            b.gi_tt[k] = 1.0 / (w * w) - wut * wut / (w * w * d * d);
            b.gi_tp[k] = -wut * wup / (w * w * d * d);
            b.gi_pp[k] = 1.0 / (w * w * s2) - wup * wup / (w * w * d * d);

            // mixed Hessian w^i_j
            const double htt = hw.tt[k];
            const double htp = hw.tp[k];
            const double hpp = hw.pp[k];
            const double m_tt = htt;          // w^theta_theta
            const double m_tp = htp;          // w^theta_phi
            const double m_pt = htp / s2;     // w^phi_theta
            const double m_pp = hpp / s2;     // w^phi_phi

            // (w_l w^l_j): contraction of lowered gradient with mixed Hessian
            const double c_t = wt * m_tt + wp * m_pt;
            const double c_p = wt * m_tp + wp * m_pp;

            const double inv_wd = 1.0 / (w * d);
            // h^i_j = delta/D - w^i_j/(wD) + w^i w_l w^l_j/(w D^3) + w^i w_j / D^3
            b.h_tt[k] = 1.0 / d - m_tt * inv_wd + wut * c_t / (w * d3) + wut * wt / d3;
            b.h_tp[k] = -m_tp * inv_wd + wut * c_p / (w * d3) + wut * wp / d3;
            b.h_pt[k] = -m_pt * inv_wd + wup * c_t / (w * d3) + wup * wt / d3;
            b.h_pp[k] = 1.0 / d - m_pp * inv_wd + wup * c_p / (w * d3) + wup * wp / d3;

            const double tr = b.h_tt[k] + b.h_pp[k];
            const double diff = b.h_tt[k] - b.h_pp[k];
            const double disc = std::max(diff * diff + 4.0 * b.h_tp[k] * b.h_pt[k], 0.0);
            const double root = std::sqrt(disc);
            kappa[0] = 0.5 * (tr + root);
            kappa[1] = 0.5 * (tr - root);
            b.kappa1[k] = kappa[0];
            b.kappa2[k] = kappa[1];
            b.area_element[k] = w * d;  // w^{n-1} D with n = 2
        }

        double sig[3];
        detail::sigma_small(kappa, n, sig);
        for (int j = 0; j <= k_max; ++j) b.sigma[static_cast<std::size_t>(j)][k] = sig[j];

        for (int j = 0; j <= k_max; ++j) {
            if (!std::isfinite(b.sigma[static_cast<std::size_t>(j)][k]))
                throw NumericError("curvature_bundle: non-finite curvature", id, g.node_theta(id),
                                   g.node_phi(id));
        }
    }
    return b;
}

/// I_k = int sigma_k(L) dA for 0 <= k <= n; I_{-1} = enclosed volume.
[[nodiscard]] inline double quermass_integral(const CurvatureBundle& b, int k)
{
    const int n = b.grid->dim;
    if (k < -1 || k > n) throw std::domain_error("quermass_integral: k out of range");
    const int count = b.grid->node_count();
    double acc = 0.0;
    if (k == -1) {
        for (int id = 0; id < count; ++id) {
            const std::size_t i = static_cast<std::size_t>(id);
            acc += b.grid->weight[i] * std::pow(b.w[i], n + 1);
        }
        return acc / (n + 1);
    }
    if (k > b.k_max) throw std::domain_error("quermass_integral: bundle carries sigma up to k_max only");
    for (int id = 0; id < count; ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        acc += b.grid->weight[i] * b.sigma[static_cast<std::size_t>(k)][i] * b.area_element[i];
    }
    return acc;
}

[[nodiscard]] inline double quermass_integral(const Hypersurface& m, int k)
{
    Hypersurface probe = m;
    probe.k_max = std::max(m.k_max, std::max(k, 0));
    return quermass_integral(curvature_bundle(probe), k);
}

/// bar(Omega) = (1/|S^n|) int (1+u)^{n+2} x dA.
[[nodiscard]] inline Eigen::Vector3d barycenter(const Hypersurface& m)
{
    const grid::GridSpec& g = *m.grid;
    const int n = g.dim;
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (int id = 0; id < g.node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        const double w = 1.0 + m.u.values[i];
        if (!(w > 0.0)) throw std::domain_error("barycenter: surface not starshaped");
        const double f = g.weight[i] * std::pow(w, n + 2);
        acc[0] += f * g.position[i][0];
        acc[1] += f * g.position[i][1];
        acc[2] += f * g.position[i][2];
    }
    return acc / sphere_measure(n);
}

/// |Omega symmetric-difference B_1| = int |(1+u)^{n+1} - 1| / (n+1) dA,
/// evaluated ray by ray.
[[nodiscard]] inline double symmetric_difference_centered(const Hypersurface& m)
{
    const grid::GridSpec& g = *m.grid;
    const int n = g.dim;
    double acc = 0.0;
    for (int id = 0; id < g.node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        const double w = 1.0 + m.u.values[i];
        if (!(w > 0.0)) throw std::domain_error("symmetric_difference_centered: not starshaped");
        acc += g.weight[i] * std::abs(std::pow(w, n + 1) - 1.0);
    }
    return acc / (n + 1);
}

namespace detail {

/// Nelder-Mead in d <= 3 dimensions; minimizes f with an absolute tolerance
/// on the simplex value spread.
inline bool nelder_mead(const std::function<double(const Eigen::Vector3d&)>& f, int dim,
                        Eigen::Vector3d& x, double initial_step, int max_iter, double tol)
{
    const int np = dim + 1;
    std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(np), x);
    std::vector<double> val(static_cast<std::size_t>(np));
    for (int i = 1; i < np; ++i) pts[static_cast<std::size_t>(i)][i - 1] += initial_step;
    for (int i = 0; i < np; ++i) val[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<int> order(static_cast<std::size_t>(np));
        for (int i = 0; i < np; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int bidx) { return val[static_cast<std::size_t>(a)] < val[static_cast<std::size_t>(bidx)]; });
        const int best = order.front(), worst = order.back();
        const int second = order[static_cast<std::size_t>(np - 2)];
        if (!std::isfinite(val[static_cast<std::size_t>(best)])) return false;
        if (std::abs(val[static_cast<std::size_t>(worst)] - val[static_cast<std::size_t>(best)]) < tol) break;

        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (int i = 0; i < np; ++i)
            if (i != worst) centroid += pts[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(np - 1);

        const Eigen::Vector3d reflect = centroid + (centroid - pts[static_cast<std::size_t>(worst)]);
        const double fr = f(reflect);
        if (fr < val[static_cast<std::size_t>(best)]) {
            const Eigen::Vector3d expand = centroid + 2.0 * (centroid - pts[static_cast<std::size_t>(worst)]);
            const double fe = f(expand);
            if (fe < fr) {
                pts[static_cast<std::size_t>(worst)] = expand;
                val[static_cast<std::size_t>(worst)] = fe;
            } else {
                pts[static_cast<std::size_t>(worst)] = reflect;
                val[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < val[static_cast<std::size_t>(second)]) {
            pts[static_cast<std::size_t>(worst)] = reflect;
            val[static_cast<std::size_t>(worst)] = fr;
        } else {
            const Eigen::Vector3d contract =
                centroid + 0.5 * (pts[static_cast<std::size_t>(worst)] - centroid);
            const double fc = f(contract);
            if (fc < val[static_cast<std::size_t>(worst)]) {
                pts[static_cast<std::size_t>(worst)] = contract;
                val[static_cast<std::size_t>(worst)] = fc;
            } else {
                for (int i = 0; i < np; ++i) {
                    if (i == best) continue;
                    pts[static_cast<std::size_t>(i)] =
                        pts[static_cast<std::size_t>(best)] +
                        0.5 * (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(best)]);
                    val[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i < np; ++i)
        if (val[static_cast<std::size_t>(i)] < val[static_cast<std::size_t>(best)]) best = i;
    x = pts[static_cast<std::size_t>(best)];
    return std::isfinite(val[static_cast<std::size_t>(best)]);
}

}  // namespace detail

struct Asymmetry {
    double alpha = 0.0;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    bool optimizer_ok = true;
};

/// Fraenkel asymmetry: minimal normalized symmetric difference against a
/// translated ball of equal volume. The overlap with the ball centered at x
/// is integrated per ray via the positive root of t^2 - 2 t <x, e> + |x|^2 - R^2.
/// Coarse 5^d grid, then simplex refinement warm-started at the best point.
[[nodiscard]] inline Asymmetry fraenkel_asymmetry(const Hypersurface& m)
{
    const grid::GridSpec& g = *m.grid;
    const int n = g.dim;
    const int count = g.node_count();

    std::vector<double> w(static_cast<std::size_t>(count));
    double wmin = std::numeric_limits<double>::infinity();
    for (int id = 0; id < count; ++id) {
        w[static_cast<std::size_t>(id)] = 1.0 + m.u.values[static_cast<std::size_t>(id)];
        if (!(w[static_cast<std::size_t>(id)] > 0.0))
            throw std::domain_error("fraenkel_asymmetry: surface not starshaped");
        wmin = std::min(wmin, w[static_cast<std::size_t>(id)]);
    }
    double vol = 0.0;
    for (int id = 0; id < count; ++id)
        vol += g.weight[static_cast<std::size_t>(id)] *
               std::pow(w[static_cast<std::size_t>(id)], n + 1);
    vol /= (n + 1);
    const double radius = std::pow((n + 1) * vol / sphere_measure(n), 1.0 / (n + 1));
    const double reach = std::min(wmin, radius);

    const auto objective = [&](const Eigen::Vector3d& x) -> double {
        const double xn = x.norm();
        if (xn >= 0.98 * reach) return std::numeric_limits<double>::infinity();
        double overlap = 0.0;
        for (int id = 0; id < count; ++id) {
            const std::size_t i = static_cast<std::size_t>(id);
            const auto& p = g.position[i];
            const double beta = p[0] * x[0] + p[1] * x[1] + p[2] * x[2];
            const double disc = beta * beta - xn * xn + radius * radius;
            const double tplus = beta + std::sqrt(std::max(disc, 0.0));
            const double r = std::min(w[i], tplus);
            overlap += g.weight[i] * std::pow(r, n + 1);
        }
        overlap /= (n + 1);
        return 2.0 * (vol - overlap) / vol;
    };

    const int dim = n == 1 ? 2 : 3;
    const double span = 0.5 * wmin;
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    double best_val = objective(best);

    Eigen::Vector3d bar = barycenter(m);
    if (dim == 2) bar[2] = 0.0;
    if (bar.norm() < 0.9 * reach) {
        const double v = objective(bar);
        if (v < best_val) {
            best_val = v;
            best = bar;
        }
    }
    const int half = 2;
    for (int a = -half; a <= half; ++a) {
        for (int bq = -half; bq <= half; ++bq) {
            for (int c = -half; c <= half; ++c) {
                if (dim == 2 && c != 0) continue;
                Eigen::Vector3d x(span * a / half, span * bq / half, span * c / half);
                const double v = objective(x);
                if (v < best_val) {
                    best_val = v;
                    best = x;
                }
            }
        }
    }

    Asymmetry out;
    out.optimizer_ok = detail::nelder_mead(objective, dim, best, 0.05 * std::max(span, 1e-3), 200, 1e-8);
    if (out.optimizer_ok) {
        out.alpha = std::max(objective(best), 0.0);
        out.center = best;
    } else {
        out.alpha = std::max(objective(Eigen::Vector3d::Zero()), 0.0);
        out.center = Eigen::Vector3d::Zero();
    }
    return out;
}

/// Radius of the comparison ball matched through I_m.
[[nodiscard]] inline double matched_ball_radius(const Hypersurface& m, int order)
{
    const int n = m.grid->dim;
    if (order < -1 || order >= n)
        throw std::domain_error("matched_ball_radius: order out of range");
    const double im = quermass_integral(m, order);
    if (!(im > 0.0)) throw std::domain_error("matched_ball_radius: nonpositive I_m");
    if (order == -1) return std::pow((n + 1) * im / sphere_measure(n), 1.0 / (n + 1));
    return std::pow(im / (symfun::binomial(n, order) * sphere_measure(n)), 1.0 / (n - order));
}

/// (k,m)-isoperimetric deficit (I_k(Omega) - I_k(B_{Omega,m})) / I_k(B_{Omega,m}).
[[nodiscard]] inline double deficit(const Hypersurface& m, int k, int order)
{
    const int n = m.grid->dim;
    if (!(order >= -1 && order < k && k <= n)) throw std::domain_error("deficit: need -1 <= m < k <= n");
    const double r = matched_ball_radius(m, order);
    const double ik_ball = symfun::binomial(n, k) * std::pow(r, n - k) * sphere_measure(n);
    const double ik = quermass_integral(m, k);
    return (ik - ik_ball) / ik_ball;
}

/// Dilate so that I_m equals its unit-ball value; the new radial field is
/// exactly u' = lambda (1+u) - 1.
[[nodiscard]] inline Hypersurface normalize_quermass(const Hypersurface& m, int order)
{
    const double r = matched_ball_radius(m, order);
    const double lambda = 1.0 / r;
    Hypersurface out = m;
    for (double& v : out.u.values) v = lambda * (1.0 + v) - 1.0;
    return out;
}

/// Quadratic stability functional
///   A = C(n,k) (n-k)/(2n) (||u||_{L2}^2 + ||grad u||_{L2}^2 / 2).
[[nodiscard]] inline double stability_functional_A(const Hypersurface& m, int k)
{
    const int n = m.grid->dim;
    if (k < 1 || k > n - 1) throw std::domain_error("stability_functional_A: need 1 <= k <= n-1");
    const auto du = grid::gradient(m.u);
    const auto gn = grid::grad_norm_sq(du);
    double l2 = 0.0;
    for (std::size_t i = 0; i < m.u.values.size(); ++i)
        l2 += m.grid->weight[i] * m.u.values[i] * m.u.values[i];
    const double grad2 = grid::integrate(gn);
    return symfun::binomial(n, k) * (n - k) / (2.0 * n) * (l2 + 0.5 * grad2);
}

/// Max-node residual of the first-order expansion of sigma_{k-1}(L) around the
/// unit sphere: |sigma_{k-1} - C(n,k-1) (1 - (k-1) u - ((k-1)/n) lap u)|.
[[nodiscard]] inline double linearization_residual_sigma(const Hypersurface& m, int k)
{
    const int n = m.grid->dim;
    if (k < 1 || k > n) throw std::domain_error("linearization_residual_sigma: k out of range");
    Hypersurface probe = m;
    probe.k_max = std::max(m.k_max, k - 1);
    const CurvatureBundle b = curvature_bundle(probe);
    const auto lap = grid::laplacian(m.u);
    const double c = symfun::binomial(n, k - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.u.values.size(); ++i) {
        const double linear =
            c * (1.0 - (k - 1) * m.u.values[i] - (k - 1.0) / n * lap.values[i]);
        worst = std::max(worst, std::abs(b.sigma[static_cast<std::size_t>(k - 1)][i] - linear));
    }
    return worst;
}

/// One-shot static analysis of a surface.
struct ShapeReport {
    int dim = 2;
    std::vector<double> quermass;  // I_{-1}..I_n, index shifted by one
    Eigen::Vector3d bar = Eigen::Vector3d::Zero();
    double alpha = 0.0;
    Eigen::Vector3d alpha_center = Eigen::Vector3d::Zero();
    struct Deficit {
        int k;
        int m;
        double value;
    };
    std::vector<Deficit> deficits;
    std::optional<double> a_functional;  // k = 1 (defined for dim 2)
    grid::SupNorms norms;

    [[nodiscard]] double quermass_at(int k) const
    {
        return quermass[static_cast<std::size_t>(k + 1)];
    }
};

[[nodiscard]] inline ShapeReport shape_report(const Hypersurface& m)
{
    const int n = m.grid->dim;
    Hypersurface probe = m;
    probe.k_max = n;
    const CurvatureBundle b = curvature_bundle(probe);

    ShapeReport rep;
    rep.dim = n;
    rep.quermass.resize(static_cast<std::size_t>(n + 2));
    for (int k = -1; k <= n; ++k)
        rep.quermass[static_cast<std::size_t>(k + 1)] = quermass_integral(b, k);
    rep.bar = barycenter(m);
    const Asymmetry asym = fraenkel_asymmetry(m);
    rep.alpha = asym.alpha;
    rep.alpha_center = asym.center;
    for (int k = 0; k <= n; ++k)
        for (int order = -1; order < k; ++order)
            rep.deficits.push_back({k, order, deficit(m, k, order)});
    if (n >= 2) rep.a_functional = stability_functional_A(m, 1);
    rep.norms = grid::sup_norms(m.u);
    return rep;
}

}  // namespace qflow::geometry
