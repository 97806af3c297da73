#pragma once

#include "qflow/geometry.hpp"
#include "qflow/harmonics.hpp"
#include "qflow/oracle.hpp"
#include "qflow/spheregrid.hpp"
#include "qflow/symfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qflow::flows {

using geometry::CurvatureBundle;
using geometry::Hypersurface;
using grid::ScalarField;

enum class FlowKind { inverse, volume_preserving };

struct FlowConfig {
    FlowKind kind = FlowKind::inverse;
    int dim = 2;  // sphere dimension n
    int k = 1;    // curvature order
    double alpha = 1.0;  // speed exponent, volume-preserving flow only
    double t_end = 1.0;
    double dt_init = 0.0;  // cap on the first step; 0 = automatic
    double dt_max = 0.05;
    double cfl_safety = 0.85;
    bool symmetrize = false;
    int diag_stride = 25;
    double barycenter_K = 1.0;   // threshold constant of the barycenter monitor
    double pinching_cp = -1.0;   // <= 0: 0.9 * initial min(sigma_n / sigma_1^n)
    double initial_c2_gate = 0.3;
};

inline void validate(const FlowConfig& cfg)
{
    if (cfg.dim != 1 && cfg.dim != 2) throw std::domain_error("flow: dim must be 1 or 2");
    if (cfg.k < 1 || cfg.k > cfg.dim) throw std::domain_error("flow: need 1 <= k <= n");
    if (cfg.kind == FlowKind::volume_preserving && cfg.alpha < 1.0)
        throw std::domain_error("flow: volume-preserving speed needs alpha >= 1");
    if (!(cfg.t_end > 0.0)) throw std::domain_error("flow: t_end must be positive");
    if (cfg.diag_stride < 1) throw std::domain_error("flow: diag_stride must be >= 1");
}

struct ConeExitError : std::runtime_error {
    int node = -1;
    int order = 0;
    double value = 0.0;
    ConeExitError(int node_, int order_, double value_, double theta, double phi)
        : std::runtime_error("cone exit: sigma_" + std::to_string(order_) + " = " +
                             std::to_string(value_) + " at node " + std::to_string(node_) +
                             " (theta=" + std::to_string(theta) + ", phi=" + std::to_string(phi) + ")"),
          node(node_), order(order_), value(value_)
    {
    }
};

/// Unrescaled radial field w(t); the rescaled surface is e^{-rt} w - 1.
struct FlowState {
    double t = 0.0;
    ScalarField w;
    double r = 0.0;  // rescaling rate: C(n,k-1)/C(n,k) for the inverse flow, 0 otherwise
    double dt = 0.0; // last accepted step
    long steps = 0;
};

/// Expansion speed G = sigma_{k-1}/sigma_k of the inverse flow. Every node
/// must lie strictly inside the Garding cone Gamma_k^+.
[[nodiscard]] inline ScalarField speed_inverse(const CurvatureBundle& b, int k)
{
    if (k < 1 || k > b.k_max) throw std::domain_error("speed_inverse: k out of bundle range");
    ScalarField g(b.grid);
    const int count = b.grid->node_count();
    for (int id = 0; id < count; ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        for (int j = 1; j <= k; ++j) {
            const double s = b.sigma[static_cast<std::size_t>(j)][i];
            if (!(s > 0.0))
                throw ConeExitError(id, j, s, b.grid->node_theta(id), b.grid->node_phi(id));
        }
        g.values[i] = b.sigma[static_cast<std::size_t>(k - 1)][i] /
                      b.sigma[static_cast<std::size_t>(k)][i];
    }
    return g;
}

/// Speed G = -sigma_k^alpha + h(t) with the area average h keeping the
/// enclosed volume constant: integral of G against the area measure is zero
/// by construction.
[[nodiscard]] inline std::pair<ScalarField, double> speed_volume_preserving(const CurvatureBundle& b,
                                                                            int k, double alpha)
{
    if (k < 1 || k > b.k_max) throw std::domain_error("speed_volume_preserving: k out of range");
    const bool integral_exponent = std::abs(alpha - std::round(alpha)) < 1e-12;
    ScalarField g(b.grid);
    const int count = b.grid->node_count();
    double num = 0.0, den = 0.0;
    std::vector<double> powed(static_cast<std::size_t>(count));
    for (int id = 0; id < count; ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        const double s = b.sigma[static_cast<std::size_t>(k)][i];
        if (s < 0.0 && !integral_exponent)
            throw std::domain_error("speed_volume_preserving: negative sigma_k with fractional alpha");
        powed[i] = integral_exponent ? std::pow(s, std::lround(alpha)) : std::pow(s, alpha);
        const double measure = b.measure(id);
        num += measure * powed[i];
        den += measure;
    }
    const double h = num / den;
    for (int id = 0; id < count; ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        g.values[i] = -powed[i] + h;
    }
    return {std::move(g), h};
}

/// Radial form of X_t = G nu: w_t = G sqrt(1 + |grad w|^2 / w^2).
[[nodiscard]] inline ScalarField radial_rhs(const ScalarField& g, const ScalarField& w)
{
    const auto dw = grid::gradient(w);
    const auto gsq = grid::grad_norm_sq(dw);
    ScalarField out(w.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double wi = w.values[i];
        if (!(wi > 0.0)) throw std::domain_error("radial_rhs: w must be positive");
        out.values[i] = g.values[i] * std::sqrt(1.0 + gsq.values[i] / (wi * wi));
    }
    return out;
}

namespace detail {

struct RhsEval {
    ScalarField wdot;
    double max_speed = 0.0;
    double diffusivity = 0.0;
};

inline RhsEval eval_rhs(const ScalarField& w, const FlowConfig& cfg)
{
    ScalarField u = w;
    for (double& v : u.values) v -= 1.0;
    Hypersurface m = geometry::make_hypersurface(std::move(u), cfg.k);
    const CurvatureBundle b = geometry::curvature_bundle(m);

    RhsEval out;
    ScalarField g(w.grid);
    double nu = 0.0, gmax = 0.0;
    if (cfg.kind == FlowKind::inverse) {
        g = speed_inverse(b, cfg.k);
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            nu = std::max(nu, g.values[i] / (cfg.dim * b.w[i]));
            gmax = std::max(gmax, std::abs(g.values[i]) / b.w[i]);
        }
        gmax *= (cfg.k + 1);  // bound on dG/dw along radial perturbations
    } else {
        auto [gv, h] = speed_volume_preserving(b, cfg.k, cfg.alpha);
        g = std::move(gv);
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const double sk = b.sigma[static_cast<std::size_t>(cfg.k)][i];
            const double spow = std::pow(std::abs(sk), cfg.alpha);
            nu = std::max(nu, cfg.alpha * cfg.k * spow / (cfg.dim * b.w[i]));
            gmax = std::max(gmax, std::abs(g.values[i]));
        }
    }
    out.diffusivity = nu;
    out.max_speed = gmax;

    // w_t = G D / w, with D = sqrt(|grad w|^2 + w^2) already in the bundle
    out.wdot = ScalarField(w.grid);
    for (std::size_t i = 0; i < w.values.size(); ++i)
        out.wdot.values[i] = g.values[i] * b.d_support[i] / b.w[i];
    grid::polar_filter_inplace(out.wdot);
    return out;
}

/// One classical RK4 step of fixed size dt (dt may be negative for probes).
inline void advance_fixed(FlowState& state, double dt, const FlowConfig& cfg)
{
    const ScalarField& w0 = state.w;
    const RhsEval k1 = eval_rhs(w0, cfg);
    ScalarField tmp(w0.grid);
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = w0.values[i] + 0.5 * dt * k1.wdot.values[i];
    const RhsEval k2 = eval_rhs(tmp, cfg);
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = w0.values[i] + 0.5 * dt * k2.wdot.values[i];
    const RhsEval k3 = eval_rhs(tmp, cfg);
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = w0.values[i] + dt * k3.wdot.values[i];
    const RhsEval k4 = eval_rhs(tmp, cfg);

    ScalarField next(w0.grid);
    for (std::size_t i = 0; i < next.values.size(); ++i)
        next.values[i] = w0.values[i] + dt / 6.0 *
                             (k1.wdot.values[i] + 2.0 * k2.wdot.values[i] +
                              2.0 * k3.wdot.values[i] + k4.wdot.values[i]);
    if (cfg.symmetrize) next = grid::symmetrized(next);
    grid::polar_filter_inplace(next);
    for (double v : next.values) {
        if (!std::isfinite(v))
            throw geometry::NumericError("flow step produced a non-finite radius", -1, 0, 0);
    }
    state.w = std::move(next);
    state.t += dt;
    state.dt = dt;
    ++state.steps;
}

[[nodiscard]] inline double stable_dt(const RhsEval& rhs, const ScalarField& w, const FlowConfig& cfg)
{
    const grid::GridSpec& g = *w.grid;
    // explicit RK4 stability against the filtered spatial symbol
    const double nu = std::max(rhs.diffusivity, 1e-12);
    double dt = 2.78 / (nu * g.stiffness_scale);
    if (cfg.kind == FlowKind::inverse) {
        dt = std::min(dt, g.min_spacing / std::max(rhs.max_speed, 1e-12));
    } else {
        dt = std::min(dt, g.min_spacing * g.min_spacing / std::max(rhs.max_speed, 1e-12));
    }
    return cfg.cfl_safety * dt;
}

}  // namespace detail

/// Advance by one adaptively sized RK4 step (never past t_end).
[[nodiscard]] inline FlowState step(FlowState state, const FlowConfig& cfg)
{
    const detail::RhsEval probe = detail::eval_rhs(state.w, cfg);
    double dt = detail::stable_dt(probe, state.w, cfg);
    dt = std::min(dt, cfg.dt_max);
    if (state.steps == 0 && cfg.dt_init > 0.0) dt = std::min(dt, cfg.dt_init);
    const double remaining = cfg.t_end - state.t;
    if (remaining > 0.0) dt = std::min(dt, remaining);
    if (!(dt > 1e-12)) throw std::runtime_error("flow step: time step underflow");
    detail::advance_fixed(state, dt, cfg);
    return state;
}

/// Rescaled surface: u = e^{-rt} w - 1 (r = 0 leaves the surface as-is).
[[nodiscard]] inline Hypersurface rescale(const FlowState& state)
{
    const double scale = std::exp(-state.r * state.t);
    ScalarField u = state.w;
    for (double& v : u.values) v = scale * v - 1.0;
    return geometry::make_hypersurface(std::move(u), state.w.grid->dim);
}

struct DiagnosticsRow {
    double t = 0.0;
    double quermass_k = 0.0;    // I_k of the rescaled surface
    double quermass_km1 = 0.0;  // I_{k-1} of the rescaled surface
    double volume = 0.0;
    std::optional<double> a_functional;
    std::optional<double> stability_ratio;  // S = (I_k - I_k(B)) / A
    double alpha_fraenkel = 0.0;
    std::optional<double> vp_ratio;  // (I_{k-1} - I_{k-1}(B)) / ||u||^2
    Eigen::Vector3d bar = Eigen::Vector3d::Zero();
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double cone_margin = 0.0;  // min over nodes of min_{1<=j<=k} sigma_j
    bool barycenter_ok = true;
    double pinching_ratio = 0.0;  // min sigma_n / sigma_1^n (dim 2)
};

/// Guard factor of the stability-ratio report: S is withheld once the deficit
/// is within a small multiple of the measured conservation error, where the
/// ratio carries no information.
inline constexpr double stability_guard = 2.0;

[[nodiscard]] inline DiagnosticsRow diagnostics(const FlowState& state, const FlowConfig& cfg)
{
    const int n = cfg.dim;
    Hypersurface m = rescale(state);
    m.k_max = n;
    const CurvatureBundle b = geometry::curvature_bundle(m);

    DiagnosticsRow row;
    row.t = state.t;
    row.quermass_k = geometry::quermass_integral(b, cfg.k);
    row.quermass_km1 = geometry::quermass_integral(b, cfg.k - 1);
    row.volume = geometry::quermass_integral(b, -1);

    const double ik_ball = symfun::binomial(n, cfg.k) * geometry::sphere_measure(n);
    const double ikm1_ball = symfun::binomial(n, cfg.k - 1) * geometry::sphere_measure(n);

    if (cfg.k >= 1 && cfg.k <= n - 1) {
        const double a = geometry::stability_functional_A(m, cfg.k);
        row.a_functional = a;
        const double num = row.quermass_k - ik_ball;
        const double conservation_error = std::abs(row.quermass_km1 - ikm1_ball);
        const double floor =
            stability_guard * conservation_error * (ik_ball / ikm1_ball) + 1e2 * 1e-16 * ik_ball;
        if (a > 0.0 && std::abs(num) > floor) row.stability_ratio = num / a;
    }

    row.alpha_fraenkel = geometry::fraenkel_asymmetry(m).alpha;

    if (cfg.kind == FlowKind::volume_preserving) {
        double usq = 0.0;
        for (std::size_t i = 0; i < m.u.values.size(); ++i)
            usq += m.grid->weight[i] * m.u.values[i] * m.u.values[i];
        if (usq > 1e-30) row.vp_ratio = (row.quermass_km1 - ikm1_ball) / usq;
    }

    row.bar = geometry::barycenter(m);
    const auto norms = grid::sup_norms(m.u);
    row.c0 = norms.c0;
    row.c1 = norms.c1;
    row.c2 = norms.c2;

    double margin = std::numeric_limits<double>::infinity();
    double pinch = std::numeric_limits<double>::infinity();
    for (int id = 0; id < m.grid->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        for (int j = 1; j <= cfg.k; ++j)
            margin = std::min(margin, b.sigma[static_cast<std::size_t>(j)][i]);
        if (n == 2) {
            const double s1 = b.sigma[1][i];
            pinch = std::min(pinch, b.sigma[2][i] / (s1 * s1));
        }
    }
    row.cone_margin = margin;
    row.pinching_ratio = n == 2 ? pinch : 0.0;

    // barycenter drift monitor (never enforced)
    const auto du = grid::gradient(m.u);
    const auto d2u = grid::hessian(m.u);
    double w12 = 0.0;
    for (int id = 0; id < m.grid->node_count(); ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        double hess_sq;
        if (n == 1) {
            hess_sq = d2u.tt[i] * d2u.tt[i];
            w12 += m.grid->weight[i] *
                   (m.u.values[i] * m.u.values[i] + du.comp_theta[i] * du.comp_theta[i] + hess_sq);
        } else {
            const double s2 = m.grid->sin_theta[static_cast<std::size_t>(m.grid->row_of(id))] *
                              m.grid->sin_theta[static_cast<std::size_t>(m.grid->row_of(id))];
            const double grad_sq = du.comp_theta[i] * du.comp_theta[i] +
                                   du.comp_phi[i] * du.comp_phi[i] / s2;
            hess_sq = d2u.tt[i] * d2u.tt[i] + 2.0 * d2u.tp[i] * d2u.tp[i] / s2 +
                      d2u.pp[i] * d2u.pp[i] / (s2 * s2);
            w12 += m.grid->weight[i] * (m.u.values[i] * m.u.values[i] + grad_sq + hess_sq);
        }
    }
    row.barycenter_ok = row.bar.norm() <= cfg.barycenter_K * row.c2 * w12 + 1e-12;
    return row;
}

struct RunResult {
    std::vector<DiagnosticsRow> rows;
    bool completed = false;
    std::string abort_reason;
    bool pinching_violated = false;
    double pinching_threshold = 0.0;
    double initial_c2 = 0.0;
};

using RowObserver = std::function<void(const FlowState&, const DiagnosticsRow&)>;

/// Normalize the initial surface (I_{k-1} for the inverse flow, volume for
/// the volume-preserving flow), then integrate to t_end emitting a
/// diagnostics row every diag_stride steps.
[[nodiscard]] inline RunResult run(const FlowConfig& cfg, const Hypersurface& initial,
                                   const RowObserver& observer = {})
{
    validate(cfg);
    if (initial.grid->dim != cfg.dim)
        throw std::domain_error("run: grid dimension does not match the flow configuration");

    const int normalize_order = cfg.kind == FlowKind::inverse ? cfg.k - 1 : -1;
    Hypersurface start = geometry::normalize_quermass(initial, normalize_order);

    RunResult result;
    result.initial_c2 = grid::sup_norms(start.u).c2;
    if (result.initial_c2 > cfg.initial_c2_gate)
        throw std::domain_error("run: initial surface is not nearly spherical (C2 = " +
                                std::to_string(result.initial_c2) + " > " +
                                std::to_string(cfg.initial_c2_gate) + ")");

    FlowState state;
    state.t = 0.0;
    state.w = start.u;
    for (double& v : state.w.values) v += 1.0;
    if (cfg.symmetrize) state.w = grid::symmetrized(state.w);
    state.r = cfg.kind == FlowKind::inverse
                  ? symfun::binomial(cfg.dim, cfg.k - 1) / symfun::binomial(cfg.dim, cfg.k)
                  : 0.0;

    const auto emit = [&](const FlowState& s) {
        DiagnosticsRow row = diagnostics(s, cfg);
        if (cfg.kind == FlowKind::volume_preserving && cfg.dim == 2 &&
            row.pinching_ratio < result.pinching_threshold)
            result.pinching_violated = true;
        result.rows.push_back(row);
        if (observer) observer(s, result.rows.back());
    };

    if (cfg.kind == FlowKind::volume_preserving && cfg.dim == 2) {
        const DiagnosticsRow first = diagnostics(state, cfg);
        result.pinching_threshold =
            cfg.pinching_cp > 0.0 ? cfg.pinching_cp : 0.9 * first.pinching_ratio;
    }

    try {
        emit(state);
        while (state.t < cfg.t_end - 1e-12) {
            state = step(state, cfg);
            if (state.steps % cfg.diag_stride == 0 || state.t >= cfg.t_end - 1e-12)
                emit(state);
        }
        result.completed = true;
    } catch (const ConeExitError& e) {
        result.abort_reason = e.what();
    } catch (const geometry::NumericError& e) {
        result.abort_reason = e.what();
    } catch (const std::runtime_error& e) {
        result.abort_reason = e.what();
    }
    return result;
}

enum class DerivativeCheck {
    sigma_integral,   // d/dt of the unrescaled integral of sigma_m
    radial_l2,        // d/dt ||u||_{L2}^2 of the (rescaled) radial perturbation
    radial_grad_l2,   // d/dt ||grad u||_{L2}^2 (inverse flow)
    quermass_km1      // d/dt I_{k-1} (volume-preserving flow)
};

struct DerivativePair {
    double measured = 0.0;
    double predicted = 0.0;
};

namespace detail {

[[nodiscard]] inline double check_quantity(const FlowState& state, const FlowConfig& cfg,
                                           DerivativeCheck kind, int m)
{
    switch (kind) {
        case DerivativeCheck::sigma_integral: {
            ScalarField u = state.w;
            for (double& v : u.values) v -= 1.0;
            Hypersurface surf = geometry::make_hypersurface(std::move(u), std::max(m, cfg.k));
            return geometry::quermass_integral(surf, m);
        }
        case DerivativeCheck::radial_l2: {
            const Hypersurface surf = rescale(state);
            double acc = 0.0;
            for (std::size_t i = 0; i < surf.u.values.size(); ++i)
                acc += surf.grid->weight[i] * surf.u.values[i] * surf.u.values[i];
            return acc;
        }
        case DerivativeCheck::radial_grad_l2: {
            const Hypersurface surf = rescale(state);
            return grid::integrate(grid::grad_norm_sq(grid::gradient(surf.u)));
        }
        case DerivativeCheck::quermass_km1: {
            ScalarField u = state.w;
            for (double& v : u.values) v -= 1.0;
            Hypersurface surf = geometry::make_hypersurface(std::move(u), cfg.k);
            return geometry::quermass_integral(surf, cfg.k - 1);
        }
    }
    throw std::logic_error("check_quantity: unreachable");
}

}  // namespace detail

/// Compare the measured time derivative of a flow quantity (centered finite
/// difference along short probe integrations) with its closed-form rate
/// evaluated at the current state.
[[nodiscard]] inline DerivativePair flow_derivative_check(const FlowState& state,
                                                          const FlowConfig& cfg,
                                                          DerivativeCheck kind, int m = 0)
{
    validate(cfg);
    const int n = cfg.dim;
    if (kind == DerivativeCheck::sigma_integral &&
        (cfg.kind != FlowKind::inverse || m < 0 || m >= n))
        throw std::domain_error("flow_derivative_check: sigma_integral needs the inverse flow, 0 <= m < n");
    if (kind == DerivativeCheck::radial_grad_l2 && cfg.kind != FlowKind::inverse)
        throw std::domain_error("flow_derivative_check: radial_grad_l2 is an inverse-flow identity");
    if (kind == DerivativeCheck::quermass_km1 && cfg.kind != FlowKind::volume_preserving)
        throw std::domain_error("flow_derivative_check: quermass_km1 is a volume-preserving identity");

    DerivativePair out;

    // predicted rate from the current state
    {
        Hypersurface m_now = rescale(state);
        m_now.k_max = n;
        const CurvatureBundle b = geometry::curvature_bundle(m_now);
        const double r = state.r;
        switch (kind) {
            case DerivativeCheck::sigma_integral: {
                ScalarField u = state.w;
                for (double& v : u.values) v -= 1.0;
                Hypersurface raw = geometry::make_hypersurface(std::move(u), n);
                const CurvatureBundle braw = geometry::curvature_bundle(raw);
                double acc = 0.0;
                for (int id = 0; id < raw.grid->node_count(); ++id) {
                    const std::size_t i = static_cast<std::size_t>(id);
                    const double inv_f = braw.sigma[static_cast<std::size_t>(cfg.k - 1)][i] /
                                         braw.sigma[static_cast<std::size_t>(cfg.k)][i];
                    acc += braw.measure(id) * braw.sigma[static_cast<std::size_t>(m + 1)][i] * inv_f;
                }
                out.predicted = (m + 1) * acc;
                break;
            }
            case DerivativeCheck::radial_l2: {
                if (cfg.kind == FlowKind::inverse) {
                    const double grad_sq =
                        grid::integrate(grid::grad_norm_sq(grid::gradient(m_now.u)));
                    out.predicted = -2.0 / n * r * grad_sq;
                } else {
                    double acc = 0.0;
                    const auto du = grid::gradient(m_now.u);
                    const auto gsq = grid::grad_norm_sq(du);
                    for (std::size_t i = 0; i < m_now.u.values.size(); ++i)
                        acc += m_now.grid->weight[i] *
                               (n * m_now.u.values[i] * m_now.u.values[i] - gsq.values[i]);
                    out.predicted = 2.0 * cfg.k / n * symfun::binomial(n, cfg.k) * acc;
                }
                break;
            }
            case DerivativeCheck::radial_grad_l2: {
                const auto lap = grid::laplacian(m_now.u);
                double lap_sq = 0.0;
                for (std::size_t i = 0; i < lap.values.size(); ++i)
                    lap_sq += m_now.grid->weight[i] * lap.values[i] * lap.values[i];
                out.predicted = -2.0 / n * r * lap_sq;
                break;
            }
            case DerivativeCheck::quermass_km1: {
                ScalarField u = state.w;
                for (double& v : u.values) v -= 1.0;
                Hypersurface raw = geometry::make_hypersurface(std::move(u), cfg.k);
                const CurvatureBundle braw = geometry::curvature_bundle(raw);
                const auto [g_speed, h] = speed_volume_preserving(braw, cfg.k, cfg.alpha);
                const double h_root = std::pow(h, 1.0 / cfg.alpha);
                double acc = 0.0;
                for (int id = 0; id < raw.grid->node_count(); ++id) {
                    const std::size_t i = static_cast<std::size_t>(id);
                    const double sk = braw.sigma[static_cast<std::size_t>(cfg.k)][i];
                    const double spow = std::pow(sk, cfg.alpha);
                    acc += braw.measure(id) * (sk - h_root) * (spow - h);
                }
                out.predicted = -cfg.k * acc;
                break;
            }
        }
    }

    // measured rate: symmetric probe integrations with a fixed small step
    const detail::RhsEval probe = detail::eval_rhs(state.w, cfg);
    const double dt_probe = std::min(0.5 * detail::stable_dt(probe, state.w, cfg), 2.5e-4);
    const int substeps = std::max(1, static_cast<int>(std::lround(1e-3 / dt_probe)));
    const double delta = substeps * dt_probe;

    FlowState fwd = state;
    FlowState bwd = state;
    for (int s = 0; s < substeps; ++s) detail::advance_fixed(fwd, dt_probe, cfg);
    for (int s = 0; s < substeps; ++s) detail::advance_fixed(bwd, -dt_probe, cfg);

    const std::vector<std::pair<double, double>> samples = {
        {state.t - delta, detail::check_quantity(bwd, cfg, kind, m)},
        {state.t, detail::check_quantity(state, cfg, kind, m)},
        {state.t + delta, detail::check_quantity(fwd, cfg, kind, m)}};
    out.measured = oracle::fd_time_derivative(samples, state.t);
    return out;
}

/// Convenience: state at t = 0 for a normalized initial surface.
[[nodiscard]] inline FlowState initial_state(const FlowConfig& cfg, const Hypersurface& initial)
{
    validate(cfg);
    const int normalize_order = cfg.kind == FlowKind::inverse ? cfg.k - 1 : -1;
    Hypersurface start = geometry::normalize_quermass(initial, normalize_order);
    FlowState state;
    state.w = start.u;
    for (double& v : state.w.values) v += 1.0;
    state.r = cfg.kind == FlowKind::inverse
                  ? symfun::binomial(cfg.dim, cfg.k - 1) / symfun::binomial(cfg.dim, cfg.k)
                  : 0.0;
    return state;
}

}  // namespace qflow::flows
