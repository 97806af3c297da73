#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qflow::oracle {

/// Literal subset-sum evaluation of the k-th elementary symmetric polynomial.
/// Exponential in n; ground truth for the fast recurrences, n <= 20.
[[nodiscard]] inline double brute_sigma(const Eigen::VectorXd& lambda, int k)
{
    const int n = static_cast<int>(lambda.size());
    if (n < 1 || n > 20) throw std::domain_error("brute_sigma: n out of range");
    if (k < 0 || k > n) throw std::domain_error("brute_sigma: k out of range");
    if (k == 0) return 1.0;
    double total = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::function<void(int, int, double)> rec = [&](int start, int depth, double prod) {
        if (depth == k) {
            total += prod;
            return;
        }
        for (int i = start; i <= n - (k - depth); ++i) {
            rec(i + 1, depth + 1, prod * lambda(i));
        }
    };
    rec(0, 0, 1.0);
    return total;
}

/// Spheroid with equatorial semi-axis a and polar semi-axis c, centered at the
/// origin. Starshaped for any a, c > 0.
struct SpheroidSpec {
    double a = 1.0;
    double c = 1.0;
};

/// Radius of the spheroid along the ray with colatitude theta.
[[nodiscard]] inline double spheroid_radius(const SpheroidSpec& s, double theta)
{
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    return 1.0 / std::sqrt(st * st / (s.a * s.a) + ct * ct / (s.c * s.c));
}

struct PrincipalPair {
    double meridian = 0.0;
    double parallel = 0.0;
};

/// Closed-form principal curvatures of the spheroid at the point whose ray
/// from the origin has colatitude theta. Uses the surface-of-revolution
/// parametrization (a sin psi, c cos psi), fully independent of the
/// radial-graph machinery.
[[nodiscard]] inline PrincipalPair spheroid_curvatures(const SpheroidSpec& s, double theta)
{
    const double w = spheroid_radius(s, theta);
    // a sin(psi) = w sin(theta), c cos(psi) = w cos(theta)
    const double psi = std::atan2(w * std::sin(theta) / s.a, w * std::cos(theta) / s.c);
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    const double q = std::sqrt(s.a * s.a * cp * cp + s.c * s.c * sp * sp);
    PrincipalPair pair;
    pair.meridian = s.a * s.c / (q * q * q);
    pair.parallel = s.c / (s.a * q);
    return pair;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

/// Curvature integrals I_k of the spheroid boundary by 1-D adaptive quadrature
/// over the parametric angle: I_k = int sigma_k dA for k in {0, 1, 2},
/// I_{-1} = volume = (4/3) pi a^2 c exactly.
[[nodiscard]] inline double spheroid_reference(const SpheroidSpec& s, int k)
{
    if (k < -1 || k > 2) throw std::domain_error("spheroid_reference: k out of range");
    if (k == -1) return 4.0 * M_PI / 3.0 * s.a * s.a * s.c;
    const auto integrand = [&](double psi) {
        const double cp = std::cos(psi);
        const double sp = std::sin(psi);
        const double q = std::sqrt(s.a * s.a * cp * cp + s.c * s.c * sp * sp);
        const double k_mer = s.a * s.c / (q * q * q);
        const double k_par = s.c / (s.a * q);
        const double area = 2.0 * M_PI * s.a * sp * q;
        double sigma = 1.0;
        if (k == 1) sigma = k_mer + k_par;
        if (k == 2) sigma = k_mer * k_par;
        return sigma * area;
    };
    return detail::integrate_1d(integrand, 0.0, M_PI, 1e-13);
}

/// Centered second-order time derivative from a sampled series. Picks the
/// closest bracketing pair around `at`; requires at least three samples.
[[nodiscard]] inline double fd_time_derivative(const std::vector<std::pair<double, double>>& samples,
                                               double at)
{
    if (samples.size() < 3) throw std::domain_error("fd_time_derivative: need at least 3 samples");
    int center = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const double d = std::abs(samples[i].first - at);
        if (d < best) {
            best = d;
            center = static_cast<int>(i);
        }
    }
    if (center < 0) throw std::domain_error("fd_time_derivative: no interior sample brackets t");
    const auto& lo = samples[static_cast<std::size_t>(center - 1)];
    const auto& hi = samples[static_cast<std::size_t>(center + 1)];
    const double dt = hi.first - lo.first;
    if (!(dt > 0.0)) throw std::domain_error("fd_time_derivative: samples not increasing in t");
    return (hi.second - lo.second) / dt;
}

}  // namespace qflow::oracle
