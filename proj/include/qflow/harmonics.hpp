#pragma once

#include "qflow/spheregrid.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow::harmonics {

using grid::GridPtr;
using grid::ScalarField;

/// Real orthonormal spherical-harmonic coefficients of a scalar field.
///
/// Layout: (l, m) with l ascending and m from -l to l. On S^2 negative m are
/// the sine harmonics, positive m the cosine harmonics (Condon-Shortley-free
/// normalization), and the count is (l_max+1)^2. On S^1 each l >= 1 carries
/// exactly the pair m = -l (sine) and m = +l (cosine), count 2 l_max + 1.
/// Laplace eigenvalues are lambda_l = l (l + dim - 1).
struct HarmonicSpectrum {
    int dim = 2;
    int l_max = 0;
    std::vector<double> coeff;

    [[nodiscard]] int count() const
    {
        return dim == 1 ? 2 * l_max + 1 : (l_max + 1) * (l_max + 1);
    }

    [[nodiscard]] int index(int l, int m) const
    {
        if (dim == 1) {
            if (l == 0) return 0;
            return 2 * l - 1 + (m > 0 ? 1 : 0);
        }
        return l * l + (m + l);
    }

    [[nodiscard]] double at(int l, int m) const
    {
        return coeff[static_cast<std::size_t>(index(l, m))];
    }

    [[nodiscard]] double eigenvalue(int l) const
    {
        return static_cast<double>(l) * (l + dim - 1);
    }

    /// Iterate (l, m, coeff); m spans the layout above.
    template <typename Fn>
    void for_each(Fn&& fn) const
    {
        for (int l = 0; l <= l_max; ++l) {
            if (dim == 1) {
                if (l == 0) {
                    fn(0, 0, coeff[0]);
                } else {
                    fn(l, -l, coeff[static_cast<std::size_t>(index(l, -l))]);
                    fn(l, l, coeff[static_cast<std::size_t>(index(l, l))]);
                }
            } else {
                for (int m = -l; m <= l; ++m)
                    fn(l, m, coeff[static_cast<std::size_t>(index(l, m))]);
            }
        }
    }
};

namespace detail {

/// Fully normalized associated Legendre values Pbar_{l m}(cos theta) for all
/// l <= l_max at fixed m, without the Condon-Shortley phase:
/// int_{S^2} (Pbar_{lm} tri_m(phi))^2 dA = 1 with tri_m in {1, sqrt2 cos, sqrt2 sin}.
inline void legendre_column(int l_max, int m, double cos_t, double sin_t, std::vector<double>& out)
{
    out.assign(static_cast<std::size_t>(l_max + 1), 0.0);
    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int k = 1; k <= m; ++k)
        pmm *= sin_t * std::sqrt((2.0 * k + 1.0) / (2.0 * k));
    if (m <= l_max) out[static_cast<std::size_t>(m)] = pmm;
    if (m + 1 <= l_max)
        out[static_cast<std::size_t>(m + 1)] = pmm * cos_t * std::sqrt(2.0 * m + 3.0);
    for (int l = m + 2; l <= l_max; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        out[static_cast<std::size_t>(l)] =
            a * (cos_t * out[static_cast<std::size_t>(l - 1)] - b * out[static_cast<std::size_t>(l - 2)]);
    }
}

}  // namespace detail

/// Orthonormal real harmonic Y_{l m}(theta, phi) on S^2 (point evaluation).
[[nodiscard]] inline double real_harmonic(int l, int m, double theta, double phi)
{
    const int am = std::abs(m);
    if (am > l) throw std::domain_error("real_harmonic: |m| > l");
    std::vector<double> col;
    detail::legendre_column(l, am, std::cos(theta), std::sin(theta), col);
    const double p = col[static_cast<std::size_t>(l)];
    if (m == 0) return p;
    const double sqrt2 = std::sqrt(2.0);
    return m > 0 ? sqrt2 * p * std::cos(am * phi) : sqrt2 * p * std::sin(am * phi);
}

/// Orthonormal circle harmonic: l = 0 -> 1/sqrt(2 pi); l >= 1 -> cos/sin(l t)/sqrt(pi).
[[nodiscard]] inline double circle_harmonic(int l, int m, double t)
{
    if (l == 0) return 1.0 / std::sqrt(2.0 * M_PI);
    const double scale = 1.0 / std::sqrt(M_PI);
    return m > 0 ? scale * std::cos(l * t) : scale * std::sin(l * t);
}

/// Quadrature projection onto the orthonormal real harmonics up to l_max.
/// Exact on band-limited fields (synthesize(analyze(f)) = f to machine
/// precision when the band fits the grid).
[[nodiscard]] inline HarmonicSpectrum analyze(const ScalarField& f, int l_max)
{
    const grid::GridSpec& g = *f.grid;
    HarmonicSpectrum spec;
    spec.dim = g.dim;
    spec.l_max = l_max;
    if (l_max < 0) throw std::domain_error("analyze: negative band limit");

    if (g.dim == 1) {
        if (2 * l_max >= g.n_lon)
            throw std::domain_error("analyze: band limit exceeds circle resolution");
        spec.coeff.assign(static_cast<std::size_t>(spec.count()), 0.0);
        const double w = 2.0 * M_PI / g.n_lon;
        for (int j = 0; j < g.n_lon; ++j) {
            const double t = g.theta[static_cast<std::size_t>(j)];
            const double v = w * f.values[static_cast<std::size_t>(j)];
            spec.coeff[0] += v * circle_harmonic(0, 0, t);
            for (int l = 1; l <= l_max; ++l) {
                spec.coeff[static_cast<std::size_t>(spec.index(l, -l))] += v * circle_harmonic(l, -1, t);
                spec.coeff[static_cast<std::size_t>(spec.index(l, l))] += v * circle_harmonic(l, 1, t);
            }
        }
        return spec;
    }

    if (l_max > g.n_lat - 1)
        throw std::domain_error("analyze: band limit " + std::to_string(l_max) +
                                " exceeds latitude resolution " + std::to_string(g.n_lat));
    if (2 * l_max >= g.n_lon)
        throw std::domain_error("analyze: band limit exceeds longitude resolution");

    spec.coeff.assign(static_cast<std::size_t>(spec.count()), 0.0);
    const int n = g.n_lon;
    const double dphi = 2.0 * M_PI / n;
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    std::vector<double> col;
    const double sqrt2 = std::sqrt(2.0);

    // longitudinal Fourier sums per row, then Legendre projection per m
    std::vector<std::vector<std::complex<double>>> fourier(
        static_cast<std::size_t>(g.n_lat), std::vector<std::complex<double>>(static_cast<std::size_t>(l_max + 1)));
    for (int i = 0; i < g.n_lat; ++i) {
        for (int j = 0; j < n; ++j)
            buf[static_cast<std::size_t>(j)] = f.values[static_cast<std::size_t>(g.index(i, j))];
        g.dft.transform(buf.data(), false);
        for (int m = 0; m <= l_max; ++m)
            fourier[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
                buf[static_cast<std::size_t>(m)] * dphi;
    }
    for (int m = 0; m <= l_max; ++m) {
        for (int i = 0; i < g.n_lat; ++i) {
            detail::legendre_column(l_max, m, g.cos_theta[static_cast<std::size_t>(i)],
                                    g.sin_theta[static_cast<std::size_t>(i)], col);
            const std::complex<double> fm = fourier[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
            const double wrow = g.row_weight[static_cast<std::size_t>(i)];
            for (int l = m; l <= l_max; ++l) {
                const double p = wrow * col[static_cast<std::size_t>(l)];
                if (m == 0) {
                    spec.coeff[static_cast<std::size_t>(spec.index(l, 0))] += p * fm.real();
                } else {
                    spec.coeff[static_cast<std::size_t>(spec.index(l, m))] += sqrt2 * p * fm.real();
                    spec.coeff[static_cast<std::size_t>(spec.index(l, -m))] -= sqrt2 * p * fm.imag();
                }
            }
        }
    }
    return spec;
}

/// Evaluate a spectrum back onto a grid.
[[nodiscard]] inline ScalarField synthesize(const HarmonicSpectrum& spec, const GridPtr& g)
{
    if (spec.dim != g->dim) throw std::domain_error("synthesize: dimension mismatch");
    ScalarField out(g);
    if (g->dim == 1) {
        for (int j = 0; j < g->n_lon; ++j) {
            const double t = g->theta[static_cast<std::size_t>(j)];
            double acc = spec.coeff[0] * circle_harmonic(0, 0, t);
            for (int l = 1; l <= spec.l_max; ++l) {
                acc += spec.at(l, -l) * circle_harmonic(l, -1, t) +
                       spec.at(l, l) * circle_harmonic(l, 1, t);
            }
            out.values[static_cast<std::size_t>(j)] = acc;
        }
        return out;
    }

    const int n = g->n_lon;
    const double sqrt2 = std::sqrt(2.0);
    std::vector<double> col;
    std::vector<double> cos_amp(static_cast<std::size_t>(spec.l_max + 1));
    std::vector<double> sin_amp(static_cast<std::size_t>(spec.l_max + 1));
    for (int i = 0; i < g->n_lat; ++i) {
        std::fill(cos_amp.begin(), cos_amp.end(), 0.0);
        std::fill(sin_amp.begin(), sin_amp.end(), 0.0);
        for (int m = 0; m <= spec.l_max; ++m) {
            detail::legendre_column(spec.l_max, m, g->cos_theta[static_cast<std::size_t>(i)],
                                    g->sin_theta[static_cast<std::size_t>(i)], col);
            for (int l = m; l <= spec.l_max; ++l) {
                const double p = col[static_cast<std::size_t>(l)];
                if (m == 0) {
                    cos_amp[0] += spec.at(l, 0) * p;
                } else {
                    cos_amp[static_cast<std::size_t>(m)] += sqrt2 * spec.at(l, m) * p;
                    sin_amp[static_cast<std::size_t>(m)] += sqrt2 * spec.at(l, -m) * p;
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            const double phi = 2.0 * M_PI * j / n;
            double acc = cos_amp[0];
            for (int m = 1; m <= spec.l_max; ++m)
                acc += cos_amp[static_cast<std::size_t>(m)] * std::cos(m * phi) +
                       sin_amp[static_cast<std::size_t>(m)] * std::sin(m * phi);
            out.values[static_cast<std::size_t>(g->index(i, j))] = acc;
        }
    }
    return out;
}

struct SobolevNorms {
    double l2_sq = 0.0;    // sum a^2
    double grad_sq = 0.0;  // sum lambda_l a^2
    double lap_sq = 0.0;   // sum lambda_l^2 a^2
};

[[nodiscard]] inline SobolevNorms sobolev_norms(const HarmonicSpectrum& spec)
{
    SobolevNorms out;
    spec.for_each([&](int l, int, double a) {
        const double lam = spec.eigenvalue(l);
        out.l2_sq += a * a;
        out.grad_sq += lam * a * a;
        out.lap_sq += lam * lam * a * a;
    });
    return out;
}

/// Zero every coefficient with l <= up_to_l.
[[nodiscard]] inline HarmonicSpectrum strip_low_modes(const HarmonicSpectrum& spec, int up_to_l)
{
    if (up_to_l > spec.l_max) throw std::domain_error("strip_low_modes: l beyond band limit");
    HarmonicSpectrum out = spec;
    out.for_each([&](int l, int m, double) {
        if (l <= up_to_l) out.coeff[static_cast<std::size_t>(out.index(l, m))] = 0.0;
    });
    return out;
}

/// Spectral-gap margin ||lap u||^2 - 2 (n+1) ||grad u||^2. Termwise
/// lambda (lambda - 2 (n+1)) >= 0 for every l != 1, so the margin is
/// nonnegative whenever the l = 1 coefficients vanish.
[[nodiscard]] inline double poincare_margin(const HarmonicSpectrum& spec)
{
    const SobolevNorms n = sobolev_norms(spec);
    return n.lap_sq - 2.0 * (spec.dim + 1) * n.grad_sq;
}

}  // namespace qflow::harmonics
