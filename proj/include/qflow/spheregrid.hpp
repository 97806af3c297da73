#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow::grid {

namespace detail {

/// In-place complex DFT, radix-2 when the length is a power of two, direct
/// O(N^2) evaluation otherwise. Forward is unnormalized, inverse carries 1/N.
struct Dft {
    int n = 0;
    bool radix2 = false;
    std::vector<int> bitrev;
    std::vector<std::complex<double>> roots;  // e^{-2 pi i k / n}, k = 0..n-1

    Dft() = default;

    explicit Dft(int size) : n(size)
    {
        radix2 = (n > 0) && ((n & (n - 1)) == 0);
        roots.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double ang = -2.0 * M_PI * k / n;
            roots[static_cast<std::size_t>(k)] = {std::cos(ang), std::sin(ang)};
        }
        if (radix2) {
            bitrev.resize(static_cast<std::size_t>(n));
            int bits = 0;
            while ((1 << bits) < n) ++bits;
            for (int i = 0; i < n; ++i) {
                int r = 0;
                for (int b = 0; b < bits; ++b)
                    if (i & (1 << b)) r |= 1 << (bits - 1 - b);
                bitrev[static_cast<std::size_t>(i)] = r;
            }
        }
    }

    void transform(std::complex<double>* data, bool inverse) const
    {
        if (radix2) {
            for (int i = 0; i < n; ++i) {
                const int r = bitrev[static_cast<std::size_t>(i)];
                if (i < r) std::swap(data[i], data[r]);
            }
            for (int len = 2; len <= n; len <<= 1) {
                const int stride = n / len;
                for (int start = 0; start < n; start += len) {
                    for (int k = 0; k < len / 2; ++k) {
                        std::complex<double> w = roots[static_cast<std::size_t>(k * stride)];
                        if (inverse) w = std::conj(w);
                        const auto even = data[start + k];
                        const auto odd = data[start + k + len / 2] * w;
                        data[start + k] = even + odd;
                        data[start + k + len / 2] = even - odd;
                    }
                }
            }
        } else {
            std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
            for (int m = 0; m < n; ++m) {
                std::complex<double> acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    std::complex<double> w = roots[static_cast<std::size_t>((m * j) % n)];
                    if (inverse) w = std::conj(w);
                    acc += data[j] * w;
                }
                out[static_cast<std::size_t>(m)] = acc;
            }
            std::copy(out.begin(), out.end(), data);
        }
        if (inverse) {
            const double inv = 1.0 / n;
            for (int i = 0; i < n; ++i) data[i] *= inv;
        }
    }
};

/// Fornberg weights for derivative orders 0..2 at x0 over m <= 9 distinct nodes.
inline void fornberg_weights(double x0, const double* x, int m, double w1[9], double w2[9])
{
    double c[9][3] = {};
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < m; ++i) {
        const int mn = std::min(i, 2);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    for (int i = 0; i < m; ++i) {
        w1[i] = c[i][1];
        w2[i] = c[i][2];
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes descending (so the
/// corresponding colatitudes ascend from the north pole).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = xi;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2 * l - 1) * xi * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double delta = p1 / dp;
            xi -= delta;
            if (std::abs(delta) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = xi;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

}  // namespace detail

/// Discrete sphere: S^1 as uniform angles with trapezoid weights, S^2 as
/// Gauss-Legendre colatitudes times uniform longitudes. Latitude derivatives
/// use 9-point centered stencils with pole-crossing ghosts obtained from the
/// (theta -> -theta, phi -> phi + pi) continuation; longitude derivatives are
/// pseudo-spectral. The wide stencil keeps the cot(theta)-amplified terms of
/// the covariant operators accurate on the rows nearest the poles.
struct GridSpec {
    int dim = 2;
    int n_lat = 0;
    int n_lon = 0;

    std::vector<double> theta;      // per row (dim 2) / per node angle (dim 1)
    std::vector<double> sin_theta;  // per row, dim 2
    std::vector<double> cos_theta;
    std::vector<double> row_weight;                   // Gauss-Legendre weight per row
    std::vector<double> weight;                       // per-node area weight, sums to |S^n|
    std::vector<std::array<double, 3>> position;      // unit vectors

    struct LatStencil {
        std::array<int, 9> row{};
        std::array<bool, 9> shifted{};  // ghost slot: read at phi + pi
        std::array<double, 9> d1{};
        std::array<double, 9> d2{};
    };
    std::vector<LatStencil> lat_stencil;  // per row, dim 2

    // Longitudinal wavenumber cap per row: explicit stepping keeps only modes
    // resolvable at that latitude (reduced-grid rule, floor of 2).
    std::vector<int> mode_cap;

    double min_spacing = 0.0;
    double stiffness_scale = 0.0;  // bound on the filtered Laplace symbol

    detail::Dft dft;

    [[nodiscard]] int node_count() const { return dim == 1 ? n_lon : n_lat * n_lon; }
    [[nodiscard]] int index(int row, int col) const { return row * n_lon + col; }
    [[nodiscard]] int row_of(int node) const { return dim == 1 ? node : node / n_lon; }
    [[nodiscard]] double node_theta(int node) const
    {
        return dim == 1 ? theta[static_cast<std::size_t>(node)]
                        : theta[static_cast<std::size_t>(node / n_lon)];
    }
    [[nodiscard]] double node_phi(int node) const
    {
        return dim == 1 ? 0.0 : 2.0 * M_PI * (node % n_lon) / n_lon;
    }
    [[nodiscard]] double sphere_area() const { return dim == 1 ? 2.0 * M_PI : 4.0 * M_PI; }
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Build a sphere grid. dim = 1: circle with n_lon uniform nodes (n_lat
/// ignored). dim = 2: n_lat Gauss-Legendre colatitudes x n_lon longitudes.
[[nodiscard]] inline GridPtr build_grid(int dim, int n_lat, int n_lon)
{
    if (dim != 1 && dim != 2)
        throw std::domain_error("build_grid: unsupported sphere dimension " + std::to_string(dim));
    auto g = std::make_shared<GridSpec>();
    g->dim = dim;
    if (dim == 1) {
        if (n_lon < 16 || n_lon % 2 != 0)
            throw std::domain_error("build_grid: circle needs n_lon >= 16 and even");
        g->n_lat = 0;
        g->n_lon = n_lon;
        g->theta.resize(static_cast<std::size_t>(n_lon));
        g->weight.assign(static_cast<std::size_t>(n_lon), 2.0 * M_PI / n_lon);
        g->position.resize(static_cast<std::size_t>(n_lon));
        for (int j = 0; j < n_lon; ++j) {
            const double t = 2.0 * M_PI * j / n_lon;
            g->theta[static_cast<std::size_t>(j)] = t;
            g->position[static_cast<std::size_t>(j)] = {std::cos(t), std::sin(t), 0.0};
        }
        g->min_spacing = 2.0 * M_PI / n_lon;
        const double half = n_lon / 2;
        g->stiffness_scale = half * half;
        g->dft = detail::Dft(n_lon);
        return g;
    }

    if (n_lat < 8 || n_lat % 2 != 0)
        throw std::domain_error("build_grid: n_lat >= 8 and even required");
    if (n_lon < 16 || n_lon % 2 != 0)
        throw std::domain_error("build_grid: n_lon >= 16 and even required");

    g->n_lat = n_lat;
    g->n_lon = n_lon;
    std::vector<double> x, wq;
    detail::gauss_legendre(n_lat, x, wq);
    g->theta.resize(static_cast<std::size_t>(n_lat));
    g->sin_theta.resize(static_cast<std::size_t>(n_lat));
    g->cos_theta.resize(static_cast<std::size_t>(n_lat));
    g->row_weight = wq;
    for (int i = 0; i < n_lat; ++i) {
        g->theta[static_cast<std::size_t>(i)] = std::acos(x[static_cast<std::size_t>(i)]);
        g->cos_theta[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
        g->sin_theta[static_cast<std::size_t>(i)] =
            std::sqrt(1.0 - x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)]);
    }
    const double dphi = 2.0 * M_PI / n_lon;
    g->weight.resize(static_cast<std::size_t>(n_lat * n_lon));
    g->position.resize(static_cast<std::size_t>(n_lat * n_lon));
    for (int i = 0; i < n_lat; ++i) {
        for (int j = 0; j < n_lon; ++j) {
            const double phi = dphi * j;
            const int id = g->index(i, j);
            g->weight[static_cast<std::size_t>(id)] = wq[static_cast<std::size_t>(i)] * dphi;
            g->position[static_cast<std::size_t>(id)] = {
                g->sin_theta[static_cast<std::size_t>(i)] * std::cos(phi),
                g->sin_theta[static_cast<std::size_t>(i)] * std::sin(phi),
                g->cos_theta[static_cast<std::size_t>(i)]};
        }
    }

    g->lat_stencil.resize(static_cast<std::size_t>(n_lat));
    double min_gap = g->theta[0] * 2.0;
    for (int i = 1; i < n_lat; ++i)
        min_gap = std::min(min_gap, g->theta[static_cast<std::size_t>(i)] -
                                        g->theta[static_cast<std::size_t>(i - 1)]);
    g->min_spacing = std::min(min_gap, dphi);

    for (int i = 0; i < n_lat; ++i) {
        auto& st = g->lat_stencil[static_cast<std::size_t>(i)];
        double nodes[9];
        for (int s = -4; s <= 4; ++s) {
            const int slot = s + 4;
            const int r = i + s;
            if (r < 0) {
                st.row[static_cast<std::size_t>(slot)] = -1 - r;
                st.shifted[static_cast<std::size_t>(slot)] = true;
                nodes[slot] = -g->theta[static_cast<std::size_t>(-1 - r)];
            } else if (r >= n_lat) {
                st.row[static_cast<std::size_t>(slot)] = 2 * n_lat - 1 - r;
                st.shifted[static_cast<std::size_t>(slot)] = true;
                nodes[slot] = 2.0 * M_PI - g->theta[static_cast<std::size_t>(2 * n_lat - 1 - r)];
            } else {
                st.row[static_cast<std::size_t>(slot)] = r;
                st.shifted[static_cast<std::size_t>(slot)] = false;
                nodes[slot] = g->theta[static_cast<std::size_t>(r)];
            }
        }
        double w1[9], w2[9];
        detail::fornberg_weights(g->theta[static_cast<std::size_t>(i)], nodes, 9, w1, w2);
        // pin the center weight so constants differentiate to exactly zero
        double s1 = 0.0, s2 = 0.0;
        for (int s = 0; s < 9; ++s) {
            if (s == 4) continue;
            s1 += w1[s];
            s2 += w2[s];
        }
        w1[4] = -s1;
        w2[4] = -s2;
        for (int s = 0; s < 9; ++s) {
            st.d1[static_cast<std::size_t>(s)] = w1[s];
            st.d2[static_cast<std::size_t>(s)] = w2[s];
        }
    }

    g->mode_cap.resize(static_cast<std::size_t>(n_lat));
    const int half = n_lon / 2;
    double stiffness = 0.0;
    for (int i = 0; i < n_lat; ++i) {
        const double s = g->sin_theta[static_cast<std::size_t>(i)];
        int cap = static_cast<int>(std::floor(s * half));
        cap = std::clamp(cap, 2, half);
        g->mode_cap[static_cast<std::size_t>(i)] = cap;
        const auto& st = g->lat_stencil[static_cast<std::size_t>(i)];
        double lat2 = 0.0, lat1 = 0.0;
        for (int k = 0; k < 9; ++k) {
            lat2 += std::abs(st.d2[static_cast<std::size_t>(k)]);
            lat1 += std::abs(st.d1[static_cast<std::size_t>(k)]);
        }
        const double cot = std::abs(g->cos_theta[static_cast<std::size_t>(i)]) / s;
        const double symbol = lat2 + cot * lat1 + static_cast<double>(cap) * cap / (s * s);
        stiffness = std::max(stiffness, symbol);
    }
    g->stiffness_scale = stiffness;
    g->dft = detail::Dft(n_lon);
    return g;
}

struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g)
        : grid(std::move(g)), values(static_cast<std::size_t>(grid->node_count()), 0.0)
    {
    }
};

/// Sample a function of (theta, phi) on every node. For dim 1, phi is 0 and
/// theta is the circle angle.
[[nodiscard]] inline ScalarField make_field(const GridPtr& g,
                                            const std::function<double(double, double)>& f)
{
    ScalarField out(g);
    const int count = g->node_count();
    for (int id = 0; id < count; ++id)
        out.values[static_cast<std::size_t>(id)] = f(g->node_theta(id), g->node_phi(id));
    return out;
}

struct CovectorField {
    GridPtr grid;
    std::vector<double> comp_theta;  // lowered components in the coordinate frame
    std::vector<double> comp_phi;

    CovectorField() = default;
    explicit CovectorField(GridPtr g)
        : grid(std::move(g)),
          comp_theta(static_cast<std::size_t>(grid->node_count()), 0.0),
          comp_phi(static_cast<std::size_t>(grid->node_count()), 0.0)
    {
    }
};

struct SymTensorField {
    GridPtr grid;
    std::vector<double> tt;  // covariant Hessian components, lowered
    std::vector<double> tp;
    std::vector<double> pp;

    SymTensorField() = default;
    explicit SymTensorField(GridPtr g)
        : grid(std::move(g)),
          tt(static_cast<std::size_t>(grid->node_count()), 0.0),
          tp(static_cast<std::size_t>(grid->node_count()), 0.0),
          pp(static_cast<std::size_t>(grid->node_count()), 0.0)
    {
    }
};

[[nodiscard]] inline double integrate(const ScalarField& f)
{
    const auto& w = f.grid->weight;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f.values[i];
    return acc;
}

namespace detail {

/// d/dphi and d2/dphi2 along every latitude row, pseudo-spectral.
inline void phi_derivatives(const ScalarField& f, std::vector<double>* d1, std::vector<double>* d2)
{
    const GridSpec& g = *f.grid;
    const int n = g.n_lon;
    const int rows = g.dim == 1 ? 1 : g.n_lat;
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(n));
    for (int i = 0; i < rows; ++i) {
        const int base = g.dim == 1 ? 0 : g.index(i, 0);
        // remove the row mean: invariant under d/dphi, keeps the roundoff of
        // the transform from leaking into the pole-amplified second derivative
        double mean = 0.0;
        for (int j = 0; j < n; ++j) mean += f.values[static_cast<std::size_t>(base + j)];
        mean /= n;
        for (int j = 0; j < n; ++j)
            buf[static_cast<std::size_t>(j)] = f.values[static_cast<std::size_t>(base + j)] - mean;
        g.dft.transform(buf.data(), false);
        if (d1) {
            for (int m = 0; m < n; ++m) {
                double mt = m <= n / 2 ? m : m - n;
                if (m == n / 2) mt = 0.0;  // Nyquist dropped for odd derivative
                spec[static_cast<std::size_t>(m)] =
                    buf[static_cast<std::size_t>(m)] * std::complex<double>(0.0, mt);
            }
            g.dft.transform(spec.data(), true);
            for (int j = 0; j < n; ++j)
                (*d1)[static_cast<std::size_t>(base + j)] = spec[static_cast<std::size_t>(j)].real();
        }
        if (d2) {
            for (int m = 0; m < n; ++m) {
                const double mt = m <= n / 2 ? m : m - n;
                spec[static_cast<std::size_t>(m)] = buf[static_cast<std::size_t>(m)] * (-mt * mt);
            }
            g.dft.transform(spec.data(), true);
            for (int j = 0; j < n; ++j)
                (*d2)[static_cast<std::size_t>(base + j)] = spec[static_cast<std::size_t>(j)].real();
        }
    }
}

/// Latitude derivative of a per-node array via the precomputed stencils.
/// `order` selects d1 or d2 weights.
inline void theta_derivative(const GridSpec& g, const std::vector<double>& v,
                             std::vector<double>& out, int order)
{
    const int n = g.n_lon;
    for (int i = 0; i < g.n_lat; ++i) {
        const auto& st = g.lat_stencil[static_cast<std::size_t>(i)];
        const auto& w = order == 1 ? st.d1 : st.d2;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int s = 0; s < 9; ++s) {
                const int jj = st.shifted[static_cast<std::size_t>(s)] ? (j + n / 2) % n : j;
                acc += w[static_cast<std::size_t>(s)] *
                       v[static_cast<std::size_t>(g.index(st.row[static_cast<std::size_t>(s)], jj))];
            }
            out[static_cast<std::size_t>(g.index(i, j))] = acc;
        }
    }
}

}  // namespace detail

/// Covariant gradient (lowered components u_i).
[[nodiscard]] inline CovectorField gradient(const ScalarField& f)
{
    CovectorField out(f.grid);
    if (f.grid->dim == 1) {
        detail::phi_derivatives(f, &out.comp_theta, nullptr);
        return out;
    }
    detail::theta_derivative(*f.grid, f.values, out.comp_theta, 1);
    detail::phi_derivatives(f, &out.comp_phi, nullptr);
    return out;
}

/// Covariant Hessian u_{ij} with respect to the round metric.
[[nodiscard]] inline SymTensorField hessian(const ScalarField& f)
{
    SymTensorField out(f.grid);
    const GridSpec& g = *f.grid;
    if (g.dim == 1) {
        detail::phi_derivatives(f, nullptr, &out.tt);
        return out;
    }
    std::vector<double> fp(f.values.size()), fpp(f.values.size());
    detail::phi_derivatives(f, &fp, &fpp);
    std::vector<double> ft(f.values.size());
    detail::theta_derivative(g, f.values, ft, 1);
    detail::theta_derivative(g, f.values, out.tt, 2);

    // d/dtheta of the phi-derivative: fp obeys the same pole continuation as f
    std::vector<double> ftp(f.values.size());
    detail::theta_derivative(g, fp, ftp, 1);

    for (int i = 0; i < g.n_lat; ++i) {
        const double s = g.sin_theta[static_cast<std::size_t>(i)];
        const double c = g.cos_theta[static_cast<std::size_t>(i)];
        const double cot = c / s;
        for (int j = 0; j < g.n_lon; ++j) {
            const std::size_t id = static_cast<std::size_t>(g.index(i, j));
            out.tp[id] = ftp[id] - cot * fp[id];
            out.pp[id] = fpp[id] + s * c * ft[id];
        }
    }
    return out;
}

/// Laplace-Beltrami operator as the metric trace of the covariant Hessian.
[[nodiscard]] inline ScalarField laplacian(const ScalarField& f)
{
    const SymTensorField h = hessian(f);
    ScalarField out(f.grid);
    const GridSpec& g = *f.grid;
    if (g.dim == 1) {
        out.values = h.tt;
        return out;
    }
    for (int i = 0; i < g.n_lat; ++i) {
        const double s2 = g.sin_theta[static_cast<std::size_t>(i)] *
                          g.sin_theta[static_cast<std::size_t>(i)];
        for (int j = 0; j < g.n_lon; ++j) {
            const std::size_t id = static_cast<std::size_t>(g.index(i, j));
            out.values[id] = h.tt[id] + h.pp[id] / s2;
        }
    }
    return out;
}

/// Pointwise |grad u|^2 = s^{ij} u_i u_j.
[[nodiscard]] inline ScalarField grad_norm_sq(const CovectorField& v)
{
    ScalarField out(v.grid);
    const GridSpec& g = *v.grid;
    const int count = g.node_count();
    for (int id = 0; id < count; ++id) {
        const std::size_t k = static_cast<std::size_t>(id);
        if (g.dim == 1) {
            out.values[k] = v.comp_theta[k] * v.comp_theta[k];
        } else {
            const double s2 = g.sin_theta[static_cast<std::size_t>(g.row_of(id))] *
                              g.sin_theta[static_cast<std::size_t>(g.row_of(id))];
            out.values[k] = v.comp_theta[k] * v.comp_theta[k] + v.comp_phi[k] * v.comp_phi[k] / s2;
        }
    }
    return out;
}

struct SupNorms {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Discrete C0/C1/C2 norms: max |u|, max |grad u|, max Frobenius norm of the
/// covariant Hessian (indices raised with the round metric).
[[nodiscard]] inline SupNorms sup_norms(const ScalarField& f)
{
    SupNorms out;
    const GridSpec& g = *f.grid;
    const CovectorField du = gradient(f);
    const SymTensorField d2u = hessian(f);
    const int count = g.node_count();
    for (int id = 0; id < count; ++id) {
        const std::size_t k = static_cast<std::size_t>(id);
        out.c0 = std::max(out.c0, std::abs(f.values[k]));
        if (g.dim == 1) {
            out.c1 = std::max(out.c1, std::abs(du.comp_theta[k]));
            out.c2 = std::max(out.c2, std::abs(d2u.tt[k]));
        } else {
            const double s = g.sin_theta[static_cast<std::size_t>(g.row_of(id))];
            const double s2 = s * s;
            const double gn = du.comp_theta[k] * du.comp_theta[k] +
                              du.comp_phi[k] * du.comp_phi[k] / s2;
            out.c1 = std::max(out.c1, std::sqrt(gn));
            const double frob = d2u.tt[k] * d2u.tt[k] + 2.0 * d2u.tp[k] * d2u.tp[k] / s2 +
                                d2u.pp[k] * d2u.pp[k] / (s2 * s2);
            out.c2 = std::max(out.c2, std::sqrt(frob));
        }
    }
    return out;
}

/// Zero longitudinal modes above each row's wavenumber cap. Smooth fields are
/// unchanged to machine precision; needed to keep explicit stepping stable on
/// the clustered near-pole rows.
inline void polar_filter_inplace(ScalarField& f)
{
    const GridSpec& g = *f.grid;
    if (g.dim == 1) return;
    const int n = g.n_lon;
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    for (int i = 0; i < g.n_lat; ++i) {
        const int cap = g.mode_cap[static_cast<std::size_t>(i)];
        if (cap >= n / 2) continue;
        const int base = g.index(i, 0);
        for (int j = 0; j < n; ++j)
            buf[static_cast<std::size_t>(j)] = f.values[static_cast<std::size_t>(base + j)];
        g.dft.transform(buf.data(), false);
        for (int m = cap + 1; m <= n / 2; ++m) {
            buf[static_cast<std::size_t>(m)] = 0.0;
            if (m != n / 2) buf[static_cast<std::size_t>(n - m)] = 0.0;
        }
        g.dft.transform(buf.data(), true);
        for (int j = 0; j < n; ++j)
            f.values[static_cast<std::size_t>(base + j)] = buf[static_cast<std::size_t>(j)].real();
    }
}

/// Projection onto the n-symmetric part: average over the group generated by
/// the coordinate reflections (theta -> pi - theta, phi -> -phi, phi -> pi - phi).
[[nodiscard]] inline ScalarField symmetrized(const ScalarField& f)
{
    const GridSpec& g = *f.grid;
    ScalarField out(f.grid);
    const int n = g.n_lon;
    if (g.dim == 1) {
        for (int j = 0; j < n; ++j) {
            const int jm = (n - j) % n;
            const int jp = (j + n / 2) % n;
            const int jr = (n + n / 2 - j) % n;
            out.values[static_cast<std::size_t>(j)] =
                0.25 * (f.values[static_cast<std::size_t>(j)] +
                        f.values[static_cast<std::size_t>(jm)] +
                        f.values[static_cast<std::size_t>(jp)] +
                        f.values[static_cast<std::size_t>(jr)]);
        }
        return out;
    }
    for (int i = 0; i < g.n_lat; ++i) {
        const int iflip = g.n_lat - 1 - i;
        for (int j = 0; j < n; ++j) {
            const int cols[4] = {j, (n - j) % n, (j + n / 2) % n, (n + n / 2 - j) % n};
            double acc = 0.0;
            for (const int c : cols)
                acc += f.values[static_cast<std::size_t>(g.index(i, c))] +
                       f.values[static_cast<std::size_t>(g.index(iflip, c))];
            out.values[static_cast<std::size_t>(g.index(i, j))] = acc / 8.0;
        }
    }
    return out;
}

}  // namespace qflow::grid
