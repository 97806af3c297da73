#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow::symfun {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Binomial coefficient C(n,k) as a double. Returns 0 outside 0 <= k <= n.
[[nodiscard]] inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double result = 1.0;
    for (int i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - k + i);
        result /= static_cast<double>(i);
    }
    return result;
}

/// All elementary symmetric polynomials e_0..e_n of the entries of lambda.
/// Uses the prefix recurrence e_k(l_1..l_m) = e_k(l_1..l_{m-1}) + l_m e_{k-1}(l_1..l_{m-1}),
/// which is O(n^2) and numerically stable (no factorial-sized intermediates).
[[nodiscard]] inline Vector sigma_all(const Vector& lambda)
{
    const int n = static_cast<int>(lambda.size());
    Vector e = Vector::Zero(n + 1);
    e(0) = 1.0;
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k >= 1; --k) {
            e(k) += lambda(m) * e(k - 1);
        }
    }
    return e;
}

/// k-th elementary symmetric polynomial of an eigenvalue list.
/// sigma_0 = 1 by convention.
[[nodiscard]] inline double sigma_k_eigen(const Vector& lambda, int k)
{
    const int n = static_cast<int>(lambda.size());
    if (n < 1) throw std::domain_error("sigma_k_eigen: empty eigenvalue list");
    if (k < 0 || k > n)
        throw std::domain_error("sigma_k_eigen: order k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
    return sigma_all(lambda)(k);
}

/// Newton transformation tensors T_0..T_m of a square matrix, together with
/// sigma_0..sigma_{m+1} of its eigenvalues, via the trace recursion
///   T_0 = I,  sigma_{j+1} = tr(A T_j)/(j+1),  T_{j+1} = sigma_{j+1} I - A T_j.
struct NewtonChain {
    std::vector<double> sigma;   // sigma[j], j = 0..m+1 (clipped at n)
    std::vector<Matrix> tensor;  // tensor[j] = T_j(A), j = 0..m
};

[[nodiscard]] inline NewtonChain newton_chain(const Matrix& A, int m)
{
    const int n = static_cast<int>(A.rows());
    if (A.rows() != A.cols()) throw std::domain_error("newton_chain: matrix not square");
    if (m < 0 || m > n)
        throw std::domain_error("newton_chain: order m=" + std::to_string(m) +
                                " out of range for n=" + std::to_string(n));
    NewtonChain chain;
    chain.sigma.reserve(m + 2);
    chain.tensor.reserve(m + 1);
    chain.sigma.push_back(1.0);
    chain.tensor.push_back(Matrix::Identity(n, n));
    for (int j = 0; j < m; ++j) {
        const Matrix AT = A * chain.tensor.back();
        const double s = AT.trace() / static_cast<double>(j + 1);
        chain.sigma.push_back(s);
        chain.tensor.push_back(s * Matrix::Identity(n, n) - AT);
    }
    if (m + 1 <= n) {
        const Matrix AT = A * chain.tensor.back();
        chain.sigma.push_back(AT.trace() / static_cast<double>(m + 1));
    }
    return chain;
}

/// Newton transformation tensor T_m(A) = sigma_m(A) I - A T_{m-1}(A), T_0 = I.
[[nodiscard]] inline Matrix newton_tensor(const Matrix& A, int m)
{
    return newton_chain(A, m).tensor.back();
}

/// sigma_k of the eigenvalues of A, computed as tr(A T_{k-1}(A))/k without
/// forming eigenvalues. sigma_0 = 1.
[[nodiscard]] inline double sigma_k_matrix(const Matrix& A, int k)
{
    const int n = static_cast<int>(A.rows());
    if (A.rows() != A.cols()) throw std::domain_error("sigma_k_matrix: matrix not square");
    if (k < 0 || k > n)
        throw std::domain_error("sigma_k_matrix: order k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
    if (k == 0) return 1.0;
    return newton_chain(A, k - 1).sigma[static_cast<std::size_t>(k)];
}

/// Full polarization Sigma_m(A_1,...,A_m) of sigma_m: the multilinear form with
/// Sigma_m(A,...,A) = m sigma_m(A). Extracted from sigma_m of formal sums by
/// subset inclusion-exclusion over the m weights (sigma_m is homogeneous of
/// degree m, so the alternating subset sum isolates the multilinear term).
[[nodiscard]] inline double polarized_sigma(const std::vector<Matrix>& as)
{
    const int m = static_cast<int>(as.size());
    if (m < 1) throw std::domain_error("polarized_sigma: needs at least one matrix");
    const int n = static_cast<int>(as.front().rows());
    if (m > n) throw std::domain_error("polarized_sigma: more matrices than dimension");
    for (const Matrix& a : as) {
        if (a.rows() != n || a.cols() != n)
            throw std::domain_error("polarized_sigma: mismatched matrix sizes");
    }
    double acc = 0.0;
    const unsigned subsets = 1u << m;
    for (unsigned mask = 1; mask < subsets; ++mask) {
        Matrix sum = Matrix::Zero(n, n);
        int bits = 0;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) {
                sum += as[static_cast<std::size_t>(i)];
                ++bits;
            }
        }
        const double sign = ((m - bits) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * sigma_k_matrix(sum, m);
    }
    double factorial = 1.0;  // (m-1)!
    for (int i = 2; i < m; ++i) factorial *= static_cast<double>(i);
    return acc / factorial;
}

/// Garding cone membership: sigma_j(lambda) > 0 strictly for all 1 <= j <= k.
/// No tolerance; callers wanting slack shift lambda themselves.
[[nodiscard]] inline bool garding_member(const Vector& lambda, int k)
{
    const int n = static_cast<int>(lambda.size());
    if (k < 1 || k > n)
        throw std::domain_error("garding_member: order k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
    const Vector e = sigma_all(lambda);
    for (int j = 1; j <= k; ++j) {
        if (!(e(j) > 0.0)) return false;
    }
    return true;
}

/// Newton-Maclaurin gap
///   C(n,k+1) C(n,k-1)/C(n,k)^2 * sigma_k^2 - sigma_{k+1} sigma_{k-1},
/// nonnegative inside the Garding cone, zero exactly at lambda = c(1,...,1).
/// Cone violations are flagged rather than thrown so flow code can detect
/// cone exit from the result.
struct MaclaurinGap {
    double value = 0.0;
    bool in_cone = false;
};

[[nodiscard]] inline MaclaurinGap newton_maclaurin_gap(const Vector& lambda, int k)
{
    const int n = static_cast<int>(lambda.size());
    if (k < 1 || k > n - 1)
        throw std::domain_error("newton_maclaurin_gap: order k=" + std::to_string(k) +
                                " out of range for n=" + std::to_string(n));
    const Vector e = sigma_all(lambda);
    const double coeff = binomial(n, k + 1) * binomial(n, k - 1) / (binomial(n, k) * binomial(n, k));
    MaclaurinGap gap;
    gap.value = coeff * e(k) * e(k) - e(k + 1) * e(k - 1);
    gap.in_cone = true;
    for (int j = 1; j <= std::min(k + 1, n); ++j) {
        if (!(e(j) > 0.0)) {
            gap.in_cone = false;
            break;
        }
    }
    return gap;
}

}  // namespace qflow::symfun
