#pragma once

// Small fitting/optimization utilities: dense linear solves, linear least
// squares, log-log slope fits, and a Nelder-Mead simplex for the few
// low-dimensional nonlinear fits in the tail analysis.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nde5 {

// Gaussian elimination with partial pivoting; A is row-major n x n.
inline std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    if (A.size() != n * n) throw std::invalid_argument("solve_dense: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(A[i * n + k]) > std::fabs(A[piv * n + k])) piv = i;
        if (A[piv * n + k] == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i * n + k] / A[k * n + k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i * n + j] -= f * A[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
        x[i] = s / A[i * n + i];
    }
    return x;
}

// least squares min ||M c - y||_2 via normal equations; M is m x k row-major
inline std::vector<double> least_squares(const std::vector<double>& M, const std::vector<double>& y,
                                         std::size_t k) {
    const std::size_t m = y.size();
    std::vector<double> MtM(k * k, 0.0), Mty(k, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            Mty[a] += M[i * k + a] * y[i];
            for (std::size_t b = 0; b < k; ++b) MtM[a * k + b] += M[i * k + a] * M[i * k + b];
        }
    }
    return solve_dense(std::move(MtM), std::move(Mty));
}

// slope of log|y| vs log|x|
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: bad input");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(std::fabs(x[i])), ly = std::log(std::fabs(y[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Nelder-Mead simplex minimization; returns the best vertex.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double scale = 0.1,
                                       int max_iter = 2000, double ftol = 1e-12) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> v(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += (x0[i] != 0 ? scale * std::fabs(x0[i]) : scale);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(v[i]);

    auto order = [&]() {
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j)
                if (fv[j] < fv[i]) { std::swap(fv[i], fv[j]); std::swap(v[i], v[j]); }
    };
    order();

    for (int it = 0; it < max_iter; ++it) {
        if (std::fabs(fv[n] - fv[0]) < ftol * (std::fabs(fv[0]) + ftol)) break;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += v[i][j] / static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (v[n][j] - centroid[j]);
            return p;
        };
        std::vector<double> xr = blend(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            std::vector<double> xe = blend(-2.0);
            const double fe = f(xe);
            if (fe < fr) { v[n] = xe; fv[n] = fe; }
            else { v[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            v[n] = xr; fv[n] = fr;
        } else {
            std::vector<double> xc = blend(0.5);
            const double fc = f(xc);
            if (fc < fv[n]) { v[n] = xc; fv[n] = fc; }
            else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
                    fv[i] = f(v[i]);
                }
            }
        }
        order();
    }
    return v[0];
}

} // namespace nde5
