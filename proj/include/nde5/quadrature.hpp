#pragma once

// Adaptive Simpson quadrature with an optional phase substitution for the
// highly oscillatory tail integrands (integration in v = |z|^q makes the
// oscillation uniform so the subdivision tracks the phase zeros).

#include <cmath>
#include <functional>
#include <stdexcept>

namespace nde5 {

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-10, int depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// integral of f over [z_a, z_b] with 0 <= z_a < z_b via the substitution
// v = z^q, panelled so each panel spans at most half an oscillation of
// cos(a0 v)
inline double integrate_oscillatory(const std::function<double(double)>& f, double z_a, double z_b,
                                    double q, double a0, double tol = 1e-9) {
    if (z_a < 0 || z_b <= z_a) throw std::invalid_argument("integrate_oscillatory: bad interval");
    // below z = 1 the phase has not completed an oscillation and the
    // substitution Jacobian is singular at 0: integrate directly there
    const double z_cut = std::max(z_a, std::min(1.0, z_b));
    double total = 0;
    if (z_cut > z_a) total += integrate_adaptive(f, z_a, z_cut, tol, 40);
    if (z_cut >= z_b) return total;

    const double va = std::pow(z_cut, q), vb = std::pow(z_b, q);
    auto g = [&](double v) {
        const double z = std::pow(v, 1.0 / q);
        return f(z) * z / (q * v); // dz = z/(q v) dv
    };
    const double panel = (a0 > 0) ? M_PI / (2 * a0) : (vb - va);
    double v = va;
    int n = 0;
    while (v < vb) {
        const double v2 = std::min(vb, v + panel);
        total += integrate_adaptive(g, v, v2, tol * panel / std::max(vb - va, panel), 30);
        v = v2;
        if (++n > 2000000) throw std::runtime_error("integrate_oscillatory: too many panels");
    }
    return total;
}

} // namespace nde5
