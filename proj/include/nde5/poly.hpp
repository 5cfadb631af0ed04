#pragma once

// Dense univariate polynomials with real coefficients (ascending order).
// Small utility shared by the series initializers and the bundle analysis.

#include <cmath>
#include <cstddef>
#include <vector>

namespace nde5 {

struct Poly {
    std::vector<double> c; // c[k] multiplies x^k

    Poly() = default;
    explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) { trim(); }

    static Poly monomial(std::size_t k, double a = 1.0) {
        Poly p;
        p.c.assign(k + 1, 0.0);
        p.c[k] = a;
        return p;
    }

    std::size_t degree() const { return c.empty() ? 0 : c.size() - 1; }

    void trim() {
        while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    }

    double eval(double x) const {
        double r = 0;
        for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly({0.0});
        Poly d;
        d.c.resize(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * static_cast<double>(k);
        return d;
    }

    // value and the first `nder` derivatives at x
    std::vector<double> eval_jet(double x, int nder) const {
        std::vector<double> out;
        out.reserve(nder + 1);
        Poly p = *this;
        out.push_back(p.eval(x));
        for (int k = 0; k < nder; ++k) {
            p = p.derivative();
            out.push_back(p.eval(x));
        }
        return out;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
        for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (b * -1.0); }
    friend Poly operator*(const Poly& a, double s) {
        Poly r = a;
        for (double& x : r.c) x *= s;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.c.empty() || b.c.empty()) return Poly({0.0});
        r.c.assign(a.c.size() + b.c.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }

    double coeff(std::size_t k) const { return k < c.size() ? c[k] : 0.0; }
};

} // namespace nde5
