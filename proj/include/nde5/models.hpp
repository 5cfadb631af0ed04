#pragma once

// Right-hand sides of every similarity ODE in explicit first-order form,
// the degeneracy regularization, origin series initializers, and the
// scaling/reflection transforms on computed profiles.
//
// All fifth-order equations are kept as 5-dimensional first-order systems in
// the jet (g, g', g'', g''', g''''); the top derivative is isolated by Leibniz
// expansion of the quadratic operator, with the degenerate factor 1/g replaced
// by sign(g)/sqrt(nu^2 + g^2).

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nde5/ivp.hpp"
#include "nde5/poly.hpp"

namespace nde5 {

enum class NdeKind { N50, N41, N32, N23, N14, UniformDiv, UniformNonDiv, Time5 };

inline const char* to_string(NdeKind k) {
    switch (k) {
        case NdeKind::N50: return "n50";
        case NdeKind::N41: return "n41";
        case NdeKind::N32: return "n32";
        case NdeKind::N23: return "n23";
        case NdeKind::N14: return "n14";
        case NdeKind::UniformDiv: return "uniform-div";
        case NdeKind::UniformNonDiv: return "uniform-nondiv";
        case NdeKind::Time5: return "time5";
    }
    return "?";
}

inline NdeKind nde_kind_from_string(const std::string& s) {
    if (s == "n50") return NdeKind::N50;
    if (s == "n41") return NdeKind::N41;
    if (s == "n32") return NdeKind::N32;
    if (s == "n23") return NdeKind::N23;
    if (s == "n14") return NdeKind::N14;
    if (s == "uniform-div") return NdeKind::UniformDiv;
    if (s == "uniform-nondiv") return NdeKind::UniformNonDiv;
    if (s == "time5") return NdeKind::Time5;
    throw std::invalid_argument("unknown NDE kind: " + s);
}

enum class Family { Shock, Rarefaction, Blowup, Global, PhasePlane, Compacton };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Shock: return "shock";
        case Family::Rarefaction: return "rarefaction";
        case Family::Blowup: return "blowup";
        case Family::Global: return "global";
        case Family::PhasePlane: return "phase-plane";
        case Family::Compacton: return "compacton";
    }
    return "?";
}

// Similarity exponents (alpha, beta) with beta = (1+alpha)/5, and the
// far-field amplitude C0 of the algebraic tail.
struct SimilarityParams {
    double alpha = 0.0;
    double beta = 0.2;
    double c0 = 1.0;

    SimilarityParams() = default;
    SimilarityParams(double alpha_, double c0_ = 1.0)
        : alpha(alpha_), beta((1.0 + alpha_) / 5.0), c0(c0_) {
        if (!std::isfinite(alpha) || !std::isfinite(c0)) throw std::invalid_argument("params not finite");
    }
    double tail_exponent() const { return alpha / beta; } // = 5*alpha/(1+alpha)
};

// Value and first four derivatives of a profile at one point: the phase-space
// coordinate of all fifth-order similarity ODEs.
struct Jet5 {
    double d0 = 0, d1 = 0, d2 = 0, d3 = 0, d4 = 0;

    double& operator[](int i) {
        switch (i) {
            case 0: return d0;
            case 1: return d1;
            case 2: return d2;
            case 3: return d3;
            default: return d4;
        }
    }
    double operator[](int i) const {
        switch (i) {
            case 0: return d0;
            case 1: return d1;
            case 2: return d2;
            case 3: return d3;
            default: return d4;
        }
    }
    bool finite() const {
        return std::isfinite(d0) && std::isfinite(d1) && std::isfinite(d2) && std::isfinite(d3) &&
               std::isfinite(d4);
    }
    static Jet5 from(const double* y) { return Jet5{y[0], y[1], y[2], y[3], y[4]}; }
};

// A computed profile: strictly monotone mesh in z with one jet per point,
// plus enough provenance to reproduce the run.
struct Profile {
    NdeKind kind = NdeKind::N50;
    Family family = Family::Shock;
    SimilarityParams params;
    std::vector<double> mesh;
    std::vector<Jet5> jets;
    std::map<std::string, double> provenance;

    std::size_t size() const { return mesh.size(); }

    void validate() const {
        if (mesh.size() != jets.size()) throw std::invalid_argument("profile: mesh/jets size mismatch");
        if (mesh.size() < 2) throw std::invalid_argument("profile: too few points");
        const bool inc = mesh[1] > mesh[0];
        for (std::size_t i = 1; i < mesh.size(); ++i) {
            if (inc ? (mesh[i] <= mesh[i - 1]) : (mesh[i] >= mesh[i - 1]))
                throw std::invalid_argument("profile: mesh not strictly monotone");
        }
        for (const Jet5& j : jets)
            if (!j.finite()) throw std::invalid_argument("profile: non-finite jet");
        if (provenance.empty()) throw std::invalid_argument("profile: empty provenance");
    }

    // linear interpolation of the value component (sufficient for diagnostics)
    double value_at(double z) const {
        if (mesh.empty()) throw std::runtime_error("profile: empty");
        const bool inc = mesh.back() > mesh.front();
        if ((inc && (z <= mesh.front())) || (!inc && z >= mesh.front())) return jets.front().d0;
        if ((inc && (z >= mesh.back())) || (!inc && z <= mesh.back())) return jets.back().d0;
        std::size_t lo = 0, hi = mesh.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (inc ? (mesh[mid] <= z) : (mesh[mid] >= z)) lo = mid; else hi = mid;
        }
        const double w = (z - mesh[lo]) / (mesh[hi] - mesh[lo]);
        return (1 - w) * jets[lo].d0 + w * jets[hi].d0;
    }
};

// Regularization of the degenerate factor 1/g; exact reciprocal for nu = 0.
inline double regularized_inverse(double g, double nu) {
    if (nu == 0.0) return 1.0 / g;
    const double s = (g > 0) - (g < 0);
    return s / std::sqrt(nu * nu + g * g);
}

namespace detail {

// Leibniz expansion of the top derivative for the five degenerate shock ODEs:
//   g^(5) = [ -(1/5) g' z - p*g'g'''' - q*g''g''' ] / g
// with (p, q) depending on how many derivatives sit outside the product.
inline void shock_pq(NdeKind kind, double& p, double& q) {
    switch (kind) {
        case NdeKind::N50: p = 0; q = 0; break;
        case NdeKind::N41: p = 1; q = 0; break;
        case NdeKind::N32: p = 2; q = 1; break;
        case NdeKind::N23: p = 3; q = 4; break;
        case NdeKind::N14: p = 5; q = 10; break;
        default: throw std::invalid_argument("shock_pq: not a shock-family kind");
    }
}

} // namespace detail

// First-order system for the shock similarity ODEs (blow-up time scaling,
// z = x/(-t)^{1/5}).  Rejects Time5, which reduces to a scalar phase-plane
// equation handled by rhs_phase_plane.
inline RhsFn rhs_shock(NdeKind kind, double nu) {
    if (kind == NdeKind::Time5) throw std::invalid_argument("rhs_shock: Time5 handled by rhs_phase_plane");
    if (nu < 0) throw std::invalid_argument("rhs_shock: nu must be >= 0");
    if (kind == NdeKind::UniformNonDiv) {
        return [](double z, const double* y, double* dy) {
            dy[0] = y[1]; dy[1] = y[2]; dy[2] = y[3]; dy[3] = y[4];
            dy[4] = -0.2 * y[1] * z / (1.0 + y[0] * y[0]);
        };
    }
    if (kind == NdeKind::UniformDiv) {
        // ((1+g^2) g')'''' expanded; divide by (1+g^2)
        return [](double z, const double* y, double* dy) {
            const double g = y[0], g1 = y[1], g2 = y[2], g3 = y[3], g4 = y[4];
            dy[0] = g1; dy[1] = g2; dy[2] = g3; dy[3] = g4;
            const double rest = 10 * g * g1 * g4 + 20 * g * g2 * g3 + 20 * g1 * g1 * g3 + 30 * g1 * g2 * g2;
            dy[4] = (-0.2 * g1 * z - rest) / (1.0 + g * g);
        };
    }
    double p, q;
    detail::shock_pq(kind, p, q);
    return [p, q, nu](double z, const double* y, double* dy) {
        const double g = y[0], g1 = y[1], g2 = y[2], g3 = y[3], g4 = y[4];
        dy[0] = g1; dy[1] = g2; dy[2] = g3; dy[3] = g4;
        dy[4] = (-0.2 * g1 * z - p * g1 * g4 - q * g2 * g3) * regularized_inverse(g, nu);
    };
}

// Blow-up similarity system: -(f f')'''' - beta f' y + alpha f = 0.
inline RhsFn rhs_blowup(const SimilarityParams& p, double nu = 1e-4) {
    const double a = p.alpha, b = p.beta;
    return [a, b, nu](double y0, const double* y, double* dy) {
        const double f = y[0], f1 = y[1], f2 = y[2], f3 = y[3], f4 = y[4];
        dy[0] = f1; dy[1] = f2; dy[2] = f3; dy[3] = f4;
        dy[4] = (a * f - b * f1 * y0 - 5 * f1 * f4 - 10 * f2 * f3) * regularized_inverse(f, nu);
    };
}

// Post-blow-up (global) system: -(F F')'''' + beta F' y - alpha F = 0.
inline RhsFn rhs_global(const SimilarityParams& p, double nu = 1e-4) {
    const double a = p.alpha, b = p.beta;
    return [a, b, nu](double y0, const double* y, double* dy) {
        const double f = y[0], f1 = y[1], f2 = y[2], f3 = y[3], f4 = y[4];
        dy[0] = f1; dy[1] = f2; dy[2] = f3; dy[3] = f4;
        dy[4] = (b * f1 * y0 - a * f - 5 * f1 * f4 - 10 * f2 * f3) * regularized_inverse(f, nu);
    };
}

namespace detail {

// Apply the defining quadratic operator of a shock-family ODE to a polynomial.
inline Poly shock_operator(NdeKind kind, const Poly& g) {
    Poly g1 = g.derivative();
    Poly g2 = g1.derivative();
    Poly g3 = g2.derivative();
    Poly g4 = g3.derivative();
    Poly g5 = g4.derivative();
    auto dn = [](Poly p, int n) {
        for (int i = 0; i < n; ++i) p = p.derivative();
        return p;
    };
    switch (kind) {
        case NdeKind::N50: return g * g5;
        case NdeKind::N41: return dn(g * g4, 1);
        case NdeKind::N32: return dn(g * g3, 2);
        case NdeKind::N23: return dn(g * g2, 3);
        case NdeKind::N14: return dn(g * g1, 4);
        case NdeKind::UniformNonDiv: {
            Poly one({1.0});
            return (one + g * g) * g5;
        }
        case NdeKind::UniformDiv: {
            Poly one({1.0});
            return dn((one + g * g) * g1, 4);
        }
        default: throw std::invalid_argument("shock_operator: unsupported kind");
    }
}

// residual series Op(g) + (1/5) g' z of the truncated odd series
inline Poly shock_series_residual(NdeKind kind, const Poly& g) {
    Poly z = Poly::monomial(1);
    return shock_operator(kind, g) + g.derivative() * z * 0.2;
}

} // namespace detail

// Origin series evaluator for the odd expansion g = C z + D z^3 + c5 z^5 + ...
// The coefficients c5, c7, c9 are obtained by matching the residual series
// order by order (each unknown enters its matching order affinely).  For the
// uniformly dispersive kinds the odd ansatz closes no matching equation (the
// operator is even in z while the right-hand side is odd), and the equations
// are regular at g = 0 anyway; the plain cubic is returned there.
struct OriginSeries {
    Poly series;
    double C = 0, D = 0;
    NdeKind kind = NdeKind::N50;

    Jet5 operator()(double z) const {
        auto j = series.eval_jet(z, 4);
        return Jet5{j[0], j[1], j[2], j[3], j[4]};
    }
    double coefficient(std::size_t k) const { return series.coeff(k); }
};

inline OriginSeries series_origin(NdeKind kind, double C, double D, int order = 9) {
    if (C == 0.0) throw std::invalid_argument("series_origin: C must be nonzero");
    if (order > 9) throw std::invalid_argument("series_origin: matching not implemented beyond z^9");
    if (kind == NdeKind::Time5) throw std::invalid_argument("series_origin: Time5 is a phase-plane model");

    OriginSeries out;
    out.C = C;
    out.D = D;
    out.kind = kind;
    Poly g = Poly::monomial(1, C);
    if (order >= 3) g = g + Poly::monomial(3, D);

    const bool uniform = (kind == NdeKind::UniformDiv || kind == NdeKind::UniformNonDiv);
    if (!uniform) {
        for (int m = 5; m <= order; m += 2) {
            const std::size_t match = static_cast<std::size_t>(m - 4);
            Poly trial0 = g;
            Poly trial1 = g + Poly::monomial(static_cast<std::size_t>(m), 1.0);
            const double r0 = detail::shock_series_residual(kind, trial0).coeff(match);
            const double r1 = detail::shock_series_residual(kind, trial1).coeff(match);
            const double slope = r1 - r0;
            if (slope == 0.0) throw std::runtime_error("series_origin: degenerate matching equation");
            g = g + Poly::monomial(static_cast<std::size_t>(m), -r0 / slope);
        }
    }
    out.series = g;
    return out;
}

// Scaling invariance g_a(z) = a^5 g(z/a): the k-th derivative picks up a^{5-k}.
inline Profile rescale(const Profile& prof, double a) {
    if (a == 0.0) throw std::invalid_argument("rescale: a must be nonzero");
    if (prof.family != Family::Shock && prof.family != Family::Rarefaction)
        throw std::invalid_argument("rescale: shock-family profiles only");
    Profile out = prof;
    const std::size_t n = prof.mesh.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = (a > 0) ? i : n - 1 - i;
        out.mesh[i] = a * prof.mesh[src];
        for (int k = 0; k < 5; ++k) out.jets[i][k] = std::pow(a, 5 - k) * prof.jets[src][k];
    }
    out.provenance["rescale_a"] = a;
    return out;
}

// Reflection z -> -z turning a blow-up shock profile into a global
// rarefaction profile; odd-order jet components flip sign.
inline Profile reflect_to_rarefaction(const Profile& prof) {
    Profile out = prof;
    const std::size_t n = prof.mesh.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = n - 1 - i;
        out.mesh[i] = -prof.mesh[src];
        for (int k = 0; k < 5; ++k) out.jets[i][k] = ((k % 2) ? -1.0 : 1.0) * prof.jets[src][k];
    }
    out.family = (prof.family == Family::Rarefaction) ? Family::Shock : Family::Rarefaction;
    out.provenance["reflected"] = 1.0;
    return out;
}

// Scalar phase-plane equation dg/dz = (A z + B z^3)/(g - z^5) of the
// fifth-order-in-time model; the singular manifold g = z^5 is reported via
// the companion event function.
inline RhsFn rhs_phase_plane(double A, double B) {
    if (A <= 0) throw std::invalid_argument("rhs_phase_plane: A must be positive (A = g'(0)^2)");
    if (B < 0) throw std::invalid_argument("rhs_phase_plane: B must be nonnegative");
    return [A, B](double z, const double* y, double* dy) {
        const double den = y[0] - std::pow(z, 5);
        if (den == 0.0) throw std::domain_error("rhs_phase_plane: on the singular manifold g = z^5");
        dy[0] = (A * z + B * z * z * z) / den;
    };
}

inline EventFn phase_plane_singular_event() {
    return [](double z, const double* y) { return y[0] - std::pow(z, 5); };
}

} // namespace nde5
