#pragma once

// Post-hoc verification: ODE residuals from the stored profiles, L^1
// convergence-rate and total-variation measurements, the Rankine-Hugoniot
// algebra, and the similarity-level delta-entropy test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nde5/asymptotics.hpp"
#include "nde5/fitting.hpp"
#include "nde5/models.hpp"
#include "nde5/quadrature.hpp"

namespace nde5 {

namespace detail {

// Fornberg weights: derivative orders 0..m of the interpolant through the
// nodes x[], evaluated at x0; returns (m+1) x n row-major weights.
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<double> d(static_cast<std::size_t>(m + 1) * n, 0.0);
    auto D = [&](int k, int j) -> double& { return d[static_cast<std::size_t>(k) * n + j]; };
    double c1 = 1.0;
    double c4 = x[0] - x0;
    D(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) D(k, i) = c1 * (k * D(k - 1, i - 1) - c5 * D(k, i - 1)) / c2;
                D(0, i) = -c1 * c5 * D(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k) D(k, j) = (c4 * D(k, j) - k * D(k - 1, j)) / c3;
            D(0, j) = c4 * D(0, j) / c3;
        }
        c1 = c2;
    }
    return d;
}

// strided derivative of a sampled series at index i (2*half+1 nodes)
inline double strided_derivative(const std::vector<double>& mesh, const std::vector<double>& series,
                                 std::size_t i, std::size_t stride, int half, int order) {
    std::vector<double> nodes, vals;
    nodes.reserve(2 * half + 1);
    for (int k = -half; k <= half; ++k) {
        const std::size_t j = i + static_cast<std::size_t>(k * static_cast<int>(stride));
        nodes.push_back(mesh[j]);
        vals.push_back(series[j]);
    }
    std::vector<double> w = fornberg_weights(mesh[i], nodes, order);
    double r = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        r += w[static_cast<std::size_t>(order) * nodes.size() + k] * vals[k];
    return r;
}

} // namespace detail

struct ResidualReport {
    double sup_from_values = 0; // derivatives rebuilt from d0 alone
    double l2_from_values = 0;
    double sup_from_jets = 0;   // stored jets plus one outer derivative
    double l2_from_jets = 0;
    std::size_t points = 0;
};

struct ResidualOptions {
    double h_target = 0.25; // effective spacing of the strided stencils
    double trim = 0.0;      // skip |z| below this (degenerate origin region)
};

namespace detail {

// structure of each defining form Op(g) = -(1/5) g' z:
//   lead_g5:  Op = lead(g) * D[series], series = d4    (N50, UniformNonDiv)
//   deriv_of_product: Op = D^outer[product series]     (the divergence forms)
struct ResidualForm {
    bool lead_g5 = false;
    int outer = 4;
    int inner = 1; // product = d0 * d_inner (or (1+d0^2) d1 for UniformDiv)
};

inline ResidualForm residual_form(NdeKind kind) {
    switch (kind) {
        case NdeKind::N50: return {true, 1, 4};
        case NdeKind::UniformNonDiv: return {true, 1, 4};
        case NdeKind::N41: return {false, 1, 4};
        case NdeKind::N32: return {false, 2, 3};
        case NdeKind::N23: return {false, 3, 2};
        case NdeKind::N14: return {false, 4, 1};
        case NdeKind::UniformDiv: return {false, 4, 1};
        default: throw std::invalid_argument("residual_form: unsupported kind");
    }
}

} // namespace detail

// Residual of the defining equation along a stored profile, by two routes:
// derivatives rebuilt from the value component alone, and the stored jets
// combined with a single outer strided derivative.  Their disagreement
// measures the internal consistency of the profile.
inline ResidualReport residual(const Profile& prof, const ResidualOptions& opt = {}) {
    const std::size_t n = prof.size();
    if (n < 64) throw std::invalid_argument("residual: mesh too small (need N >= 64)");

    double dz_med;
    {
        std::vector<double> sp;
        for (std::size_t i = 1; i < n; ++i) sp.push_back(std::fabs(prof.mesh[i] - prof.mesh[i - 1]));
        std::nth_element(sp.begin(), sp.begin() + sp.size() / 2, sp.end());
        dz_med = sp[sp.size() / 2];
    }
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opt.h_target / dz_med)));
    const int half = 4;
    const std::size_t guard = stride * static_cast<std::size_t>(half);
    if (4 * guard + 8 >= n) throw std::invalid_argument("residual: mesh too small for the stencil");

    const bool phase_plane = (prof.family == Family::PhasePlane);
    const bool blowup = (prof.family == Family::Blowup);
    const bool global = (prof.family == Family::Global);
    const double sign_rhs = (prof.family == Family::Rarefaction) ? -1.0 : 1.0;

    detail::ResidualForm form;
    if (blowup || global || phase_plane) {
        form = {false, 4, 1};
    } else {
        form = detail::residual_form(prof.kind);
    }
    const bool uniform = (prof.kind == NdeKind::UniformDiv || prof.kind == NdeKind::UniformNonDiv);

    std::vector<double> d0(n);
    for (std::size_t i = 0; i < n; ++i) d0[i] = prof.jets[i].d0;

    auto lead = [&](double g) {
        if (prof.kind == NdeKind::UniformNonDiv) return 1.0 + g * g;
        return g; // N50
    };

    // jets-route product series
    std::vector<double> prod_j(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Jet5& J = prof.jets[i];
        if (phase_plane) continue;
        if (form.lead_g5) prod_j[i] = J.d4;
        else if (prof.kind == NdeKind::UniformDiv && !blowup && !global)
            prod_j[i] = (1.0 + J.d0 * J.d0) * J.d1;
        else
            prod_j[i] = J.d0 * J[form.inner];
    }

    // values-route jets rebuilt from d0, then the same product
    std::vector<double> d1v(n, 0.0), dinv(n, 0.0), prod_v(n, 0.0);
    for (std::size_t i = guard; i + guard < n; ++i) {
        std::vector<double> nodes, vals;
        for (int k = -half; k <= half; ++k) {
            const std::size_t j = i + static_cast<std::size_t>(k * static_cast<int>(stride));
            nodes.push_back(prof.mesh[j]);
            vals.push_back(d0[j]);
        }
        std::vector<double> w = detail::fornberg_weights(prof.mesh[i], nodes, 4);
        auto apply = [&](int order) {
            double r = 0;
            for (std::size_t k = 0; k < nodes.size(); ++k)
                r += w[static_cast<std::size_t>(order) * nodes.size() + k] * vals[k];
            return r;
        };
        d1v[i] = apply(1);
        dinv[i] = (form.inner == 1) ? d1v[i] : apply(form.inner);
        if (form.lead_g5) dinv[i] = apply(4);
        if (phase_plane) continue;
        if (form.lead_g5) prod_v[i] = dinv[i];
        else if (prof.kind == NdeKind::UniformDiv && !blowup && !global)
            prod_v[i] = (1.0 + d0[i] * d0[i]) * d1v[i];
        else
            prod_v[i] = d0[i] * dinv[i];
    }

    const double alpha = prof.params.alpha, beta = prof.params.beta;
    const double A_pp = prof.provenance.count("A_eff") ? prof.provenance.at("A_eff")
                        : prof.provenance.count("A") ? prof.provenance.at("A") : 1.0;
    const double B_pp = prof.provenance.count("B_eff") ? prof.provenance.at("B_eff")
                        : prof.provenance.count("B") ? prof.provenance.at("B") : 0.0;

    ResidualReport rep;
    double s2j = 0, s2v = 0;
    for (std::size_t i = 2 * guard; i + 2 * guard < n; ++i) {
        const double z = prof.mesh[i];
        if (std::fabs(z) < opt.trim) continue;
        const Jet5& J = prof.jets[i];

        double r_jets, r_vals;
        if (phase_plane) {
            const double z5 = std::pow(z, 5);
            r_jets = J.d0 * J.d1 - z5 * J.d1 - A_pp * z - B_pp * z * z * z;
            r_vals = d0[i] * d1v[i] - z5 * d1v[i] - A_pp * z - B_pp * z * z * z;
        } else {
            const double outer_jets =
                detail::strided_derivative(prof.mesh, prod_j, i, stride, half, form.outer);
            const double outer_vals =
                detail::strided_derivative(prof.mesh, prod_v, i, stride, half, form.outer);
            double op_jets = outer_jets, op_vals = outer_vals;
            if (form.lead_g5 && !blowup && !global) {
                op_jets = lead(J.d0) * outer_jets;
                op_vals = lead(d0[i]) * outer_vals;
            }
            if (blowup || global) {
                const double s = blowup ? 1.0 : -1.0;
                r_jets = -op_jets - s * beta * J.d1 * z + s * alpha * J.d0;
                r_vals = -op_vals - s * beta * d1v[i] * z + s * alpha * d0[i];
            } else {
                r_jets = op_jets + sign_rhs * 0.2 * J.d1 * z;
                r_vals = op_vals + sign_rhs * 0.2 * d1v[i] * z;
            }
        }
        rep.sup_from_jets = std::max(rep.sup_from_jets, std::fabs(r_jets));
        rep.sup_from_values = std::max(rep.sup_from_values, std::fabs(r_vals));
        s2j += r_jets * r_jets;
        s2v += r_vals * r_vals;
        ++rep.points;
    }
    if (rep.points == 0) throw std::invalid_argument("residual: no interior evaluation points");
    rep.l2_from_jets = std::sqrt(s2j / static_cast<double>(rep.points));
    rep.l2_from_values = std::sqrt(s2v / static_cast<double>(rep.points));
    return rep;
}

// ---------------------------------------------------------------------------
// profile evaluation with odd extension and fitted-tail continuation

class ExtendedProfile {
public:
    ExtendedProfile(Profile prof, TailFit fit, double equilibrium = 1.0)
        : prof_(std::move(prof)), fit_(fit), level_(equilibrium) {
        z_deep_ = std::min(prof_.mesh.front(), prof_.mesh.back());
        if (z_deep_ >= 0) throw std::invalid_argument("extended profile: needs a z < 0 branch");
    }

    // odd similarity profile value at any z
    double value(double z) const {
        const double s = (z > 0) ? -1.0 : 1.0;
        const double za = (z > 0) ? -z : z;
        if (za >= z_deep_) return s * prof_.value_at(za);
        return s * tail_model_eval(fit_, za, level_);
    }

    // derivative of the odd extension
    double slope(double z) const {
        const double za = (z > 0) ? -z : z;
        if (za >= z_deep_) {
            // interpolate the stored first-derivative component
            const auto& m = prof_.mesh;
            std::size_t lo = 0, hi = m.size() - 1;
            if (za <= m.front()) return prof_.jets.front().d1;
            if (za >= m.back()) return prof_.jets.back().d1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                if (m[mid] <= za) lo = mid; else hi = mid;
            }
            const double w = (za - m[lo]) / (m[hi] - m[lo]);
            return (1 - w) * prof_.jets[lo].d1 + w * prof_.jets[hi].d1;
        }
        const double r = -za;
        const double ph = fit_.a0 * std::pow(r, fit_.phase_exponent);
        const double env = std::pow(r, fit_.envelope_exponent);
        const double denv = fit_.envelope_exponent * std::pow(r, fit_.envelope_exponent - 1);
        const double dph = fit_.a0 * fit_.phase_exponent * std::pow(r, fit_.phase_exponent - 1);
        const double oscv = fit_.A * std::sin(ph) + fit_.B * std::cos(ph);
        const double dosc = fit_.A * std::cos(ph) - fit_.B * std::sin(ph);
        return -(denv * oscv + env * dosc * dph); // d/dz = -d/dr
    }

    double level() const { return level_; }
    const TailFit& fit() const { return fit_; }
    double mesh_depth() const { return z_deep_; }

private:
    Profile prof_;
    TailFit fit_;
    double level_;
    double z_deep_;
};

// ---------------------------------------------------------------------------
// rate measurements

struct RateReport {
    std::string quantity;
    std::vector<double> abscissae;
    std::vector<double> values;
    double exponent = 0;
    double fit_residual = 0;
};

struct DegenerateFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void fit_rate(RateReport& rep) {
    if (rep.abscissae.size() < 5) throw std::invalid_argument("rate: need >= 5 samples");
    const double span = std::fabs(std::log10(std::fabs(rep.abscissae.front())) -
                                  std::log10(std::fabs(rep.abscissae.back())));
    if (span < 1.5) throw std::invalid_argument("rate: samples must span >= 1.5 decades");
    for (double v : rep.values)
        if (!(v > 0)) throw DegenerateFit("rate: vanishing norms, exponent undefined");
    rep.exponent = loglog_slope(rep.abscissae, rep.values);
    double s = 0;
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
        const double pred = rep.exponent * std::log(std::fabs(rep.abscissae[i]));
        s += std::pow(std::log(rep.values[i]) - pred, 2);
    }
    rep.fit_residual = s; // relative spread only; the absolute offset is immaterial
}

} // namespace detail

// || u(.,t) - S_-(.) ||_{L^1(-l,l)} for each t in the grid, with
// u(x,t) = g(x/(-t)^{1/5}); the substitution v = z^{5/4} makes the tail
// oscillation uniform for the quadrature.
inline RateReport l1_rate(const ExtendedProfile& g, double l, const std::vector<double>& t_grid) {
    RateReport rep;
    rep.quantity = "l1-distance";
    for (double t : t_grid) {
        if (!(t < 0)) throw std::invalid_argument("l1_rate: t must be negative");
        const double s = std::pow(-t, -0.2);
        const double Z = l * s;
        auto integrand = [&](double z) { return std::fabs(g.value(-z) - g.level()); };
        const double I = integrate_oscillatory(integrand, 0.0, Z, g.fit().phase_exponent,
                                               g.fit().a0, 1e-9);
        rep.abscissae.push_back(-t);
        rep.values.push_back(2.0 * I / s);
    }
    detail::fit_rate(rep);
    return rep;
}

// partial total variation int_{-Z}^0 |g'| dz and the L^1 deficiency
// int_{-Z}^0 |g - level| dz for each Z in the grid
inline RateReport tv_growth(const ExtendedProfile& g, const std::vector<double>& Z_grid,
                            bool deficiency = false) {
    RateReport rep;
    rep.quantity = deficiency ? "l1-deficiency" : "total-variation";
    for (double Z : Z_grid) {
        if (!(Z > 0)) throw std::invalid_argument("tv_growth: Z must be positive");
        auto integrand = [&](double z) {
            return deficiency ? std::fabs(g.value(-z) - g.level()) : std::fabs(g.slope(-z));
        };
        rep.abscissae.push_back(Z);
        rep.values.push_back(
            integrate_oscillatory(integrand, 0.0, Z, g.fit().phase_exponent, g.fit().a0, 1e-9));
    }
    bool all_zero = true;
    for (double v : rep.values)
        if (std::fabs(v) > 1e-14) all_zero = false;
    if (all_zero) {
        rep.exponent = 0.0; // constant profile: no divergence
        return rep;
    }
    detail::fit_rate(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// Rankine-Hugoniot speed from one-sided jets

struct JumpJets {
    Jet5 minus, plus;
};

// lambda = [(F F')'''] / [F] with (F F')''' = F0 F4 + 4 F1 F3 + 3 F2^2
inline std::pair<double, double> rh_speed(const JumpJets& j) {
    auto bracket = [](const Jet5& f) { return f.d0 * f.d4 + 4 * f.d1 * f.d3 + 3 * f.d2 * f.d2; };
    const double den = j.plus.d0 - j.minus.d0;
    if (den == 0.0) throw std::invalid_argument("rh_speed: no jump in the value component");
    const double num = bracket(j.plus) - bracket(j.minus);
    return {num / den, num};
}

// ---------------------------------------------------------------------------
// delta-entropy test at the similarity-solution level

enum class ShockType { SMinusBlowup, SPlusRiemann };

struct DeltaEntropyVerdict {
    bool entropy = false;
    double theta = 0; // fitted slope of d(delta)
    std::vector<double> deltas, distances;
};

struct InsufficientTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// S_- test: perturb the blow-up time T -> T + delta and integrate
// |u_T - u_{T+delta}| over the window; entropy iff the distance decays with
// delta.  S_+ test: shift the rarefaction orbit t -> t + delta against the
// frozen step; non-entropy iff the distance stays bounded below.
inline DeltaEntropyVerdict delta_entropy_test(ShockType type, const ExtendedProfile& g,
                                              const std::vector<double>& deltas, double x_half,
                                              double t_max, int t_nodes = 17) {
    if (deltas.empty()) throw std::invalid_argument("delta_entropy_test: empty delta list");
    if (g.fit().A == 0 && g.fit().B == 0)
        throw InsufficientTail("delta_entropy_test: profile has no tail extension");
    DeltaEntropyVerdict verdict;
    const double T = 1.0;

    auto u_minus = [&](double x, double t) { return g.value(x * std::pow(T - t, -0.2)); };
    auto u_plus = [&](double x, double t) { return g.value(-x * std::pow(t, -0.2)); };
    auto s_plus = [](double x) { return x >= 0 ? 1.0 : -1.0; };

    for (double d : deltas) {
        if (!(d > 0)) throw std::invalid_argument("delta_entropy_test: deltas must be positive");
        double total = 0;
        for (int k = 0; k < t_nodes; ++k) {
            const double t = t_max * (k + 0.5) / t_nodes;
            std::function<double(double)> fx;
            if (type == ShockType::SMinusBlowup)
                fx = [&](double x) { return std::fabs(u_minus(x, t) - u_minus(x, t + d)); };
            else
                fx = [&](double x) { return std::fabs(u_plus(x, t + d) - s_plus(x)); };
            total += integrate_adaptive(fx, -x_half, x_half, 1e-9, 36) * (t_max / t_nodes);
        }
        verdict.deltas.push_back(d);
        verdict.distances.push_back(total);
    }

    // slope across the delta grid
    verdict.theta = loglog_slope(verdict.deltas, verdict.distances);
    const double dmin = *std::min_element(verdict.distances.begin(), verdict.distances.end());
    if (type == ShockType::SMinusBlowup) {
        verdict.entropy = (verdict.theta > 0.1);
    } else {
        const double dmax = *std::max_element(verdict.distances.begin(), verdict.distances.end());
        verdict.entropy = !(dmin > 0 && dmin > 0.25 * dmax); // bounded below: not entropy
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// sign symmetry of the uniformly dispersive equations

inline bool uniform_nde_symmetry_check(const Profile& prof, const ResidualOptions& opt = {}) {
    ResidualReport base = residual(prof, opt);
    Profile neg = prof;
    for (Jet5& j : neg.jets)
        for (int c = 0; c < 5; ++c) j[c] = -j[c];
    ResidualReport mirrored = residual(neg, opt);
    const double a = std::max(base.sup_from_jets, 1e-300);
    const double b = std::max(mirrored.sup_from_jets, 1e-300);
    return (b <= 2 * a) && (a <= 2 * b);
}

} // namespace nde5
