#pragma once

// Desk-scale periodic pseudospectral integrator for the uniformly dispersive
// equations: the constant-coefficient fifth derivative is solved exactly per
// step through an integrating factor, the remaining nonlinear term advances
// by classical four-stage Runge-Kutta, with 2/3-rule dealiasing per stage.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nde5/fft.hpp"
#include "nde5/models.hpp"

namespace nde5 {

struct EvolutionField {
    double L = 50.0;        // domain [-L, L)
    std::size_t N = 256;    // power of two
    std::vector<double> u;  // values at x_j = -L + 2L j / N
    double t = 0.0;

    double x(std::size_t j) const {
        return -L + 2.0 * L * static_cast<double>(j) / static_cast<double>(N);
    }
    void validate() const {
        if (N < 64 || (N & (N - 1)) != 0)
            throw std::invalid_argument("evolution: N must be a power of two, N >= 64");
        if (u.size() != N) throw std::invalid_argument("evolution: field size mismatch");
        for (double v : u)
            if (!std::isfinite(v)) throw std::invalid_argument("evolution: non-finite field");
    }
};

struct BlowupDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpectralTailRise : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> wavenumbers(const EvolutionField& f) {
    std::vector<double> k(f.N);
    const double base = M_PI / f.L;
    for (std::size_t j = 0; j < f.N; ++j) {
        const double m = (j <= f.N / 2) ? static_cast<double>(j)
                                        : static_cast<double>(j) - static_cast<double>(f.N);
        k[j] = base * m;
    }
    return k;
}

inline void dealias(std::vector<std::complex<double>>& uh, std::size_t N) {
    const std::size_t cutoff = N / 3;
    for (std::size_t j = 0; j <= N / 2; ++j) {
        const std::size_t m = j;
        if (m > cutoff) {
            uh[j] = 0;
            if (j > 0 && j < N) uh[N - j] = 0;
        }
    }
    uh[N / 2] = 0;
}

} // namespace detail

// spectral first derivative
inline std::vector<double> spectral_derivative(const EvolutionField& f, int order = 1) {
    auto uh = fft_forward(f.u);
    auto k = detail::wavenumbers(f);
    for (std::size_t j = 0; j < f.N; ++j) {
        std::complex<double> ik(0.0, k[j]);
        std::complex<double> fac = 1.0;
        for (int q = 0; q < order; ++q) fac *= ik;
        uh[j] *= fac;
    }
    if (order % 2 == 1) uh[f.N / 2] = 0; // odd derivatives lose the Nyquist mode
    return fft_inverse_real(std::move(uh));
}

struct EvolveOptions {
    double dt = 0.0;          // 0: use the dispersive bound
    double cfl = 1.0;
    std::size_t snapshots = 0; // extra intermediate snapshots
    double blowup_gradient_factor = 1e3;
    double tail_fraction_limit = 1e-3;
};

struct EvolveResult {
    std::vector<EvolutionField> snapshots; // includes the final state
    double dt = 0;
    std::size_t steps = 0;
    double max_imag_residue = 0;
    double mass_drift = 0;
};

// integrating-factor RK4 advance of u_t = -(1+u^2) u_xxxxx (non-divergence)
// or u_t = -((1+u^2) u_x)_xxxx (divergence form)
inline EvolveResult evolve(const EvolutionField& initial, NdeKind kind, double t_end,
                           const EvolveOptions& opt = {}) {
    if (kind != NdeKind::UniformNonDiv && kind != NdeKind::UniformDiv)
        throw std::invalid_argument("evolve: uniformly dispersive kinds only");
    initial.validate();
    if (t_end <= initial.t) throw std::invalid_argument("evolve: t_end must exceed the field time");

    const std::size_t N = initial.N;
    const auto k = detail::wavenumbers(initial);
    double umax0 = 0, grad0 = 0;
    {
        EvolutionField f0 = initial;
        auto g = spectral_derivative(f0, 1);
        for (std::size_t j = 0; j < N; ++j) {
            umax0 = std::max(umax0, std::fabs(initial.u[j]));
            grad0 = std::max(grad0, std::fabs(g[j]));
        }
    }
    const double kmax = M_PI / initial.L * static_cast<double>(N) / 2.0;
    double dt = opt.dt;
    if (dt <= 0) dt = opt.cfl / ((1.0 + umax0 * umax0) * std::pow(kmax, 5));
    const std::size_t steps = static_cast<std::size_t>(std::ceil((t_end - initial.t) / dt - 1e-12));
    dt = (t_end - initial.t) / static_cast<double>(steps);

    // spectral nonlinear term in integrating-factor variables
    auto nonlinear = [&](const std::vector<std::complex<double>>& uh_phys, double& imag_residue) {
        // uh_phys: physical-variable spectrum (already de-phased)
        auto uh = uh_phys;
        detail::dealias(uh, N);
        double mi1 = 0, mi2 = 0;
        std::vector<double> u = fft_inverse_real(uh, &mi1);
        std::vector<std::complex<double>> nh(N);
        if (kind == NdeKind::UniformNonDiv) {
            // -(u^2) u_xxxxx
            auto vh = uh_phys;
            detail::dealias(vh, N);
            for (std::size_t j = 0; j < N; ++j) {
                std::complex<double> ik(0.0, k[j]);
                vh[j] *= ik * ik * ik * ik * ik;
            }
            vh[N / 2] = 0;
            std::vector<double> u5 = fft_inverse_real(std::move(vh), &mi2);
            std::vector<double> nl(N);
            for (std::size_t j = 0; j < N; ++j) nl[j] = -u[j] * u[j] * u5[j];
            nh = fft_forward(nl);
        } else {
            // -(1/3)(u^3)_xxxxx
            std::vector<double> cube(N);
            for (std::size_t j = 0; j < N; ++j) cube[j] = u[j] * u[j] * u[j];
            nh = fft_forward(cube);
            for (std::size_t j = 0; j < N; ++j) {
                std::complex<double> ik(0.0, k[j]);
                nh[j] *= -(ik * ik * ik * ik * ik) / 3.0;
            }
            nh[N / 2] = 0;
        }
        detail::dealias(nh, N);
        imag_residue = std::max(mi1, mi2);
        return nh;
    };

    EvolveResult result;
    result.dt = dt;
    auto uh = fft_forward(initial.u);
    detail::dealias(uh, N);
    const double mass0 = uh[0].real();

    // linear phase per step: exp(-i k^5 dt)
    std::vector<std::complex<double>> phase_full(N), phase_half(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double w = std::pow(k[j], 5);
        phase_full[j] = std::exp(std::complex<double>(0.0, -w * dt));
        phase_half[j] = std::exp(std::complex<double>(0.0, -w * dt * 0.5));
    }

    const std::size_t snap_every =
        (opt.snapshots > 0) ? std::max<std::size_t>(1, steps / (opt.snapshots + 1)) : steps + 1;

    double t = initial.t;
    double max_imag = 0;
    for (std::size_t step = 0; step < steps; ++step) {
        // RK4 on v' = e^{+i k^5 (t-t0)} N(e^{-i k^5 (t-t0)} v), stepping t0 = t
        double imr = 0;
        auto k1 = nonlinear(uh, imr);
        max_imag = std::max(max_imag, imr);

        std::vector<std::complex<double>> a(N), b(N), c(N), tmp(N);
        // stage 2 at t + dt/2: physical spectrum = phase_half * (v + dt/2 k1v)
        for (std::size_t j = 0; j < N; ++j) tmp[j] = phase_half[j] * (uh[j] + 0.5 * dt * k1[j]);
        auto k2p = nonlinear(tmp, imr);
        max_imag = std::max(max_imag, imr);
        for (std::size_t j = 0; j < N; ++j) a[j] = k2p[j] / phase_half[j]; // back to v-variables

        for (std::size_t j = 0; j < N; ++j) tmp[j] = phase_half[j] * (uh[j] + 0.5 * dt * a[j]);
        auto k3p = nonlinear(tmp, imr);
        max_imag = std::max(max_imag, imr);
        for (std::size_t j = 0; j < N; ++j) b[j] = k3p[j] / phase_half[j];

        for (std::size_t j = 0; j < N; ++j) tmp[j] = phase_full[j] * (uh[j] + dt * b[j]);
        auto k4p = nonlinear(tmp, imr);
        max_imag = std::max(max_imag, imr);
        for (std::size_t j = 0; j < N; ++j) c[j] = k4p[j] / phase_full[j];

        for (std::size_t j = 0; j < N; ++j) {
            const std::complex<double> v =
                uh[j] + (dt / 6.0) * (k1[j] + 2.0 * a[j] + 2.0 * b[j] + c[j]);
            uh[j] = phase_full[j] * v;
        }
        detail::dealias(uh, N);
        t += dt;

        // diagnostics
        double peak = 0, band = 0;
        const std::size_t cutoff = N / 3;
        for (std::size_t j = 0; j <= N / 2; ++j) {
            const double mag = std::abs(uh[j]);
            peak = std::max(peak, mag);
            if (j > cutoff - std::max<std::size_t>(2, cutoff / 10) && j <= cutoff)
                band = std::max(band, mag);
        }
        if (band > opt.tail_fraction_limit * peak)
            throw SpectralTailRise("evolve: spectral tail at " + std::to_string(band / peak) +
                                   " of peak, resolution lost at t = " + std::to_string(t));

        EvolutionField cur;
        cur.L = initial.L;
        cur.N = N;
        cur.t = t;
        double imr2 = 0;
        cur.u = fft_inverse_real(uh, &imr2);
        max_imag = std::max(max_imag, imr2);

        auto grad = spectral_derivative(cur, 1);
        double gmax = 0;
        for (double gv : grad) gmax = std::max(gmax, std::fabs(gv));
        if (gmax > opt.blowup_gradient_factor * std::max(grad0, 1e-12))
            throw BlowupDetected("evolve: max gradient " + std::to_string(gmax) +
                                 " at t = " + std::to_string(t));

        if ((step + 1) % snap_every == 0 && step + 1 < steps) result.snapshots.push_back(cur);
        if (step + 1 == steps) result.snapshots.push_back(cur);
    }
    result.steps = steps;
    result.max_imag_residue = max_imag;
    result.mass_drift = std::fabs(uh[0].real() - mass0) * 2 * initial.L / static_cast<double>(N);
    return result;
}

// ---------------------------------------------------------------------------
// mollified step data

enum class StepData { SPlus, SMinus };

namespace detail {

// primitive of the compactly supported bump kernel, tabulated once
inline double smooth_step(double xi) {
    // integral of exp(-1/(1-t^2)) from -1 to xi, normalized to [0, 1]
    static const std::vector<double>& table = [] {
        static std::vector<double> tab;
        const int n = 2000;
        double acc = 0;
        tab.push_back(0);
        auto bump = [](double t) { return (std::fabs(t) < 1) ? std::exp(-1.0 / (1 - t * t)) : 0.0; };
        for (int i = 1; i <= n; ++i) {
            const double t0 = -1 + 2.0 * (i - 1) / n, t1 = -1 + 2.0 * i / n;
            acc += 0.5 * (bump(t0) + bump(t1)) * (t1 - t0);
            tab.push_back(acc);
        }
        for (double& v : tab) v /= acc;
        return tab;
    }();
    if (xi <= -1) return 0;
    if (xi >= 1) return 1;
    const double pos = (xi + 1) / 2 * (table.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), table.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1 - w) * table[i] + w * table[i + 1];
}

// sign step with smooth periodic edge matching over width w_edge
inline double edge_matched_step(double x, double L, double w_edge, double sgn) {
    double v = (x >= 0) ? 1.0 : -1.0;
    // descend smoothly to zero across the domain edges
    const double ax = std::fabs(x);
    if (ax > L - w_edge) {
        const double xi = (ax - (L - w_edge)) / w_edge * 2 - 1;
        v *= 1.0 - smooth_step(xi);
    }
    return sgn * v;
}

} // namespace detail

struct MollifyResult {
    EvolutionField field;
    double width = 0;      // kernel half-width actually used
    double l1_distance = 0;
    bool abandoned = false; // data were already smooth enough
};

// L^1-controlled smoothing of step data (or custom samples): the kernel width
// is bisected until the distance to the reference lands in [delta/2, delta].
inline MollifyResult mollify(StepData which, double delta, const EvolutionField& tmpl,
                             const std::vector<double>* custom = nullptr) {
    tmpl.validate();
    if (!(delta > 0) || delta >= tmpl.L / 10)
        throw std::invalid_argument("mollify: need 0 < delta < L/10");
    const std::size_t N = tmpl.N;
    const double dx = 2 * tmpl.L / static_cast<double>(N);
    const double w_edge = tmpl.L / 5.0;
    const double sgn = (which == StepData::SPlus) ? 1.0 : -1.0;

    std::vector<double> reference(N);
    for (std::size_t j = 0; j < N; ++j)
        reference[j] = custom ? (*custom)[j]
                              : detail::edge_matched_step(tmpl.x(j), tmpl.L, w_edge, sgn);

    auto mollified = [&](double width) {
        std::vector<double> out(N, 0.0);
        const int half = std::max(1, static_cast<int>(std::ceil(width / dx)) + 1);
        std::vector<double> kernel(2 * half + 1);
        double norm = 0;
        for (int m = -half; m <= half; ++m) {
            const double t = m * dx / width;
            kernel[m + half] = (std::fabs(t) < 1) ? std::exp(-1.0 / (1 - t * t)) : 0.0;
            norm += kernel[m + half];
        }
        for (double& kv : kernel) kv /= norm;
        for (std::size_t j = 0; j < N; ++j) {
            double acc = 0;
            for (int m = -half; m <= half; ++m) {
                const long long raw = static_cast<long long>(j) + m;
                const std::size_t idx = static_cast<std::size_t>(
                    ((raw % static_cast<long long>(N)) + static_cast<long long>(N)) %
                    static_cast<long long>(N));
                acc += kernel[m + half] * reference[idx];
            }
            out[j] = acc;
        }
        return out;
    };
    auto l1 = [&](const std::vector<double>& a) {
        double s = 0;
        for (std::size_t j = 0; j < N; ++j) s += std::fabs(a[j] - reference[j]) * dx;
        return s;
    };

    MollifyResult res;
    res.field = tmpl;
    res.field.t = 0;

    // the narrowest honest kernel spans two cells; below that the discrete
    // convolution degenerates to the identity
    const double w_min = 2 * dx;
    const double d_min = l1(mollified(w_min));
    if (d_min < 0.5 * delta) {
        if (custom) {
            // already smooth at the grid scale: this step must be abandoned
            res.field.u = reference;
            res.abandoned = true;
            res.l1_distance = 0;
            return res;
        }
    } else if (d_min > delta) {
        throw std::invalid_argument("mollify: delta not resolvable on this grid (need delta >= " +
                                    std::to_string(d_min) + ")");
    }

    double lo = w_min, hi = tmpl.L / 4;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = l1(mollified(mid));
        if (d > delta) hi = mid;
        else if (d < 0.5 * delta) lo = mid;
        else { lo = hi = mid; break; }
    }
    res.width = 0.5 * (lo + hi);
    res.field.u = mollified(res.width);
    res.l1_distance = l1(res.field.u);
    return res;
}

// descriptive metrics; verdicts are the caller's business
struct ShockIndicator {
    double max_gradient = 0;
    double l1_to_splus = 0;
    double l1_to_sminus = 0;
    double spectral_tail_fraction = 0;
};

inline ShockIndicator shock_indicator(const EvolutionField& f) {
    f.validate();
    ShockIndicator ind;
    auto g = spectral_derivative(f, 1);
    for (double v : g) ind.max_gradient = std::max(ind.max_gradient, std::fabs(v));
    const double w_edge = f.L / 5.0;
    const double dx = 2 * f.L / static_cast<double>(f.N);
    for (std::size_t j = 0; j < f.N; ++j) {
        const double x = f.x(j);
        if (std::fabs(x) > f.L - w_edge) continue; // edge transition excluded
        ind.l1_to_splus += std::fabs(f.u[j] - (x >= 0 ? 1.0 : -1.0)) * dx;
        ind.l1_to_sminus += std::fabs(f.u[j] - (x >= 0 ? -1.0 : 1.0)) * dx;
    }
    auto uh = fft_forward(f.u);
    double peak = 0, band = 0;
    const std::size_t cutoff = f.N / 3;
    for (std::size_t j = 1; j <= f.N / 2; ++j) {
        const double mag = std::abs(uh[j]);
        peak = std::max(peak, mag);
        if (j > cutoff - std::max<std::size_t>(2, cutoff / 10) && j <= cutoff)
            band = std::max(band, mag);
    }
    ind.spectral_tail_fraction = (peak > 0) ? band / peak : 0.0;
    return ind;
}

} // namespace nde5
