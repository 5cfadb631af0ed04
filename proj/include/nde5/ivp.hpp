#pragma once

// Adaptive explicit Runge-Kutta initial-value integration with dense output
// and event detection.  The pair is the classic Dormand-Prince 5(4) with the
// quartic continuous extension; step size is driven by a proportional-integral
// controller on the embedded error estimate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nde5 {

using RhsFn = std::function<void(double t, const double* y, double* dydt)>;
using EventFn = std::function<double(double t, const double* y)>;

struct IvpSpec {
    RhsFn rhs;
    double t0 = 0.0;
    std::vector<double> y0;
    double t_end = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double overflow_threshold = 1e12;
    std::vector<EventFn> events;

    void validate() const {
        if (!rhs) throw std::invalid_argument("ivp: rhs not set");
        if (y0.empty()) throw std::invalid_argument("ivp: empty state");
        if (t_end == t0) throw std::invalid_argument("ivp: t_end == t0");
        if (rel_tol <= 0 || abs_tol <= 0) throw std::invalid_argument("ivp: tolerances must be positive");
        if (max_step <= 0) throw std::invalid_argument("ivp: max_step must be positive");
    }
};

enum class Termination { ReachedEnd, EventFired, StepFailure, StateOverflow };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedEnd: return "ReachedEnd";
        case Termination::EventFired: return "EventFired";
        case Termination::StepFailure: return "StepFailure";
        case Termination::StateOverflow: return "StateOverflow";
    }
    return "?";
}

// One accepted step together with the five coefficient vectors of the
// Dormand-Prince continuous extension (Hairer's rcont1..rcont5 layout).
struct DenseSegment {
    double t0 = 0, h = 0;
    std::vector<double> c1, c2, c3, c4, c5;

    void eval(double t, double* out) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        for (std::size_t i = 0; i < c1.size(); ++i)
            out[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
    }
};

struct Trajectory {
    std::vector<double> times;                 // strictly monotone (either direction)
    std::vector<std::vector<double>> states;   // one state per node
    std::vector<DenseSegment> segments;        // times.size()-1 segments
    Termination termination = Termination::ReachedEnd;
    int event_index = -1;                      // valid when termination == EventFired
    double event_time = std::numeric_limits<double>::quiet_NaN();
    double overflow_threshold = 0;             // valid when termination == StateOverflow

    std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
    double t_front() const { return times.front(); }
    double t_back() const { return times.back(); }
    bool forward() const { return times.back() >= times.front(); }

    bool contains(double t) const {
        const double a = std::min(times.front(), times.back());
        const double b = std::max(times.front(), times.back());
        return t >= a && t <= b;
    }

    // Continuous evaluation of the trajectory; exact at stored nodes.
    std::vector<double> eval(double t) const {
        if (!contains(t)) throw std::out_of_range("trajectory: query outside span");
        const bool fwd = forward();
        std::size_t lo = 0, hi = times.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (fwd ? (times[mid] <= t) : (times[mid] >= t)) lo = mid; else hi = mid;
        }
        if (t == times[lo]) return states[lo];
        if (t == times[hi]) return states[hi];
        std::vector<double> out(dim());
        segments[lo].eval(t, out.data());
        return out;
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// y1 - yhat1 weights.
inline constexpr double dp_e[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Dense-output weights.
inline constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

} // namespace detail

inline Trajectory integrate(const IvpSpec& spec) {
    spec.validate();

    const std::size_t n = spec.y0.size();
    const double dir = spec.t_end > spec.t0 ? 1.0 : -1.0;
    const double span = std::fabs(spec.t_end - spec.t0);
    const double h_min = 1e-14 * span;

    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> y = spec.y0, y1(n), ytmp(n), err(n);

    Trajectory traj;
    traj.times.push_back(spec.t0);
    traj.states.push_back(y);

    spec.rhs(spec.t0, y.data(), k[0].data());
    if (!detail::all_finite(k[0])) throw std::invalid_argument("ivp: rhs not finite at initial point");

    std::vector<double> ev0(spec.events.size());
    for (std::size_t j = 0; j < spec.events.size(); ++j) ev0[j] = spec.events[j](spec.t0, y.data());

    // starting step: crude two-norm heuristic, refined at once by the controller
    double h;
    {
        double d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = spec.abs_tol + spec.rel_tol * std::fabs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k[0][i] / sc) * (k[0][i] / sc);
        }
        h = (d1 > 0 && d0 > 0) ? 0.01 * std::sqrt(d0 / d1) : 1e-6 * span;
        h = std::min({h, span, spec.max_step});
        h = std::max(h, 4 * h_min);
    }

    double t = spec.t0;
    double err_prev = 1.0;
    bool fsal_valid = true;

    while (dir * (spec.t_end - t) > 0) {
        h = std::min({h, spec.max_step, std::fabs(spec.t_end - t)});
        if (h < h_min) {
            traj.termination = Termination::StepFailure;
            return traj;
        }
        const double hs = dir * h;

        if (!fsal_valid) spec.rhs(t, y.data(), k[0].data());
        bool bad = !detail::all_finite(k[0]);
        for (int s = 1; s < 7 && !bad; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0;
                for (int q = 0; q < s; ++q) acc += detail::dp_a[s][q] * k[q][i];
                ytmp[i] = y[i] + hs * acc;
            }
            spec.rhs(t + detail::dp_c[s] * hs, ytmp.data(), k[s].data());
            bad = !detail::all_finite(k[s]);
        }
        // stage 7 is evaluated at (t+h, y1); ytmp already holds y1 there
        y1 = ytmp;

        double err_norm = 0;
        if (!bad) {
            for (std::size_t i = 0; i < n; ++i) {
                double e = 0;
                for (int s = 0; s < 7; ++s) e += detail::dp_e[s] * k[s][i];
                e *= hs;
                const double sc = spec.abs_tol + spec.rel_tol * std::max(std::fabs(y[i]), std::fabs(y1[i]));
                err_norm += (e / sc) * (e / sc);
            }
            err_norm = std::sqrt(err_norm / static_cast<double>(n));
            bad = !std::isfinite(err_norm) || !detail::all_finite(y1);
        }

        if (bad || err_norm > 1.0) {
            const double fac = bad ? 0.3 : std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            h *= std::min(0.9, fac);
            fsal_valid = false;
            continue;
        }

        // accepted: build the continuous extension for this step
        DenseSegment seg;
        seg.t0 = t;
        seg.h = hs;
        seg.c1.resize(n); seg.c2.resize(n); seg.c3.resize(n); seg.c4.resize(n); seg.c5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dy = y1[i] - y[i];
            double c5 = 0;
            for (int s = 0; s < 7; ++s) c5 += detail::dp_d[s] * k[s][i];
            seg.c1[i] = y[i];
            seg.c2[i] = dy;
            seg.c3[i] = hs * k[0][i] - dy;
            seg.c4[i] = dy - hs * k[6][i] - seg.c3[i];
            seg.c5[i] = hs * c5;
        }

        const double t1 = (dir * (spec.t_end - (t + hs)) <= 0) ? spec.t_end : t + hs;

        // event scan on the dense output: sample, bracket, bisect
        int fired = -1;
        double t_fire = 0;
        if (!spec.events.empty()) {
            constexpr int samples = 8;
            std::vector<double> ya(n), yb(n);
            for (std::size_t j = 0; j < spec.events.size(); ++j) {
                double ta = t, ga = ev0[j];
                for (int m = 1; m <= samples; ++m) {
                    const double tb = t + hs * (static_cast<double>(m) / samples);
                    seg.eval(tb, yb.data());
                    const double gb = spec.events[j](tb, yb.data());
                    if (ga == 0.0 && m == 1) { ga = gb; ta = tb; continue; } // root at node already counted
                    if ((ga < 0 && gb >= 0) || (ga > 0 && gb <= 0)) {
                        double lo = ta, hi = tb, glo = ga;
                        while (std::fabs(hi - lo) > 1e-12) {
                            const double mid = 0.5 * (lo + hi);
                            seg.eval(mid, ya.data());
                            const double gm = spec.events[j](mid, ya.data());
                            if ((glo < 0 && gm >= 0) || (glo > 0 && gm <= 0)) hi = mid;
                            else { lo = mid; glo = gm; }
                        }
                        const double tr = 0.5 * (lo + hi);
                        if (fired < 0 || dir * (tr - t_fire) < 0) { fired = static_cast<int>(j); t_fire = tr; }
                        break;
                    }
                    ga = gb;
                    ta = tb;
                }
            }
        }
        if (fired >= 0) {
            std::vector<double> ye(n);
            seg.eval(t_fire, ye.data());
            seg.h = t_fire - seg.t0; // truncate the segment at the event
            traj.segments.push_back(seg);
            traj.times.push_back(t_fire);
            traj.states.push_back(ye);
            traj.termination = Termination::EventFired;
            traj.event_index = fired;
            traj.event_time = t_fire;
            return traj;
        }

        traj.segments.push_back(seg);
        traj.times.push_back(t1);
        traj.states.push_back(y1);

        if (detail::inf_norm(y1) > spec.overflow_threshold) {
            traj.termination = Termination::StateOverflow;
            traj.overflow_threshold = spec.overflow_threshold;
            return traj;
        }

        t = t1;
        y.swap(y1);
        k[0] = k[6]; // FSAL
        fsal_valid = true;
        for (std::size_t j = 0; j < spec.events.size(); ++j) ev0[j] = spec.events[j](t, y.data());

        // PI controller (Hairer's beta = 0.04 variant)
        const double e = std::max(err_norm, 1e-10);
        double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        err_prev = e;
    }

    traj.termination = Termination::ReachedEnd;
    return traj;
}

inline std::vector<double> dense_eval(const Trajectory& traj, double t) { return traj.eval(t); }

} // namespace nde5
