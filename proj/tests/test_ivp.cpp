#include <doctest.h>

#include <cmath>

#include "nde5/ivp.hpp"

using namespace nde5;

namespace {

IvpSpec decay_spec() {
    IvpSpec s;
    s.rhs = [](double, const double* y, double* dy) { dy[0] = -y[0]; };
    s.t0 = 0;
    s.y0 = {1.0};
    s.t_end = 1.0;
    return s;
}

IvpSpec oscillator_spec(double t_end) {
    IvpSpec s;
    s.rhs = [](double, const double* y, double* dy) {
        dy[0] = -y[1];
        dy[1] = y[0];
    };
    s.t0 = 0;
    s.y0 = {1.0, 0.0};
    s.t_end = t_end;
    return s;
}

} // namespace

TEST_CASE("scalar linear decay reaches e^{-1}") {
    IvpSpec s = decay_spec();
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-12;
    Trajectory tr = integrate(s);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    CHECK(tr.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator returns and conserves energy") {
    IvpSpec s = oscillator_spec(2 * M_PI);
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-12;
    Trajectory tr = integrate(s);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    CHECK(std::fabs(tr.states.back()[0] - 1.0) < 1e-6);
    CHECK(std::fabs(tr.states.back()[1]) < 1e-6);
    for (const auto& y : tr.states) {
        const double energy = y[0] * y[0] + y[1] * y[1];
        CHECK(std::fabs(energy - 1.0) < 1e-6);
    }
}

TEST_CASE("event fires at the cosine zero") {
    IvpSpec s = oscillator_spec(10.0);
    s.events.push_back([](double, const double* y) { return y[0]; });
    Trajectory tr = integrate(s);
    REQUIRE(tr.termination == Termination::EventFired);
    CHECK(tr.event_index == 0);
    CHECK(std::fabs(tr.event_time - M_PI / 2) < 1e-10);
}

TEST_CASE("dense output") {
    SUBCASE("stored node is exact") {
        Trajectory tr = integrate(decay_spec());
        const double tn = tr.times[tr.times.size() / 2];
        auto y = dense_eval(tr, tn);
        CHECK(y[0] == tr.states[tr.times.size() / 2][0]);
    }
    SUBCASE("linear rhs interpolates exactly") {
        IvpSpec s;
        s.rhs = [](double, const double*, double* dy) { dy[0] = 1.0; };
        s.t0 = 0;
        s.y0 = {0.0};
        s.t_end = 1.0;
        Trajectory tr = integrate(s);
        CHECK(std::fabs(dense_eval(tr, 0.37)[0] - 0.37) < 1e-12);
    }
    SUBCASE("oscillator mid-span") {
        Trajectory tr = integrate(oscillator_spec(2 * M_PI));
        auto y = dense_eval(tr, M_PI / 4);
        CHECK(std::fabs(y[0] - std::cos(M_PI / 4)) < 1e-6);
        CHECK(std::fabs(y[1] - std::sin(M_PI / 4)) < 1e-6);
    }
    SUBCASE("out of span rejected") {
        Trajectory tr = integrate(decay_spec());
        CHECK_THROWS_AS(dense_eval(tr, 2.0), std::out_of_range);
    }
}

TEST_CASE("halving tolerances never increases terminal error") {
    IvpSpec ref = oscillator_spec(2 * M_PI);
    ref.rel_tol = 1e-13;
    ref.abs_tol = 1e-15;
    const double y_ref = integrate(ref).states.back()[0];

    double prev_err = 1e100;
    double rtol = 1e-4, atol = 1e-6;
    for (int k = 0; k < 6; ++k) {
        IvpSpec s = oscillator_spec(2 * M_PI);
        s.rel_tol = rtol;
        s.abs_tol = atol;
        const double err = std::fabs(integrate(s).states.back()[0] - y_ref);
        CHECK(err <= prev_err * (1 + 1e-12));
        prev_err = err;
        rtol /= 2;
        atol /= 2;
    }
}

TEST_CASE("event time independent of max_step") {
    double t_free, t_capped;
    {
        IvpSpec s = oscillator_spec(10.0);
        s.events.push_back([](double, const double* y) { return y[0]; });
        t_free = integrate(s).event_time;
    }
    {
        IvpSpec s = oscillator_spec(10.0);
        s.max_step = 0.05;
        s.events.push_back([](double, const double* y) { return y[0]; });
        t_capped = integrate(s).event_time;
    }
    CHECK(std::fabs(t_free - t_capped) < 1e-9);
}

TEST_CASE("autonomous rhs is translation invariant in t") {
    IvpSpec a = oscillator_spec(3.0);
    Trajectory ta = integrate(a);

    IvpSpec b = oscillator_spec(3.0);
    b.t0 = 7.0;
    b.t_end = 10.0;
    Trajectory tb = integrate(b);

    REQUIRE(ta.times.size() == tb.times.size());
    for (std::size_t i = 0; i < ta.times.size(); ++i) {
        CHECK(std::fabs((tb.times[i] - 7.0) - ta.times[i]) < 1e-12);
        CHECK(std::fabs(tb.states[i][0] - ta.states[i][0]) < 1e-12);
    }
}

TEST_CASE("finite-time blow-up triggers StateOverflow") {
    IvpSpec s;
    s.rhs = [](double, const double* y, double* dy) { dy[0] = y[0] * y[0]; };
    s.t0 = 0;
    s.y0 = {1.0};
    s.t_end = 2.0; // solution 1/(1-t) blows up at t = 1
    s.overflow_threshold = 1e6;
    Trajectory tr = integrate(s);
    CHECK(tr.termination == Termination::StateOverflow);
    CHECK(tr.times.back() < 1.0 + 1e-6);
    CHECK(std::fabs(tr.states.back()[0]) > 1e6);
}

TEST_CASE("non-integrable rhs triggers StepFailure") {
    IvpSpec s;
    s.rhs = [](double t, const double*, double* dy) {
        dy[0] = (t < 0.5) ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    };
    s.t0 = 0;
    s.y0 = {0.0};
    s.t_end = 1.0;
    Trajectory tr = integrate(s);
    CHECK(tr.termination == Termination::StepFailure);
}

TEST_CASE("degenerate spans rejected") {
    IvpSpec s = decay_spec();
    s.t_end = s.t0;
    CHECK_THROWS_AS(integrate(s), std::invalid_argument);
    IvpSpec s2 = decay_spec();
    s2.rel_tol = 0;
    CHECK_THROWS_AS(integrate(s2), std::invalid_argument);
}

TEST_CASE("backward integration works") {
    IvpSpec s = decay_spec();
    s.t0 = 0;
    s.t_end = -1.0;
    Trajectory tr = integrate(s);
    REQUIRE(tr.termination == Termination::ReachedEnd);
    CHECK(tr.states.back()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
    CHECK(std::fabs(dense_eval(tr, -0.5)[0] - std::exp(0.5)) < 1e-7);
}
