#include <doctest.h>

#include <cmath>

#include "nde5/compactons.hpp"
#include "nde5/fitting.hpp"

using namespace nde5;

TEST_CASE("explicit compactons") {
    SUBCASE("K22 closed form") {
        auto c = explicit_compacton(ExplicitCompacton::K22);
        CHECK(c.f_jet(0.0).d0 == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
        CHECK(c.y0 == doctest::Approx(2 * M_PI));
        double rmax = 0;
        for (double y = 0.01; y < c.y0; y += 0.01)
            rmax = std::max(rmax, std::fabs(explicit_compacton_residual(c, y)));
        CHECK(rmax < 1e-12);
        // identically zero outside the support
        CHECK(c.f_jet(2 * M_PI + 0.5).d0 == 0.0);
        CHECK(c.f_jet(-7.0).d0 == 0.0);
        // C^1 contact at the interface
        CHECK(std::fabs(c.f_jet(2 * M_PI - 1e-9).d0) < 1e-10);
        CHECK(std::fabs(c.f_jet(2 * M_PI - 1e-9).d1) < 1e-9);
    }
    SUBCASE("quintic closed form") {
        auto c = explicit_compacton(ExplicitCompacton::Quintic);
        CHECK(c.f_jet(0.0).d0 == doctest::Approx(1.0 / 105.0).epsilon(1e-14));
        CHECK(c.y0 == doctest::Approx(M_PI));
        double rmax = 0;
        for (int i = 1; i < 1000; ++i) {
            const double y = c.y0 * i / 1000.0;
            rmax = std::max(rmax, std::fabs(explicit_compacton_residual(c, y)));
        }
        CHECK(rmax < 1e-8);
        // C^3 contact at the interface
        const Jet5 j = c.f_jet(M_PI - 1e-6);
        CHECK(std::fabs(j.d0) < 1e-10);
        CHECK(std::fabs(j.d1) < 1e-10);
        CHECK(std::fabs(j.d2) < 1e-10);
        CHECK(std::fabs(j.d3) < 1e-5);
    }
}

TEST_CASE("phi limit cycle") {
    const PhiOrbit& orb = phi_orbit();
    CHECK(orb.period > 0.9);
    CHECK(orb.period < 1.1);
    CHECK(orb.amplitude > 1e-8);
    CHECK(orb.amplitude < 1e-6);
    // periodicity: the state returns to itself after one period
    auto a = orb.eval(0.123);
    auto b = orb.eval(0.123 + orb.period);
    for (int k = 0; k < 4; ++k) CHECK(std::fabs(a[k] - b[k]) < 1e-12);
}

TEST_CASE("oscillatory compacton branches") {
    CompactonProfile c1 = oscillatory_compacton(1);
    CompactonProfile c2 = oscillatory_compacton(2);

    SUBCASE("branch 1: even single hump with near-interface sign changes") {
        CHECK(c1.branch == 1);
        CHECK(c1.F.front() > 0); // F(0) > 0
        double fmax = 0;
        for (double v : c1.F) fmax = std::max(fmax, std::fabs(v));
        CHECK(c1.F.front() == doctest::Approx(fmax).epsilon(1e-6)); // hump at the center
        int sc = 0;
        for (std::size_t i = 1; i < c1.F.size(); ++i)
            if (c1.y[i] > c1.y0 - 1.5 && c1.F[i - 1] * c1.F[i] < 0) ++sc;
        CHECK(sc >= 3);
    }
    SUBCASE("branch 2: essentially non-monotone") {
        CHECK(c2.branch == 2);
        CHECK(c2.y0 != doctest::Approx(c1.y0).epsilon(1e-3));
        double fmax = 0;
        for (double v : c2.F) fmax = std::max(fmax, std::fabs(v));
        CHECK(c2.F.front() < 0.5 * fmax); // deep central dip
    }
    SUBCASE("interface envelope exponent is 8") {
        // local |F| maxima against the interface distance
        std::vector<double> w, peak;
        for (std::size_t i = 1; i + 1 < c1.F.size(); ++i) {
            const double a = std::fabs(c1.F[i - 1]), b = std::fabs(c1.F[i]),
                         c = std::fabs(c1.F[i + 1]);
            const double wi = c1.y0 - c1.y[i];
            if (wi > 2.0 || wi < 1e-2) continue;
            if (b >= a && b >= c && b > 0) {
                w.push_back(wi);
                peak.push_back(b);
            }
        }
        REQUIRE(w.size() >= 4);
        CHECK(std::fabs(loglog_slope(w, peak) - 8.0) < 0.3);
    }
    SUBCASE("oscillatory component") {
        PhiComponent pc = phi_component(c1);
        CHECK(pc.periodicity_defect < 0.2);
        CHECK(pc.period == doctest::Approx(phi_orbit().period).epsilon(0.05));
    }
    SUBCASE("regularization convergence: halving nu barely moves y0") {
        // the regularized problem must be launched outside the zone |F| ~ nu
        // where the square-root term is linearized away
        auto refine_y0 = [&](double nu) {
            OscillatoryOptions opt;
            opt.nu = nu;
            opt.w_start = 1.3;
            double lo = c1.y0 - 0.05, hi = c1.y0 + 0.05;
            double s0, dlo, dhi;
            REQUIRE(detail::flip_phase(lo, opt, s0, dlo, 34));
            REQUIRE(detail::flip_phase(hi, opt, s0, dhi, 34));
            REQUIRE(dlo * dhi < 0);
            for (int k = 0; k < 22; ++k) {
                const double mid = 0.5 * (lo + hi);
                double dm;
                REQUIRE(detail::flip_phase(mid, opt, s0, dm, 34));
                if (dlo * dm < 0) { hi = mid; }
                else { lo = mid; dlo = dm; }
            }
            return 0.5 * (lo + hi);
        };
        const double y0_a = refine_y0(1e-8);
        const double y0_b = refine_y0(5e-9);
        CHECK(std::fabs(y0_a - y0_b) < 1e-3);
        CHECK(std::fabs(y0_a - c1.y0) < 5e-3);
    }
}

TEST_CASE("phi component extraction") {
    SUBCASE("manufactured oscillation has unit period") {
        CompactonProfile c;
        c.which = "synthetic";
        c.y0 = 5.0;
        for (double s = -14.0; s <= 1.0; s += 0.002) {
            const double w = std::exp(s);
            c.y.push_back(c.y0 - w);
            c.F.push_back(std::pow(w, 8) * std::sin(2 * M_PI * s));
            c.f.push_back(0);
        }
        PhiComponent pc = phi_component(c);
        CHECK(std::fabs(pc.period - 1.0) < 1e-3);
        CHECK(pc.periodicity_defect < 1e-6);
    }
    SUBCASE("monotone profile has no oscillation") {
        CompactonProfile c;
        c.which = "synthetic";
        c.y0 = 5.0;
        for (double y = 0; y < 5.0; y += 0.01) {
            c.y.push_back(y);
            c.F.push_back(std::pow(5.0 - y, 8));
            c.f.push_back(0);
        }
        CHECK_THROWS_AS(phi_component(c), NoOscillation);
    }
}

TEST_CASE("nonnegative-compacton robustness probe") {
    RobustnessReport rep = robustness_probe();

    SUBCASE("fifth order: one interface parameter cannot satisfy two symmetry conditions") {
        CHECK(rep.fifth_min_defect > 1e3 * rep.tol);
        // the defect is the polynomial's own origin data, smallest at y0 = 1
        const double K = std::pow(1.0 / 840.0, 2);
        const double analytic = std::hypot(8 * K, 336 * K);
        CHECK(rep.fifth_min_y0 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.fifth_min_defect == doctest::Approx(analytic).epsilon(1e-4));
    }
    SUBCASE("third order: the single symmetry condition is matched at the closed-form support") {
        CHECK(rep.third_defect < rep.tol);
        CHECK(std::fabs(rep.third_y0 - 2 * M_PI) < 1e-3);
    }
    SUBCASE("tuned quintic: the exceptional coefficients admit the closed form") {
        CHECK(rep.quintic_defect < rep.tol);
        CHECK(std::fabs(rep.quintic_y0 - M_PI) < 1e-2);
    }
    SUBCASE("defect bounded below under refinement") {
        RobustnessReport finer = robustness_probe(1.0, 20.0, 77, 1e-12);
        CHECK(finer.fifth_min_defect > 1e3 * finer.tol);
        CHECK(finer.fifth_min_defect == doctest::Approx(rep.fifth_min_defect).epsilon(1e-3));
    }
}
