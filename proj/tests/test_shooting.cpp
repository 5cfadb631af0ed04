#include <doctest.h>

#include <cmath>

#include "nde5/shooting.hpp"
#include "oracles.hpp"

using namespace nde5;

namespace {

Trajectory synthetic_trajectory(double z_from, double z_to, double dz,
                                const std::function<double(double)>& g) {
    Trajectory tr;
    for (double z = z_from; z >= z_to - 1e-12; z -= dz) {
        tr.times.push_back(z);
        tr.states.push_back({g(z)});
    }
    tr.termination = Termination::ReachedEnd;
    return tr;
}

} // namespace

TEST_CASE("tail classification on synthetic data") {
    SUBCASE("exact quintic bundle member") {
        Trajectory tr = synthetic_trajectory(-5, -30, 0.05,
                                             [](double z) { return -std::pow(z, 5) / 120.0; });
        CHECK(classify_tail(tr, Family::Shock).tag == TailTag::QuinticGrowth);
    }
    SUBCASE("proper oscillatory tail") {
        const double a0 = 0.534992;
        Trajectory tr = synthetic_trajectory(-5, -30, 0.01, [&](double z) {
            return 1.0 + std::pow(-z, -0.625) * std::cos(a0 * std::pow(-z, 1.25));
        });
        CHECK(classify_tail(tr, Family::Shock).tag == TailTag::ProperOscillatory);
    }
    SUBCASE("transversal zero crossing") {
        IvpSpec s;
        s.rhs = [](double, const double*, double* dy) { dy[0] = 1.0; }; // g = z + 3
        s.t0 = -0.01;
        s.y0 = {2.99};
        s.t_end = -30;
        s.events.push_back([](double, const double* y) { return y[0]; });
        TailClass c = classify_tail(integrate(s), Family::Shock);
        CHECK(c.tag == TailTag::SignChange);
        CHECK(std::fabs(c.z0 + 3.0) < 1e-10);
    }
    SUBCASE("short span stays undecided") {
        Trajectory tr = synthetic_trajectory(-1, -10, 0.05, [](double) { return 1.0; });
        CHECK(classify_tail(tr, Family::Shock).tag == TailTag::Undecided);
    }
}

TEST_CASE("shock shooting reproduces the critical D") {
    ShootResult r = shoot_shock(NdeKind::N50, -1.0, 1.0, 1e-6);
    CHECK(std::fabs(r.value - 0.069192424) < 5e-3);
    CHECK(r.value > r.bracket_lo);
    CHECK(r.value < r.bracket_hi);
    // midpoint profile stays in the oscillatory band before the bisection
    // residue escapes (deviation grows like exp(a0 |z|^{5/4}))
    TailOptions topt;
    int inside = 0, total = 0;
    for (std::size_t i = 0; i < r.profile.mesh.size(); ++i) {
        if (r.profile.mesh[i] > -10 && r.profile.mesh[i] < -topt.band_start) {
            ++total;
            if (std::fabs(r.profile.jets[i].d0 - 1.0) < topt.band_eta) ++inside;
        }
    }
    CHECK(total > 0);
    CHECK(inside == total);
}

TEST_CASE("shock shooting class structure") {
    ShockShootOptions opt;
    SUBCASE("deep negative D joins the quintic bundle") {
        Trajectory tr = detail::shoot_shock_once(NdeKind::N50, -10.0, opt);
        CHECK(classify_tail(tr, Family::Shock).tag == TailTag::QuinticGrowth);
    }
    SUBCASE("large positive D crosses zero, with the zero moving toward the origin") {
        Trajectory tr1 = detail::shoot_shock_once(NdeKind::N50, 10.0, opt);
        TailClass c1 = classify_tail(tr1, Family::Shock);
        REQUIRE(c1.tag == TailTag::SignChange);
        Trajectory tr2 = detail::shoot_shock_once(NdeKind::N50, 100.0, opt);
        TailClass c2 = classify_tail(tr2, Family::Shock);
        REQUIRE(c2.tag == TailTag::SignChange);
        CHECK(c2.z0 > c1.z0); // closer to 0^-
        CHECK(c1.z0 < 0);
    }
    SUBCASE("classification flips exactly once across the bracket") {
        ShockShootOptions scan = opt;
        scan.z_far = 25.0;
        int flips = 0;
        bool prev = false;
        for (int i = 0; i < 50; ++i) {
            const double D = -1.0 + 2.0 * i / 49.0;
            Trajectory tr = detail::shoot_shock_once(NdeKind::N50, D, scan);
            const bool fires = (classify_tail(tr, Family::Shock).tag == TailTag::SignChange);
            if (i > 0 && fires != prev) ++flips;
            prev = fires;
        }
        CHECK(flips == 1);
    }
    SUBCASE("same class at both endpoints is rejected") {
        CHECK_THROWS_AS(shoot_shock(NdeKind::N50, 5.0, 10.0, 1e-4, opt), SameClassAtBracket);
    }
}

TEST_CASE("shock shooting launch-offset robustness") {
    ShockShootOptions a, b;
    a.z_init = 1e-2;
    b.z_init = 1e-3;
    ShootResult ra = shoot_shock(NdeKind::N50, 0.0, 0.2, 1e-8, a);
    ShootResult rb = shoot_shock(NdeKind::N50, 0.0, 0.2, 1e-8, b);
    CHECK(std::fabs(ra.value - rb.value) < 1e-5);
    double sup = 0;
    for (double z = -10; z <= -0.05; z += 0.05)
        sup = std::max(sup, std::fabs(ra.profile.value_at(z) - rb.profile.value_at(z)));
    CHECK(sup < 1e-3);
}

TEST_CASE("shock shooting respects the scaling group") {
    // under g -> a^5 g(z/a) the origin family maps (C, D) -> (a^4 C, a^2 D)
    const double a2 = 2.0; // a^2
    ShockShootOptions base, scaled;
    scaled.C = -a2 * a2; // -a^4
    ShootResult r1 = shoot_shock(NdeKind::N50, 0.0, 0.2, 1e-9, base);
    ShootResult r2 = shoot_shock(NdeKind::N50, 0.0, 0.4, 1e-9, scaled);
    CHECK(std::fabs(r2.value - a2 * r1.value) < 1e-4);
}

TEST_CASE("every shock-family kind admits the dichotomy") {
    for (NdeKind kind : {NdeKind::N41, NdeKind::N32, NdeKind::N23, NdeKind::N14,
                         NdeKind::UniformDiv, NdeKind::UniformNonDiv}) {
        INFO("kind = ", to_string(kind));
        ShootResult r = shoot_shock(kind, -1.0, 1.0, 1e-5);
        CHECK(std::isfinite(r.value));
        CHECK(std::fabs(r.value) < 1.0);
    }
}

TEST_CASE("blow-up shooting") {
    SimilarityParams p(1.0 / 9.0);

    SUBCASE("reproduces the critical f'''(0)") {
        ShootResult r = shoot_blowup(p, -1.0, -1.0, 1.0, 1e-8);
        CHECK(std::fabs(r.value - 0.0718040128557) < 1e-3);
    }
    SUBCASE("converged tail tracks the algebraic bundle before escape") {
        ShootResult r = shoot_blowup(p, -1.0, 0.07, 0.08, 1e-12);
        std::vector<double> ys, fs;
        for (std::size_t i = 0; i < r.profile.mesh.size(); ++i) {
            const double y = r.profile.mesh[i];
            if (y <= -10 && y >= -30) {
                ys.push_back(-y);
                fs.push_back(std::fabs(r.profile.jets[i].d0));
            }
        }
        REQUIRE(ys.size() > 100);
        CHECK(std::fabs(loglog_slope(ys, fs) - 0.5) < 0.05);
    }
    SUBCASE("flip location is reproducible under tolerance tightening") {
        ShootResult r1 = shoot_blowup(p, -1.0, -1.0, 1.0, 1e-6);
        ShootResult r2 = shoot_blowup(p, -1.0, -1.0, 1.0, 1e-7);
        CHECK(std::fabs(r1.value - r2.value) < 1e-6);
    }
    SUBCASE("f1 = +1 admits no quintic/vanishing dichotomy") {
        // the positive-slope seed lands every orbit in the vanishing class;
        // the critical constant lives on the f1 = -1 branch
        CHECK_THROWS_AS(shoot_blowup(p, +1.0, -1.0, 1.0, 1e-4), SameClassAtBracket);
    }
    SUBCASE("collapse-of-shock variant: jump closes as t -> 0^-") {
        BlowupShootOptions opt;
        opt.f0 = 10.0;
        opt.y_far = 20.0;
        Trajectory tr = detail::shoot_blowup_once(p, opt.f0, -1.0, 0.0, opt);
        CHECK(tr.states.front()[0] == doctest::Approx(10.0));
        // [u(0,t)] = 2 f0 (-t)^alpha
        double prev = 1e300;
        for (double t = -1e-1; t < -1e-10; t *= 1e-1) {
            const double jump = 2 * opt.f0 * std::pow(-t, p.alpha);
            CHECK(jump < prev);
            prev = jump;
        }
        CHECK(prev < 2.0);
    }
}

TEST_CASE("fifth-order-in-time phase plane profile") {
    SUBCASE("A=1, B=0: monotone to the equilibrium, cubic tail") {
        Profile prof = shoot_time5(1.0, 0.0);
        CHECK(std::fabs(prof.value_at(-49.9) - 1.0) < 1e-3);
        // monotone decreasing through the origin
        double prev = 2.0;
        for (double z = -49; z <= 49; z += 1.0) {
            const double v = prof.value_at(z);
            CHECK(v < prev + 1e-12);
            prev = v;
        }
        // tail exponent: g - 1 ~ -(A/3) |z|^{-3} (the elementary integration,
        // not the printed quintic rate)
        std::vector<double> zs, dv;
        for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
            const double z = prof.mesh[i];
            if (z <= -10 && z >= -45) {
                zs.push_back(-z);
                dv.push_back(std::fabs(prof.jets[i].d0 - 1.0));
            }
        }
        CHECK(std::fabs(loglog_slope(zs, dv) + 3.0) < 0.1);
        // quadrature oracle: g(z) = 1 + int_{-inf}^z A s/(g - s^5) ds ~ 1 + A/(3 z^3)
        const double A_eff = prof.provenance.at("A_eff");
        for (double z : {-20.0, -30.0, -40.0}) {
            const double oracle_tail = 1.0 + A_eff / (3 * z * z * z);
            CHECK(std::fabs(prof.value_at(z) - oracle_tail) < 2e-5);
        }
    }
    SUBCASE("B=1: harmonic tail 1 + B/z") {
        Profile prof = shoot_time5(1.0, 1.0);
        std::vector<double> zs, dv;
        for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
            const double z = prof.mesh[i];
            if (z <= -10 && z >= -45) {
                zs.push_back(-z);
                dv.push_back(std::fabs(prof.jets[i].d0 - 1.0));
            }
        }
        CHECK(std::fabs(loglog_slope(zs, dv) + 1.0) < 0.05);
    }
    SUBCASE("anti-symmetric extension and origin slope") {
        Profile prof = shoot_time5(4.0, 0.0);
        for (double z : {5.0, 17.0, 33.0})
            CHECK(prof.value_at(z) == doctest::Approx(-prof.value_at(-z)).epsilon(1e-10));
        // after far-field normalization the origin slope is -sqrt(A_eff)
        const double slope = -std::sqrt(prof.provenance.at("A_eff"));
        bool found = false;
        for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
            if (prof.mesh[i] == 0.0) {
                CHECK(prof.jets[i].d1 == doctest::Approx(slope).epsilon(1e-9));
                found = true;
            }
        }
        CHECK(found);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(shoot_time5(-1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("sweep machinery") {
    SUBCASE("empty grid gives an empty report") {
        auto out = sweep_family({}, [](const std::map<std::string, double>&) {
            return std::make_pair(Profile{}, std::map<std::string, double>{});
        });
        CHECK(out.empty());
    }
    SUBCASE("failures are recorded, not fatal") {
        std::vector<std::map<std::string, double>> grid;
        for (int i = 0; i < 6; ++i) grid.push_back({{"i", static_cast<double>(i)}});
        auto out = sweep_family(grid, [](const std::map<std::string, double>& t)
                                    -> std::pair<Profile, std::map<std::string, double>> {
            if (t.at("i") == 3.0) throw std::runtime_error("deliberate");
            Profile p;
            p.provenance["i"] = t.at("i");
            return {p, {{"value", 2 * t.at("i")}}};
        });
        REQUIRE(out.size() == 6);
        int ok = 0;
        for (const auto& e : out) ok += e.ok;
        CHECK(ok == 5);
        CHECK(!out[3].ok);
        CHECK(out[3].error == "deliberate");
        CHECK(out[5].metrics.at("value") == 10.0);
    }
}
