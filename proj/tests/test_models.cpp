#include <doctest.h>

#include <cmath>

#include "nde5/models.hpp"
#include "oracles.hpp"

using namespace nde5;

namespace {

oracle::Op oracle_op(NdeKind k) {
    switch (k) {
        case NdeKind::N50: return oracle::Op::GG5;
        case NdeKind::N41: return oracle::Op::GG4_1;
        case NdeKind::N32: return oracle::Op::GG3_2;
        case NdeKind::N23: return oracle::Op::GG2_3;
        case NdeKind::N14: return oracle::Op::GG1_4;
        case NdeKind::UniformDiv: return oracle::Op::UDIV;
        default: return oracle::Op::UNONDIV;
    }
}

// reconstruct Op(g)(z) from the rhs-isolated top derivative and the jet of g
double op_from_rhs(NdeKind kind, const RhsFn& rhs, const oracle::Coeffs& g, double z) {
    auto jet = oracle::eval_jet(g, z, 5);
    double y[5] = {jet[0], jet[1], jet[2], jet[3], jet[4]};
    double dy[5];
    rhs(z, y, dy);
    // rhs solves Op(g) = -(1/5) g' z for the top derivative; substituting the
    // rhs value back and adding (1/5) g' z recovers Op up to the defect in g5
    const double g5_true = jet[5];
    double lead = 1.0; // coefficient of g5 in the expansion
    switch (kind) {
        case NdeKind::UniformDiv:
        case NdeKind::UniformNonDiv: lead = 1.0 + jet[0] * jet[0]; break;
        default: lead = jet[0]; break;
    }
    return -0.2 * jet[1] * z + lead * (g5_true - dy[4]);
}

} // namespace

TEST_CASE("Leibniz expansion matches symbolic differentiation for every kind") {
    const NdeKind kinds[] = {NdeKind::N50, NdeKind::N41, NdeKind::N32, NdeKind::N23,
                             NdeKind::N14, NdeKind::UniformDiv, NdeKind::UniformNonDiv};
    oracle::Rng rng(42);
    for (NdeKind kind : kinds) {
        RhsFn rhs = rhs_shock(kind, 0.0);
        for (int trial = 0; trial < 100; ++trial) {
            oracle::Coeffs g(8);
            for (double& c : g) c = rng.next();
            double z = 0.3 + 1.5 * std::fabs(rng.next());
            if (std::fabs(oracle::eval(g, z)) < 0.05) continue; // stay away from the degeneracy
            const double direct = oracle::eval(oracle::apply_operator(oracle_op(kind), g), z);
            const double reconstructed = op_from_rhs(kind, rhs, g, z);
            CHECK(std::fabs(direct - reconstructed) <
                  1e-10 * std::max(1.0, std::fabs(direct)));
        }
    }
}

TEST_CASE("pointwise rhs examples") {
    SUBCASE("N14 with vanishing slope") {
        double y[5] = {1, 0, 0, 0, 0}, dy[5];
        rhs_shock(NdeKind::N14, 0.0)(1.0, y, dy);
        CHECK(dy[4] == 0.0);
    }
    SUBCASE("N50 direct substitution") {
        double y[5] = {2, 1, 0, 0, 0}, dy[5];
        rhs_shock(NdeKind::N50, 0.0)(-5.0, y, dy);
        CHECK(dy[4] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("N14 residual along g(z) = z") {
        // -(g g')'''' - (1/5) g' z = -(1/5) z for g = z
        oracle::Coeffs g{0.0, 1.0};
        auto resid = oracle::scale(oracle::shock_residual_series(oracle::Op::GG1_4, g), -1.0);
        CHECK(oracle::eval(resid, 2.0) == doctest::Approx(-0.4).epsilon(1e-14));
        CHECK(oracle::eval(resid, -3.0) == doctest::Approx(0.6).epsilon(1e-14));
    }
}

TEST_CASE("blow-up rhs") {
    SimilarityParams p(1.0 / 9.0);
    CHECK(p.beta == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    CHECK(p.tail_exponent() == doctest::Approx(0.5).epsilon(1e-15));

    SUBCASE("constant jet") {
        double y[5] = {1, 0, 0, 0, 0}, dy[5];
        rhs_blowup(p, 0.0)(3.0, y, dy);
        CHECK(dy[4] == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    }
    SUBCASE("weak stationary shock solves the equation exactly") {
        // f = sqrt(y) on y > 0: f f' = 1/2 and -beta f' y + alpha f = 0
        for (double yv : {0.5, 1.0, 2.0, 7.5}) {
            const double f = std::sqrt(yv);
            double jet[5] = {f, 0.5 / f, -0.25 * std::pow(yv, -1.5), 0.375 * std::pow(yv, -2.5),
                             -15.0 / 16.0 * std::pow(yv, -3.5)};
            double dy[5];
            rhs_blowup(p, 0.0)(yv, jet, dy);
            const double f5_true = 105.0 / 32.0 * std::pow(yv, -4.5);
            CHECK(std::fabs(dy[4] - f5_true) < 1e-12 * std::fabs(f5_true));
        }
    }
    SUBCASE("global rhs mirrors blow-up on derivative-free jets") {
        oracle::Rng rng(7);
        for (int i = 0; i < 20; ++i) {
            double y[5] = {1.5 + rng.next(), 0, 0, 0, 0}, da[5], db[5];
            const double yv = 2 * rng.next();
            rhs_blowup(p, 0.0)(yv, y, da);
            rhs_global(p, 0.0)(yv, y, db);
            CHECK(std::fabs(da[4] + db[4]) < 1e-14 * std::max(1.0, std::fabs(da[4])));
        }
    }
    SUBCASE("alpha = 0 blow-up rhs coincides with the N14 shock rhs") {
        SimilarityParams p0(0.0);
        oracle::Rng rng(11);
        for (int i = 0; i < 30; ++i) {
            double y[5], da[5], db[5];
            for (int k = 0; k < 5; ++k) y[k] = rng.next();
            if (std::fabs(y[0]) < 0.05) continue;
            const double z = 2 * rng.next();
            rhs_blowup(p0, 0.0)(z, y, da);
            rhs_shock(NdeKind::N14, 0.0)(z, y, db);
            CHECK(std::fabs(da[4] - db[4]) < 1e-12 * std::max(1.0, std::fabs(db[4])));
        }
    }
}

TEST_CASE("anti-symmetry image has residual of equal magnitude") {
    // (symm88): if g solves, g~(z) = -g(-z) gives r(g~)(z) = -r(g)(-z)
    oracle::Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        oracle::Coeffs g(8);
        for (double& c : g) c = rng.next();
        oracle::Coeffs gt(8);
        for (std::size_t k = 0; k < g.size(); ++k) gt[k] = (k % 2 == 0) ? -g[k] : g[k];
        const double z = 1.7 * rng.next();
        const double r = oracle::eval(oracle::shock_residual_series(oracle::Op::GG5, g), -z);
        const double rt = oracle::eval(oracle::shock_residual_series(oracle::Op::GG5, gt), z);
        CHECK(std::fabs(rt + r) < 1e-11 * std::max(1.0, std::fabs(r)));
    }
}

TEST_CASE("origin series by coefficient matching") {
    SUBCASE("N50 z^5 coefficient is -1/600 for any C, D") {
        for (double C : {-1.0, -2.0, 0.7}) {
            for (double D : {0.0, 0.3, -1.1}) {
                auto s = series_origin(NdeKind::N50, C, D, 9);
                CHECK(s.coefficient(5) == doctest::Approx(-1.0 / 600.0).epsilon(1e-12));
            }
        }
    }
    SUBCASE("N50 z^7 coefficient is proportional to D and vanishes with it") {
        auto s0 = series_origin(NdeKind::N50, -1.0, 0.0, 9);
        CHECK(std::fabs(s0.coefficient(7)) < 1e-15);
        // matching gives c7 = -D/(6300 C); at C = -1 this is +D/6300
        auto s1 = series_origin(NdeKind::N50, -1.0, 0.5, 9);
        CHECK(s1.coefficient(7) == doctest::Approx(0.5 / 6300.0).epsilon(1e-10));
        auto s2 = series_origin(NdeKind::N50, 2.0, 0.5, 9);
        CHECK(s2.coefficient(7) == doctest::Approx(-0.5 / (6300.0 * 2.0)).epsilon(1e-10));
    }
    SUBCASE("origin jet is (0, C, 0, 6D, 0)") {
        for (NdeKind k : {NdeKind::N50, NdeKind::N14, NdeKind::N32, NdeKind::UniformDiv}) {
            auto s = series_origin(k, -1.0, 0.25, 9);
            Jet5 j = s(0.0);
            CHECK(j.d0 == 0.0);
            CHECK(j.d1 == doctest::Approx(-1.0));
            CHECK(j.d2 == 0.0);
            CHECK(j.d3 == doctest::Approx(1.5));
            CHECK(j.d4 == 0.0);
        }
    }
    SUBCASE("series residual decays like z^{order-4} or better near 0") {
        for (NdeKind kind : {NdeKind::N50, NdeKind::N41, NdeKind::N32, NdeKind::N23, NdeKind::N14}) {
            auto s = series_origin(kind, -1.0, 0.3, 9);
            oracle::Coeffs g(s.series.c.begin(), s.series.c.end());
            auto resid = oracle::shock_residual_series(oracle_op(kind), g);
            std::vector<double> zs, rs;
            for (double z = 1e-3; z <= 0.1 + 1e-12; z *= std::pow(100.0, 1.0 / 8.0)) {
                zs.push_back(z);
                rs.push_back(std::fabs(oracle::eval(resid, z)) + 1e-300);
            }
            CHECK(oracle::loglog_slope(zs, rs) > 5.0 - 0.3);
        }
    }
    SUBCASE("order cap and argument checks") {
        CHECK_THROWS_AS(series_origin(NdeKind::N50, -1.0, 0.0, 11), std::invalid_argument);
        CHECK_THROWS_AS(series_origin(NdeKind::N50, 0.0, 0.0, 9), std::invalid_argument);
    }
}

TEST_CASE("rescale") {
    Profile p;
    p.kind = NdeKind::N50;
    p.family = Family::Shock;
    p.provenance["test"] = 1;
    auto s = series_origin(NdeKind::N50, -1.0, 0.1, 9);
    for (double z = -2.0; z <= -0.01; z += 0.05) {
        p.mesh.push_back(z);
        p.jets.push_back(s(z));
    }

    SUBCASE("a = 1 is the identity") {
        Profile q = rescale(p, 1.0);
        for (std::size_t i = 0; i < p.mesh.size(); ++i) {
            CHECK(q.mesh[i] == p.mesh[i]);
            CHECK(q.jets[i].d0 == p.jets[i].d0);
        }
    }
    SUBCASE("group property") {
        Profile q = rescale(rescale(p, 1.7), 1.0 / 1.7);
        for (std::size_t i = 0; i < p.mesh.size(); ++i) {
            CHECK(std::fabs(q.mesh[i] - p.mesh[i]) < 1e-12);
            for (int k = 0; k < 5; ++k) CHECK(std::fabs(q.jets[i][k] - p.jets[i][k]) < 1e-12);
        }
    }
    SUBCASE("rescaled series satisfies the rescaled expansion") {
        // g_a(z) = a^5 g(z/a): the value component must match pointwise
        const double a = 1.5;
        Profile q = rescale(p, a);
        for (std::size_t i = 0; i < p.mesh.size(); ++i) {
            CHECK(q.jets[i].d0 == doctest::Approx(std::pow(a, 5) * p.jets[i].d0).epsilon(1e-13));
            CHECK(q.mesh[i] == doctest::Approx(a * p.mesh[i]).epsilon(1e-13));
        }
    }
    SUBCASE("zero scale rejected") { CHECK_THROWS_AS(rescale(p, 0.0), std::invalid_argument); }
}

TEST_CASE("reflection to rarefaction") {
    Profile p;
    p.kind = NdeKind::N50;
    p.family = Family::Shock;
    p.provenance["test"] = 1;
    auto s = series_origin(NdeKind::N50, -1.0, 0.1, 9);
    for (double z = -2.0; z <= -0.01; z += 0.05) {
        p.mesh.push_back(z);
        p.jets.push_back(s(z));
    }

    SUBCASE("double reflection is the identity") {
        Profile q = reflect_to_rarefaction(reflect_to_rarefaction(p));
        CHECK(q.family == Family::Shock);
        for (std::size_t i = 0; i < p.mesh.size(); ++i) {
            CHECK(q.mesh[i] == p.mesh[i]);
            for (int k = 0; k < 5; ++k) CHECK(q.jets[i][k] == p.jets[i][k]);
        }
    }
    SUBCASE("reflection keeps even jets, negates odd jets") {
        Profile q = reflect_to_rarefaction(p);
        CHECK(q.family == Family::Rarefaction);
        for (std::size_t i = 0; i < p.mesh.size(); ++i) {
            const std::size_t src = p.mesh.size() - 1 - i;
            CHECK(q.mesh[i] == -p.mesh[src]);
            CHECK(q.jets[i].d0 == p.jets[src].d0);
            CHECK(q.jets[i].d1 == -p.jets[src].d1);
        }
    }
    SUBCASE("odd source: reflection equals negation of the odd extension") {
        // f(z) = g(-z) = -g(z) when g is odd
        Profile q = reflect_to_rarefaction(p);
        for (std::size_t i = 0; i < q.mesh.size(); ++i) {
            const Jet5 ext = s(q.mesh[i]); // odd series evaluated at +z
            CHECK(q.jets[i].d0 == doctest::Approx(-ext.d0).epsilon(1e-12));
        }
    }
    SUBCASE("far-field values swap sign") {
        // synthetic shock-like profile approaching +1 at z -> -inf
        Profile sh;
        sh.kind = NdeKind::N50;
        sh.family = Family::Shock;
        sh.provenance["test"] = 1;
        for (double z = -30.0; z <= -0.1; z += 0.1) {
            sh.mesh.push_back(z);
            sh.jets.push_back(Jet5{std::tanh(-z), 0, 0, 0, 0});
        }
        Profile ra = reflect_to_rarefaction(sh);
        CHECK(sh.jets.front().d0 == doctest::Approx(1.0).epsilon(1e-10));  // g(-inf) = +1
        CHECK(ra.jets.back().d0 == doctest::Approx(1.0).epsilon(1e-10));   // f(+inf) = +1
    }
}

TEST_CASE("phase-plane rhs") {
    RhsFn rhs = rhs_phase_plane(1.0, 0.0);
    SUBCASE("direct substitution") {
        double g = 2.0, dg;
        rhs(-1.0, &g, &dg);
        CHECK(dg == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("critical line z = 0") {
        double g = 0.5, dg;
        rhs(0.0, &g, &dg);
        CHECK(dg == 0.0);
    }
    SUBCASE("singular manifold rejected") {
        double g = 1.0, dg;
        CHECK_THROWS_AS(rhs(1.0, &g, &dg), std::domain_error);
        CHECK(phase_plane_singular_event()(1.0, &g) == 0.0);
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(rhs_phase_plane(0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(rhs_phase_plane(1.0, -1.0), std::invalid_argument);
    }
}
