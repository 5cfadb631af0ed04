// Command-line front end: every operation is exposed as a reproducible run
// writing CSV/JSON artifacts (and optional SVG plots) into --out.
//
// Exit codes: 0 success, 2 solver failure, 3 bad arguments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nde5/analysis.hpp"
#include "nde5/asymptotics.hpp"
#include "nde5/bvp.hpp"
#include "nde5/compactons.hpp"
#include "nde5/evolution.hpp"
#include "nde5/models.hpp"
#include "nde5/profile_io.hpp"
#include "nde5/shooting.hpp"
#include "nde5/svg.hpp"

using nlohmann::json;
using namespace nde5;

namespace {

double parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    const double num = std::stod(s.substr(0, slash));
    const double den = std::stod(s.substr(slash + 1));
    if (den == 0) throw CLI::ValidationError("rational", "zero denominator in " + s);
    return num / den;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// lo:hi:count
std::vector<double> parse_grid(const std::string& s) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
        throw CLI::ValidationError("grid", "expected lo:hi:count, got " + s);
    const double lo = std::stod(a), hi = std::stod(b);
    const int n = std::stoi(c);
    if (n < 1) throw CLI::ValidationError("grid", "count must be >= 1");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

struct Run {
    std::string command;
    std::string out_dir = "out";
    bool plot = false;
    json params;
    json metrics;
    std::vector<std::string> outputs;

    std::string path(const std::string& name) const { return out_dir + "/" + name; }

    void finish() {
        std::filesystem::create_directories(out_dir);
        json manifest;
        manifest["command"] = command;
        manifest["params"] = params;
        manifest["outputs"] = outputs;
        manifest["metrics"] = metrics;
        std::ofstream os(path("manifest-" + command + ".json"));
        os << manifest.dump(2) << '\n';
    }

    void emit_profile(const Profile& prof, const std::string& name) {
        std::filesystem::create_directories(out_dir);
        write_profile(prof, path(name));
        outputs.push_back(path(name));
        outputs.push_back(path(name) + ".json");
        if (plot) {
            std::vector<double> g;
            for (const Jet5& j : prof.jets) g.push_back(j.d0);
            write_svg_plot(path(name + ".svg"), prof.mesh, g, name);
            outputs.push_back(path(name + ".svg"));
        }
    }

    void emit_json(const json& j, const std::string& name) {
        std::filesystem::create_directories(out_dir);
        std::ofstream os(path(name));
        os << j.dump(2) << '\n';
        outputs.push_back(path(name));
    }
};

Profile normalized_shock_profile(NdeKind kind, double nu, double L, std::size_t N, double tol,
                                 Run& run) {
    ShockShootOptions sopt;
    sopt.nu = nu;
    ShootResult sh = shoot_shock(kind, -1.0, 1.0, 1e-9, sopt);
    run.metrics["shooting_parameter"] = sh.value;
    BvpSolution sol = polish_shock(kind, sh.profile, L, N, tol, nu);
    run.metrics["bvp_residual"] = sol.residual_norm;
    run.metrics["bvp_iterations"] = sol.newton_iterations;
    const double level = sol.profile.provenance.count("farfield_level")
                             ? sol.profile.provenance.at("farfield_level")
                             : 1.0;
    run.metrics["farfield_level_raw"] = level;
    Profile norm = rescale(sol.profile, std::pow(level, -0.2));
    norm.provenance["normalized_to_unit_farfield"] = 1.0;
    return norm;
}

int cmd_shoot_d0(const std::string& kind_s, const std::string& bracket_s, double tol, Run& run) {
    auto bracket = parse_list(bracket_s);
    if (bracket.size() != 2) throw CLI::ValidationError("bracket", "expected lo,hi");
    ShootResult r = shoot_shock(nde_kind_from_string(kind_s), bracket[0], bracket[1], tol);
    std::printf("D0 = %.16g\n", r.value);
    run.metrics["d0"] = r.value;
    json hist = json::array();
    for (const auto& [d, c] : r.history) hist.push_back({{"D", d}, {"class", to_string(c.tag)}});
    run.emit_json(hist, "shoot-d0-history.json");
    return 0;
}

int cmd_profile(const std::string& kind_s, double nu, double L, std::size_t N, double tol, Run& run) {
    const NdeKind kind = nde_kind_from_string(kind_s);
    Profile norm = normalized_shock_profile(kind, nu, L, N, tol, run);
    run.emit_profile(norm, "profile-" + kind_s + ".csv");

    const double deep = norm.mesh.front();
    const double inner = std::max(-0.35 * std::fabs(deep), -20.0);
    TailFit fit = fit_oscillatory_tail(norm, 0.92 * deep, inner, 1.0);
    json jfit = {{"envelope_exponent", fit.envelope_exponent},
                 {"phase_exponent", fit.phase_exponent},
                 {"a0", fit.a0},
                 {"A", fit.A},
                 {"B", fit.B},
                 {"residual", fit.residual}};
    run.emit_json(jfit, "tailfit-" + kind_s + ".json");
    run.metrics["tail_envelope_exponent"] = fit.envelope_exponent;
    run.metrics["tail_phase_exponent"] = fit.phase_exponent;
    run.metrics["tail_a0"] = fit.a0;
    std::printf("profile %s: points=%zu  tail p=%.16g q=%.16g a0=%.16g\n", kind_s.c_str(),
                norm.size(), fit.envelope_exponent, fit.phase_exponent, fit.a0);
    return 0;
}

int cmd_blowup(const std::string& alpha_s, double f0, double f1, const std::string& bracket_s,
               double tol, Run& run) {
    SimilarityParams p(parse_rational(alpha_s));
    auto bracket = parse_list(bracket_s);
    if (bracket.size() != 2) throw CLI::ValidationError("bracket", "expected lo,hi");
    // the solvable orientation has f'(0) < 0; a positive request is mapped
    // onto it and both conventions are recorded
    const double f1_eff = -std::fabs(f1);
    BlowupShootOptions opt;
    opt.f0 = f0;
    ShootResult r = shoot_blowup(p, f1_eff, bracket[0], bracket[1], tol, opt);
    std::printf("f3 = %.16g\n", r.value);
    run.metrics["f3"] = r.value;
    run.metrics["f1_requested"] = f1;
    run.metrics["f1_effective"] = f1_eff;
    run.metrics["alpha"] = p.alpha;
    run.metrics["beta"] = p.beta;
    run.emit_profile(r.profile, "blowup-profile.csv");
    return 0;
}

int cmd_global_sweep(const std::string& alpha_s, double c0, const std::string& f0_grid_s, double f1,
                     double L, std::size_t N, Run& run) {
    SimilarityParams p(parse_rational(alpha_s), c0);
    auto f0s = parse_grid(f0_grid_s);
    std::vector<std::map<std::string, double>> grid;
    for (double f0 : f0s) grid.push_back({{"F0", f0}, {"F1", f1}});

    const double q = p.tail_exponent();
    auto solver = [&](const std::map<std::string, double>& t) {
        BvpSpec spec;
        spec.rhs = rhs_global(p, 1e-4);
        spec.L = L;
        spec.closure = LeftClosure::AlgebraicTail;
        spec.closure_value = c0;
        spec.tail_exponent = q;
        spec.origin_conditions = {{0, t.at("F0")}, {1, t.at("F1")}};
        spec.N = N;
        spec.tol = 1e-6;
        const double F0 = t.at("F0");
        BvpSolution sol = solve_bvp(spec, [c0, q, F0](double y) {
            // blends the origin value F0 into the algebraic tail c0 |y|^q
            const double X = std::pow(std::fabs(F0) / c0, 2.0 / std::max(q, 0.05));
            return c0 * std::pow(y * y + X, 0.5 * q);
        });
        sol.profile.family = Family::Global;
        sol.profile.params = p;
        std::vector<double> ys, fs;
        for (std::size_t i = 0; i < sol.profile.mesh.size(); ++i) {
            const double y = sol.profile.mesh[i];
            if (y <= -0.2 * L && y >= -0.95 * L) {
                ys.push_back(-y);
                fs.push_back(std::fabs(sol.profile.jets[i].d0));
            }
        }
        std::map<std::string, double> metrics{{"residual", sol.residual_norm},
                                              {"tail_exponent", loglog_slope(ys, fs)},
                                              {"F_origin", sol.profile.jets.back().d0}};
        return std::make_pair(sol.profile, metrics);
    };

    auto entries = sweep_family(grid, solver);
    json report = json::array();
    int ok = 0;
    for (const auto& e : entries) {
        json row;
        row["F0"] = e.params.at("F0");
        row["F1"] = e.params.at("F1");
        row["status"] = e.ok ? "converged" : "failed";
        if (e.ok) {
            ++ok;
            row["residual"] = e.metrics.at("residual");
            row["tail_exponent"] = e.metrics.at("tail_exponent");
            char name[64];
            std::snprintf(name, sizeof(name), "global-F0-%g.csv", e.params.at("F0"));
            run.emit_profile(e.profile, name);
        } else {
            row["error"] = e.error;
        }
        report.push_back(row);
    }
    run.emit_json(report, "global-sweep.json");
    run.metrics["converged_fraction"] =
        static_cast<double>(ok) / static_cast<double>(entries.size());
    std::printf("global-sweep: %d/%zu converged\n", ok, entries.size());
    return ok > 0 ? 0 : 2;
}

int cmd_roots(const std::string& context_s, const std::string& alpha_s, Run& run) {
    SimilarityParams p(parse_rational(alpha_s));
    BundleReport rep = char_exponents(bundle_context_from_string(context_s), p);
    run.emit_json(rep.to_json(), "roots-" + context_s + ".json");
    for (const cplx& r : rep.roots) std::printf("root: %.16g %+.16gi\n", r.real(), r.imag());
    std::printf("admissible = %zu, bundle_dimension = %d\n", rep.admissible.size(),
                rep.bundle_dimension);
    run.metrics["bundle_dimension"] = rep.bundle_dimension;
    run.metrics["admissible_count"] = static_cast<double>(rep.admissible.size());
    for (const auto& [k, v] : rep.metrics) run.metrics[k] = v;
    return 0;
}

void write_compacton_csv(const CompactonProfile& c, const std::string& path) {
    std::ofstream os(path);
    os << "y,F,f\n";
    if (!c.y.empty()) {
        for (std::size_t i = 0; i < c.y.size(); ++i)
            os << format_g16(c.y[i]) << ',' << format_g16(c.F[i]) << ',' << format_g16(c.f[i])
               << '\n';
    } else {
        for (int i = 0; i <= 2000; ++i) {
            const double y = c.y0 * i / 2000.0;
            const Jet5 j = c.f_jet(y);
            os << format_g16(y) << ',' << format_g16(j.d0 * j.d0) << ',' << format_g16(j.d0)
               << '\n';
        }
    }
}

int cmd_compacton(const std::string& which, int branch, double L_guess, Run& run) {
    CompactonProfile c;
    if (which == "k22") c = explicit_compacton(ExplicitCompacton::K22);
    else if (which == "quintic") c = explicit_compacton(ExplicitCompacton::Quintic);
    else if (which == "oscillatory") c = oscillatory_compacton(branch, L_guess);
    else throw CLI::ValidationError("which", "k22 | quintic | oscillatory");

    const std::string name = "compacton-" + which + ".csv";
    std::filesystem::create_directories(run.out_dir);
    write_compacton_csv(c, run.path(name));
    run.outputs.push_back(run.path(name));
    json meta = {{"which", c.which},
                 {"y0", c.y0},
                 {"branch", c.branch},
                 {"nu", c.nu},
                 {"interface_exponent", c.interface_exponent}};
    if (which == "oscillatory") {
        meta["s0"] = c.s0;
        meta["phi_period"] = c.phi_period;
        PhiComponent pc = phi_component(c);
        meta["phi_measured_period"] = pc.period;
        meta["phi_periodicity_defect"] = pc.periodicity_defect;
        run.metrics["phi_period"] = pc.period;
    }
    run.emit_json(meta, "compacton-" + which + ".json");
    run.metrics["y0"] = c.y0;
    std::printf("compacton %s: y0 = %.16g\n", which.c_str(), c.y0);
    if (run.plot && !c.y.empty()) {
        write_svg_plot(run.path("compacton-" + which + ".svg"), c.y, c.F, name);
        run.outputs.push_back(run.path("compacton-" + which + ".svg"));
    }
    return 0;
}

int cmd_rh(const std::string& minus_s, const std::string& plus_s, Run& run) {
    auto mv = parse_list(minus_s), pv = parse_list(plus_s);
    if (mv.size() != 5 || pv.size() != 5)
        throw CLI::ValidationError("jets", "expected five comma-separated values");
    JumpJets j;
    for (int k = 0; k < 5; ++k) {
        j.minus[k] = mv[static_cast<std::size_t>(k)];
        j.plus[k] = pv[static_cast<std::size_t>(k)];
    }
    auto [lambda, resid] = rh_speed(j);
    if (lambda == 0.0) lambda = 0.0; // normalize the sign of zero for display
    std::printf("lambda = %.16g\n", lambda);
    std::printf("kk1a_residual = %.16g\n", resid);
    run.metrics["lambda"] = lambda;
    run.metrics["kk1a_residual"] = resid;
    return 0;
}

ExtendedProfile load_extended_profile(const std::string& file, double equilibrium) {
    Profile prof = read_profile_csv(file);
    const double deep = std::min(prof.mesh.front(), prof.mesh.back());
    TailFit fit =
        fit_oscillatory_tail(prof, 0.92 * deep, std::max(-20.0, 0.35 * deep), equilibrium);
    return ExtendedProfile(prof, fit, equilibrium);
}

int cmd_rate(const std::string& what, const std::string& file, double l, Run& run) {
    ExtendedProfile g = load_extended_profile(file, 1.0);
    RateReport rep;
    if (what == "l1") {
        std::vector<double> ts;
        for (double t = -1e-8; t < -0.99e-18; t *= 0.316227766016838) ts.push_back(t);
        rep = l1_rate(g, l, ts);
    } else if (what == "tv") {
        rep = tv_growth(g, {30, 100, 300, 1000, 3000}, false);
    } else {
        throw CLI::ValidationError("what", "l1 | tv");
    }
    json j = {{"quantity", rep.quantity},
              {"exponent", rep.exponent},
              {"abscissae", rep.abscissae},
              {"values", rep.values}};
    run.emit_json(j, "rate-" + what + ".json");
    run.metrics["exponent"] = rep.exponent;
    std::printf("%s exponent = %.16g\n", rep.quantity.c_str(), rep.exponent);
    return 0;
}

int cmd_entropy(const std::string& shock, const std::string& file, const std::string& deltas_s,
                double x_half, double t_max, Run& run) {
    ExtendedProfile g = load_extended_profile(file, 1.0);
    auto deltas = parse_list(deltas_s);
    const ShockType type = (shock == "s-minus") ? ShockType::SMinusBlowup : ShockType::SPlusRiemann;
    DeltaEntropyVerdict v = delta_entropy_test(type, g, deltas, x_half, t_max);
    std::printf("verdict = %s\n", v.entropy ? "Entropy" : "NonEntropy");
    std::printf("theta = %.16g\n", v.theta);
    std::filesystem::create_directories(run.out_dir);
    std::ofstream os(run.path("entropy-" + shock + ".csv"));
    os << "delta,distance\n";
    for (std::size_t i = 0; i < v.deltas.size(); ++i)
        os << format_g16(v.deltas[i]) << ',' << format_g16(v.distances[i]) << '\n';
    run.outputs.push_back(run.path("entropy-" + shock + ".csv"));
    run.metrics["entropy"] = v.entropy;
    run.metrics["theta"] = v.theta;
    return 0;
}

int cmd_time5(double A, double B, Run& run) {
    Profile prof = shoot_time5(A, B);
    run.emit_profile(prof, "time5-profile.csv");
    std::vector<double> zs, dv;
    for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
        const double z = prof.mesh[i];
        if (z <= -10 && z >= -45) {
            zs.push_back(-z);
            dv.push_back(std::fabs(prof.jets[i].d0 - 1.0));
        }
    }
    const double slope = loglog_slope(zs, dv);
    run.metrics["tail_exponent"] = slope;
    run.metrics["A_eff"] = prof.provenance.at("A_eff");
    std::printf("time5: g'(0) = %.16g, tail exponent = %.16g\n",
                -std::sqrt(prof.provenance.at("A_eff")), slope);
    return 0;
}

int cmd_evolve(const std::string& kind_s, const std::string& data, double delta, double t_end,
               std::size_t N, double L, double cfl, std::size_t snapshots, Run& run) {
    const NdeKind kind = nde_kind_from_string(kind_s);
    EvolutionField tmpl;
    tmpl.L = L;
    tmpl.N = N;
    tmpl.u.assign(N, 0.0);
    const StepData step = (data == "s-minus") ? StepData::SMinus : StepData::SPlus;
    MollifyResult mol = mollify(step, delta, tmpl);
    run.metrics["mollify_width"] = mol.width;
    run.metrics["mollify_l1"] = mol.l1_distance;

    EvolveOptions opt;
    opt.cfl = cfl;
    opt.snapshots = snapshots;
    EvolveResult res = evolve(mol.field, kind, t_end, opt);

    std::filesystem::create_directories(run.out_dir);
    json snapshot_meta = json::array();
    int idx = 0;
    auto dump_snapshot = [&](const EvolutionField& f, const std::string& name) {
        std::ofstream os(run.path(name));
        os << "x,u\n";
        for (std::size_t j = 0; j < f.N; ++j)
            os << format_g16(f.x(j)) << ',' << format_g16(f.u[j]) << '\n';
        run.outputs.push_back(run.path(name));
        ShockIndicator ind = shock_indicator(f);
        snapshot_meta.push_back({{"file", name},
                                 {"t", f.t},
                                 {"max_gradient", ind.max_gradient},
                                 {"l1_to_splus", ind.l1_to_splus},
                                 {"l1_to_sminus", ind.l1_to_sminus},
                                 {"spectral_tail_fraction", ind.spectral_tail_fraction}});
    };
    dump_snapshot(mol.field, "evolve-t0.csv");
    for (const EvolutionField& f : res.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "evolve-%03d.csv", ++idx);
        dump_snapshot(f, name);
    }
    run.metrics["dt"] = res.dt;
    run.metrics["steps"] = static_cast<double>(res.steps);
    run.metrics["mass_drift"] = res.mass_drift;
    run.metrics["max_imag_residue"] = res.max_imag_residue;
    run.metrics["snapshot_indicators"] = snapshot_meta;
    std::printf("evolve: %zu steps, dt = %.16g\n", res.steps, res.dt);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-similar shocks, rarefactions, and compactons of fifth-order "
                 "nonlinear dispersion equations"};
    app.require_subcommand(1);

    Run run;
    std::string kind = "n50", bracket = "-1,1", alpha = "1/9", context = "equilibrium";
    std::string which = "k22", minus_s, plus_s, what = "l1", file, shock = "s-minus";
    std::string data = "s-plus", deltas = "1e-1,1e-2,1e-3,1e-4", f0_grid = "1:9:9";
    double nu = 1e-4, L = 100.0, tol = 1e-6, f0 = 0.0, f1 = 1.0, c0 = 1.0, gf1 = 0.0;
    double A = 1.0, B = 0.0, l_window = 1.0, x_half = 1.0, t_max = 0.5;
    double delta = 2.0, t_end = 0.1, cfl = 1.0, L_guess = 0.0;
    std::size_t N = 3000, Nsweep = 1200, Nevo = 256;
    double Levo = 50.0;
    std::size_t snapshots = 4;
    int branch = 1;

    app.add_option("--out", run.out_dir, "output directory");
    app.add_flag("--plot", run.plot, "write SVG plots");

    auto* sp =
        app.add_subcommand("profile", "shock similarity profile: shooting plus collocation polish");
    sp->add_option("--kind", kind);
    sp->add_option("--nu", nu);
    sp->add_option("--L", L);
    sp->add_option("--N", N);
    sp->add_option("--tol", tol);

    auto* sd = app.add_subcommand("shoot-d0", "critical origin-family parameter by bisection");
    sd->add_option("--kind", kind);
    sd->add_option("--bracket", bracket);
    sd->add_option("--tol", tol);

    auto* sb = app.add_subcommand("blowup", "gradient blow-up profile by f'''(0) shooting");
    sb->add_option("--alpha", alpha);
    sb->add_option("--f0", f0);
    sb->add_option("--f1", f1);
    sb->add_option("--bracket", bracket);
    sb->add_option("--tol", tol);

    auto* gs = app.add_subcommand("global-sweep", "post-blow-up extension family over origin data");
    gs->add_option("--alpha", alpha);
    gs->add_option("--c0", c0);
    gs->add_option("--f0-grid", f0_grid);
    gs->add_option("--f1", gf1);
    gs->add_option("--L", L);
    gs->add_option("--N", Nsweep);

    auto* rt = app.add_subcommand("roots", "characteristic roots and bundle dimensions");
    rt->add_option("--context", context);
    rt->add_option("--alpha", alpha);

    auto* cp = app.add_subcommand("compacton", "explicit and oscillatory compactons");
    cp->add_option("--which", which);
    cp->add_option("--branch", branch);
    cp->add_option("--L-guess", L_guess);

    auto* rh = app.add_subcommand("rh", "Rankine-Hugoniot speed from one-sided jets");
    rh->add_option("--minus", minus_s)->required();
    rh->add_option("--plus", plus_s)->required();

    auto* ra = app.add_subcommand("rate", "L1 convergence rate or total-variation growth");
    ra->add_option("--what", what);
    ra->add_option("--profile", file)->required();
    ra->add_option("--l", l_window);

    auto* en = app.add_subcommand("entropy-test", "delta-deformation verdict for a shock type");
    en->add_option("--shock", shock);
    en->add_option("--profile", file)->required();
    en->add_option("--deltas", deltas);
    en->add_option("--x-half", x_half);
    en->add_option("--t-max", t_max);

    auto* t5 = app.add_subcommand("time5", "fifth-order-in-time phase-plane profile");
    t5->add_option("--A", A);
    t5->add_option("--B", B);

    auto* ev = app.add_subcommand("evolve", "periodic pseudospectral evolution of mollified steps");
    ev->add_option("--kind", kind);
    ev->add_option("--data", data);
    ev->add_option("--delta", delta);
    ev->add_option("--t-end", t_end);
    ev->add_option("--N", Nevo);
    ev->add_option("--L", Levo);
    ev->add_option("--cfl", cfl);
    ev->add_option("--snapshots", snapshots);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << e.what() << "\n";
        return 3;
    }

    try {
        int rc = 0;
        if (sp->parsed()) {
            run.command = "profile";
            run.params = {{"kind", kind}, {"nu", nu}, {"L", L}, {"N", N}, {"tol", tol}};
            rc = cmd_profile(kind, nu, L, N, tol, run);
        } else if (sd->parsed()) {
            run.command = "shoot-d0";
            run.params = {{"kind", kind}, {"bracket", bracket}, {"tol", tol}};
            rc = cmd_shoot_d0(kind, bracket, tol, run);
        } else if (sb->parsed()) {
            run.command = "blowup";
            run.params = {
                {"alpha", alpha}, {"f0", f0}, {"f1", f1}, {"bracket", bracket}, {"tol", tol}};
            rc = cmd_blowup(alpha, f0, f1, bracket, tol, run);
        } else if (gs->parsed()) {
            run.command = "global-sweep";
            run.params = {{"alpha", alpha}, {"c0", c0}, {"f0_grid", f0_grid},
                          {"f1", gf1},      {"L", L},   {"N", Nsweep}};
            rc = cmd_global_sweep(alpha, c0, f0_grid, gf1, L, Nsweep, run);
        } else if (rt->parsed()) {
            run.command = "roots";
            run.params = {{"context", context}, {"alpha", alpha}};
            rc = cmd_roots(context, alpha, run);
        } else if (cp->parsed()) {
            run.command = "compacton";
            run.params = {{"which", which}, {"branch", branch}, {"L_guess", L_guess}};
            rc = cmd_compacton(which, branch, L_guess, run);
        } else if (rh->parsed()) {
            run.command = "rh";
            run.params = {{"minus", minus_s}, {"plus", plus_s}};
            rc = cmd_rh(minus_s, plus_s, run);
        } else if (ra->parsed()) {
            run.command = "rate";
            run.params = {{"what", what}, {"profile", file}, {"l", l_window}};
            rc = cmd_rate(what, file, l_window, run);
        } else if (en->parsed()) {
            run.command = "entropy-test";
            run.params = {{"shock", shock},
                          {"profile", file},
                          {"deltas", deltas},
                          {"x_half", x_half},
                          {"t_max", t_max}};
            rc = cmd_entropy(shock, file, deltas, x_half, t_max, run);
        } else if (t5->parsed()) {
            run.command = "time5";
            run.params = {{"A", A}, {"B", B}};
            rc = cmd_time5(A, B, run);
        } else if (ev->parsed()) {
            run.command = "evolve";
            run.params = {{"kind", kind}, {"data", data}, {"delta", delta}, {"t_end", t_end},
                          {"N", Nevo},    {"L", Levo},    {"cfl", cfl},     {"snapshots", snapshots}};
            rc = cmd_evolve(kind, data, delta, t_end, Nevo, Levo, cfl, snapshots, run);
        }
        run.finish();
        return rc;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    }
}
