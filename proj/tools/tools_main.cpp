// Command line front end: psi / barrier evaluation, sampling certificates,
// the half-space solver, and the boundary experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kfplab/barriers.hpp"
#include "kfplab/certifier.hpp"
#include "kfplab/experiments.hpp"
#include "kfplab/solver.hpp"
#include "kfplab/special_functions.hpp"

using namespace kfplab;

namespace {

int cmd_psi_eval(double x, double v, double c_star) {
    const double val = psi_exact(x, v);
    const PsiRegion reg = classify_region(x, v, c_star);
    std::printf("psi(%.17g, %.17g) = %.17g\n", x, v, val);
    std::printf("region = %s (c* = %g)\n", to_string(reg), c_star);
    return 0;
}

int cmd_barrier_eval(const std::string& mode_s, double rt, double vd, double v0w,
                     double theta0, bool have_point, double pt, double px, double pv) {
    const BarrierMode mode = barrier_mode_from_string(mode_s);
    const BarrierParams p = select_params(mode, rt, vd, v0w, theta0);
    const AnchorPoint anc = anchor_point(p);
    const ConstraintVerdict cv = check_constraints(p);
    std::printf("mode = %s  r_tilde = %g  v_tilde_d = %g  theta0 = %g\n", to_string(mode),
                p.r_tilde, p.v_tilde_d, p.theta0);
    std::printf("kappa = %.17g  a = %.17g  b = %.17g  c = %.17g  h = %.17g\n", p.kappa, p.a,
                p.b, p.c, p.h);
    std::printf("anchor: xi_d = %.17g  eta_d = %.17g  rho0 = %.17g\n", anc.xi_d, anc.eta_d,
                anc.rho0);
    std::printf("constraints: sqrt(ac)>=8b %d  a>=4c %d  scale %d  vr %d  vrs %d  required %d\n",
                cv.abc_root, cv.abc_ratio, cv.abc_scale, cv.vr, cv.vrs, cv.required_ok);
    if (have_point) {
        const std::vector<double> x{px}, v{pv};
        const double r = rho_t(p, anc, pt, x, v);
        std::printf("rho_t(%g, %g, %g) = %.17g  (rho0 = %.17g)\n", pt, px, pv, r, anc.rho0);
        std::printf("in P_T: %d\n", region_P_membership(p, anc, pt, x, v));
        if (mode == BarrierMode::grazing) {
            const PowerBarrier phi{anc.rho0, 5.0 / (p.theta0 * p.theta0)};
            std::printf("varphi(rho - h t) = %.17g\n", phi.value(r - p.h * pt));
        } else {
            std::printf("Phi_linear(rho_t^2) = %.17g\n",
                        r * r / (anc.rho0 * anc.rho0) - 1.0);
        }
        std::printf("grazing_Psi(t, x, v) = %.17g\n", grazing_Psi(pt, px, pv));
    }
    return 0;
}

int cmd_certify(const std::string& lemma, double rt, double vd, std::size_t n,
                std::uint64_t seed, const std::string& out, bool allow_override) {
    CertifyOptions opts;
    opts.n_samples = n;
    opts.seed = seed;
    opts.allow_gate_override = allow_override;
    try {
        const CertificateReport rep = certify_lemma(lemma, rt, vd, opts);
        const nlohmann::json j = rep.to_json();
        if (!out.empty()) {
            std::ofstream f(out);
            f << j.dump(2) << "\n";
        }
        std::cout << j.dump(2) << "\n";
        return rep.violations == 0 ? 0 : 2;
    } catch (const constraint_gate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

int cmd_solve(const std::string& config, const std::string& out_dir) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config);
    const SolveSetup setup = make_solve_setup(cfg);
    const SolutionField sol = solve_grid(setup.grid, setup.coeff, setup.bdata, setup.store_every);
    std::filesystem::create_directories(out_dir);
    write_field_dump(sol, out_dir + "/field.bin");
    for (double v : {cfg.get_num("trace_v", -0.5)}) {
        const BoundaryProfile prof = boundary_profile(sol, v);
        if (prof.snapped)
            std::cerr << "note: trace velocity snapped to nearest node " << prof.v_used << "\n";
        std::ostringstream name;
        name << out_dir << "/trace_v" << prof.v_used << ".csv";
        write_trace_csv(prof, name.str());
    }
    std::printf("field range [%.6g, %.6g], data range [%.6g, %.6g]\n", sol.field_min,
                sol.field_max, sol.data_min, sol.data_max);
    std::printf("wrote %s/field.bin\n", out_dir.c_str());
    return 0;
}

int cmd_experiment(const std::string& which, const std::string& config, std::uint64_t seed,
                   const std::string& out_dir) {
    KeyValueConfig cfg;
    if (!config.empty()) cfg = KeyValueConfig::parse_file(config);
    ExperimentReport rep;
    if (which == "vanishing") rep = run_vanishing_experiment(cfg, seed);
    else if (which == "gradient") rep = run_gradient_experiment(cfg, seed);
    else if (which == "oscillation") rep = run_oscillation_decay(cfg, seed);
    else if (which == "holder") rep = run_holder_sanity(cfg, seed);
    else {
        std::cerr << "error: unknown experiment " << which << "\n";
        return 1;
    }
    write_report(rep, "both", out_dir);
    std::cout << rep.to_json().dump(2) << "\n";
    std::cout << "verdict: " << rep.verdict << "\n";
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kinetic half-space boundary laboratory"};
    app.require_subcommand(1);

    // psi eval
    auto* psi_cmd = app.add_subcommand("psi", "stationary solution utilities");
    psi_cmd->require_subcommand(1);
    auto* psi_eval = psi_cmd->add_subcommand("eval", "evaluate psi and its region tag");
    double px = -0.5, pv = 0.0, c_star = 0.5;
    psi_eval->add_option("--x", px, "x_d <= 0")->required();
    psi_eval->add_option("--v", pv, "v_d")->required();
    psi_eval->add_option("--cstar", c_star, "region constant in (0,1)");

    // barrier eval
    auto* bar_cmd = app.add_subcommand("barrier", "barrier families");
    bar_cmd->require_subcommand(1);
    auto* bar_eval = bar_cmd->add_subcommand("eval", "parameters, anchor and barrier values");
    std::string bmode = "incoming_gradient";
    double brt = 1e-6, bvd = -0.5, bv0 = 1.0, btheta = -1.0;
    std::vector<double> bpoint;
    bar_eval->add_option("--mode", bmode, "incoming_gradient | exponential | grazing")->required();
    bar_eval->add_option("--rtilde", brt, "base scale r~")->required();
    bar_eval->add_option("--vd", bvd, "incoming velocity (negative)")->required();
    bar_eval->add_option("--v0-weight", bv0, "<v0> weight, >= 1");
    bar_eval->add_option("--theta0", btheta, "smallness constant (default per mode)");
    bar_eval->add_option("--point", bpoint, "evaluate at t x v")->expected(3);

    // certify
    auto* cert = app.add_subcommand("certify", "sampling certificate for a barrier inequality");
    std::string lemma = "phase-prop", cert_out;
    double crt = 1e-6, cvd = -0.5;
    std::size_t cn = 100000;
    std::uint64_t cseed = 1;
    bool cforce = false;
    cert->add_option("--lemma", lemma, "phase-prop | barrier-ss | barrier-g | hypodist")
        ->required();
    cert->add_option("--rtilde", crt, "base scale r~")->required();
    cert->add_option("--vd", cvd, "incoming velocity (negative)")->required();
    cert->add_option("--samples", cn, "sample count");
    cert->add_option("--seed", cseed, "rng seed");
    cert->add_option("--out", cert_out, "report path (json)");
    cert->add_flag("--allow-out-of-window", cforce,
                   "run even when the recipe window or constraint gate rejects");

    // solve
    auto* solve = app.add_subcommand("solve", "half-space grid solver");
    std::string solve_cfg, solve_out = "out";
    solve->add_option("--config", solve_cfg, "key = value config file")->required();
    solve->add_option("--out", solve_out, "output directory")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "scripted boundary experiments");
    std::string which, exp_cfg, exp_out = "out";
    std::uint64_t eseed = 1;
    exp->add_option("name", which, "vanishing | gradient | oscillation | holder")->required();
    exp->add_option("--config", exp_cfg, "key = value config file");
    exp->add_option("--seed", eseed, "rng seed");
    exp->add_option("--out", exp_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (psi_eval->parsed()) return cmd_psi_eval(px, pv, c_star);
        if (bar_eval->parsed())
            return cmd_barrier_eval(bmode, brt, bvd, bv0, btheta, !bpoint.empty(),
                                    bpoint.size() == 3 ? bpoint[0] : 0.0,
                                    bpoint.size() == 3 ? bpoint[1] : 0.0,
                                    bpoint.size() == 3 ? bpoint[2] : 0.0);
        if (cert->parsed()) return cmd_certify(lemma, crt, cvd, cn, cseed, cert_out, cforce);
        if (solve->parsed()) return cmd_solve(solve_cfg, solve_out);
        if (exp->parsed()) return cmd_experiment(which, exp_cfg, eseed, exp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
