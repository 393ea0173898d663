// Command-line front end: run simulations, lift fronts, solve the pressure
// problem, evaluate stability predicates and normal modes, and recompute
// diagnostics from checkpoints.
//
// Exit codes: 0 ok, 2 config error, 3 hypothesis/flatness loss,
// 4 solver failure, 5 CFL violation.

#include <CLI11.hpp>
#include <json.hpp>

#include "cvs/cvs.hpp"

namespace {

using nlohmann::json;

Eigen::Vector3d vec3(const std::vector<double>& v) {
    if (v.size() != 3) throw cvs::ConfigError("expected a 3-vector");
    return {v[0], v[1], v[2]};
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets) {
    cvs::RunConfig cfg;
    if (!config_path.empty()) cfg = cvs::parse_config(config_path);
    for (const auto& kv : sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw cvs::ConfigError("--set expects key=value, got " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    auto res = cvs::run(cfg);
    std::cout << "completed " << res.samples.size() << " samples, final time " << res.final_state.time
              << "\n";
    return 0;
}

int cmd_lift(const std::string& front_path, const std::string& out_prefix, int n3, double support) {
    cvs::FrontField f = cvs::read_front(front_path);
    cvs::SlabGrid plus(f.grid(), n3, cvs::Side::plus), minus(f.grid(), n3, cvs::Side::minus);
    auto chi = cvs::CutoffProfile::standard_bump(support);
    cvs::LiftedFront lf = cvs::lift(f, plus, minus, chi);
    cvs::write_field(out_prefix + "_plus.ckpt", lf.psi_plus);
    cvs::write_field(out_prefix + "_minus.ckpt", lf.psi_minus);

    json rep;
    rep["trace_interface_plus"] = (lf.psi_plus.trace(cvs::Wall::interface) - f).max_abs();
    rep["trace_interface_minus"] = (lf.psi_minus.trace(cvs::Wall::interface) - f).max_abs();
    rep["trace_top"] = lf.psi_plus.trace(cvs::Wall::top).max_abs();
    rep["trace_bottom"] = lf.psi_minus.trace(cvs::Wall::bottom).max_abs();
    rep["d3_interface"] = lf.d3_interface().max_abs();
    auto dc = cvs::check_diffeomorphism(lf);
    rep["diffeomorphism_ok"] = dc.ok;
    rep["grad_max"] = dc.grad_max;
    if (sobolev_norm_torus(f, 0.5) > 0.0) {
        json ratios = json::array();
        for (int m = 1; m <= 4; ++m) ratios.push_back(cvs::lifting_norm_ratio(f, m, chi));
        rep["norm_ratios_m1_to_m4"] = ratios;
    }
    std::ofstream o(out_prefix + "_report.json");
    o << rep.dump(2) << "\n";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_solve_pressure(const std::string& state_path, const std::string& out_prefix, double support) {
    cvs::PlasmaState s = cvs::read_state(state_path);
    cvs::EvolveContext ctx(s.f.grid(), s.vp.grid().n3());
    ctx.chi = cvs::CutoffProfile::standard_bump(support);
    s.f_t = cvs::front_rate(s);
    cvs::GeometryBundle geom = cvs::build_state_geometry(ctx, s.f, s.f_t);
    cvs::PressureProblem prob;
    prob.geometry = &geom;
    prob.Fp = cvs::assemble_F(geom.plus, s.vp, s.Bp);
    prob.Fm = cvs::assemble_F(geom.minus, s.vm, s.Bm);
    prob.G = cvs::assemble_G(cvs::interface_state(s), s.f_t);
    cvs::PressureSolver solver(geom);
    cvs::PressureSolution sol = solver.solve(prob, ctx.pressure_tol, ctx.pressure_iters);
    if (!sol.converged) throw cvs::SolverError("pressure iteration did not converge");
    cvs::write_field(out_prefix + "_Qp.ckpt", sol.Qp);
    cvs::write_field(out_prefix + "_Qm.ckpt", sol.Qm);
    json rep{{"iterations", sol.iterations},
             {"interior", sol.residuals.interior},
             {"jump", sol.residuals.jump},
             {"continuity", sol.residuals.continuity},
             {"wall", sol.residuals.wall},
             {"mean", sol.residuals.mean},
             {"compatibility", sol.residuals.compatibility}};
    std::ofstream o(out_prefix + "_report.json");
    o << rep.dump(2) << "\n";
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_check_stability(const std::string& params_path, const std::string& state_path,
                        const std::string& sweep_csv, double delta0) {
    cvs::StabilityConfig cfg{delta0, 0.1};
    json out;
    Eigen::Vector3d up, um, Hp, Hm;
    if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) throw cvs::ConfigError("cannot open " + params_path);
        json p = json::parse(in);
        up = vec3(p.value("vp", std::vector<double>{0, 0, 0}));
        um = vec3(p.value("vm", std::vector<double>{0, 0, 0}));
        Hp = vec3(p.at("Bp").get<std::vector<double>>());
        Hm = vec3(p.at("Bm").get<std::vector<double>>());
        auto r = cvs::syrovatskii_predicates(Hp, Hm, up - um);
        out["weak"] = r.weak;
        out["spectral"] = r.spectral;
        out["strong"] = r.strong;
        out["weak_margin"] = r.weak_margin;
        out["spectral_margin"] = r.spectral_margin;
        out["strong_margin"] = r.strong_margin;
    } else if (!state_path.empty()) {
        cvs::PlasmaState s = cvs::read_state(state_path);
        auto is = cvs::interface_state(s);
        auto h = cvs::theorem_hypotheses(is, cfg);
        out["ok"] = h.ok;
        out["worst_point"] = {h.worst_i1, h.worst_i2};
        out["min_cross"] = h.min_cross;
        out["cross_margin"] = h.cross_margin;
        out["strong_margin"] = h.strong_margin;
        up = is.at(is.vp, h.worst_i1, h.worst_i2);
        um = is.at(is.vm, h.worst_i1, h.worst_i2);
        Hp = is.at(is.Bp, h.worst_i1, h.worst_i2);
        Hm = is.at(is.Bm, h.worst_i1, h.worst_i2);
    } else {
        throw cvs::ConfigError("check-stability needs --params or --state");
    }
    if (!sweep_csv.empty()) {
        auto rows = cvs::eta_sweep(up, um, Hp, Hm);
        std::ofstream csv(sweep_csv);
        csv.precision(17);
        csv << "angle,discriminant,growth_rate\n";
        for (const auto& r : rows) csv << r.angle << "," << r.discriminant << "," << r.growth_rate << "\n";
        out["sweep_csv"] = sweep_csv;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_normal_modes(const std::string& params_path, double eta1, double eta2) {
    std::ifstream in(params_path);
    if (!in) throw cvs::ConfigError("cannot open " + params_path);
    json p = json::parse(in);
    Eigen::Vector3d up = vec3(p.value("vp", std::vector<double>{0, 0, 0}));
    Eigen::Vector3d um = vec3(p.value("vm", std::vector<double>{0, 0, 0}));
    Eigen::Vector3d Hp = vec3(p.value("Bp", std::vector<double>{0, 0, 0}));
    Eigen::Vector3d Hm = vec3(p.value("Bm", std::vector<double>{0, 0, 0}));
    auto nm = cvs::planar_normal_modes(up, um, Hp, Hm, {eta1, eta2});
    json out{{"tau", {{nm.tau[0].real(), nm.tau[0].imag()}, {nm.tau[1].real(), nm.tau[1].imag()}}},
             {"growth_rate", nm.growth_rate},
             {"discriminant", nm.discriminant}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& state_path, double support, double delta0) {
    cvs::PlasmaState s = cvs::read_state(state_path);
    cvs::EvolveContext ctx(s.f.grid(), s.vp.grid().n3());
    ctx.chi = cvs::CutoffProfile::standard_bump(support);
    cvs::StabilityConfig scfg{delta0, 0.1};
    cvs::EnergyReport r = cvs::report(ctx, s, scfg);
    std::cout << r.to_json().dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"current-vortex sheet laboratory"};
    app.require_subcommand(1);

    std::string config_path, front_path, state_path, params_path, out_prefix = "out", sweep_csv;
    std::vector<std::string> sets;
    int n3 = 17;
    double support = 2.0, delta0 = 0.5, eta1 = 1.0, eta2 = 0.0;

    auto* c_run = app.add_subcommand("run", "advance a scenario in time");
    c_run->add_option("-c,--config", config_path, "config file (key = value lines)");
    c_run->add_option("--set", sets, "override a config key (key=value, repeatable)");

    auto* c_lift = app.add_subcommand("lift", "lift a front checkpoint into the volume");
    c_lift->add_option("front", front_path, "front checkpoint")->required();
    c_lift->add_option("-o,--out", out_prefix, "output prefix");
    c_lift->add_option("--n3", n3, "levels per half-domain");
    c_lift->add_option("--chi-support", support, "cutoff support radius");

    auto* c_press = app.add_subcommand("solve-pressure", "solve the pressure problem for a state");
    c_press->add_option("state", state_path, "state checkpoint")->required();
    c_press->add_option("-o,--out", out_prefix, "output prefix");
    c_press->add_option("--chi-support", support, "cutoff support radius");

    auto* c_stab = app.add_subcommand("check-stability", "evaluate stability predicates");
    c_stab->add_option("--params", params_path, "planar parameter set (JSON)");
    c_stab->add_option("--state", state_path, "state checkpoint");
    c_stab->add_option("--sweep-csv", sweep_csv, "write the eta sweep table here");
    c_stab->add_option("--delta0", delta0, "stability margin");

    auto* c_nm = app.add_subcommand("normal-modes", "planar normal-mode roots");
    c_nm->add_option("--params", params_path, "planar parameter set (JSON)")->required();
    c_nm->add_option("--eta1", eta1, "wave vector component 1");
    c_nm->add_option("--eta2", eta2, "wave vector component 2");

    auto* c_rep = app.add_subcommand("report", "recompute diagnostics from a state checkpoint");
    c_rep->add_option("state", state_path, "state checkpoint")->required();
    c_rep->add_option("--chi-support", support, "cutoff support radius");
    c_rep->add_option("--delta0", delta0, "stability margin");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(config_path, sets);
        if (c_lift->parsed()) return cmd_lift(front_path, out_prefix, n3, support);
        if (c_press->parsed()) return cmd_solve_pressure(state_path, out_prefix, support);
        if (c_stab->parsed()) return cmd_check_stability(params_path, state_path, sweep_csv, delta0);
        if (c_nm->parsed()) return cmd_normal_modes(params_path, eta1, eta2);
        if (c_rep->parsed()) return cmd_report(state_path, support, delta0);
    } catch (const cvs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cvs::HypothesisError& e) {
        std::cerr << "hypothesis loss: " << e.what() << "\n";
        return 3;
    } catch (const cvs::CflError& e) {
        std::cerr << "CFL violation: " << e.what() << "\n";
        return 5;
    } catch (const cvs::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
