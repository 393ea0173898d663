// Acceptance suite: ten numbered criteria at the reference resolution
// 32 x 32 x 17 per half-domain. Each criterion prints one PASS/FAIL line.

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <random>

#include "cvs/cvs.hpp"

using namespace cvs;
namespace fs = std::filesystem;

namespace {

constexpr int N1 = 32, N2 = 32, N3 = 17;

void verdict(int criterion, bool ok, const std::string& details) {
    std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << " (" << details << ")"
              << std::endl;
    REQUIRE(ok);
}

FrontField random_front(const TorusGrid& g, double amp, unsigned seed, int kmax = 5) {
    // with ~121 active modes up to |k| = 5, gradients reach ~500 x amp;
    // keep amp small enough that the lift stays a diffeomorphism

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FrontField f(g);
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            if (std::abs(g.wave1(i1)) > kmax || std::abs(g.wave2(i2)) > kmax) continue;
            f.at(i1, i2) = amp * cplx{dist(rng), dist(rng)};
        }
    f.symmetrize();
    return f;
}

VolumeField random_smooth_vector(const SlabGrid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double a = dist(rng), b = dist(rng), c = dist(rng), d = dist(rng);
    return VolumeField::sample_vector(
        g,
        [=](double x1, double, double x3) { return a * std::sin(kTwoPi * x1) * std::cos(2.0 * x3); },
        [=](double, double x2, double x3) { return b * std::cos(kTwoPi * 2 * x2) + c * x3 * x3; },
        [=](double x1, double x2, double x3) {
            return d * std::sin(kTwoPi * (x1 + x2)) * x3 * (1.0 - x3 * x3);
        });
}

} // namespace

TEST_CASE("criterion 1: lifting identities", "[c1]") {
    TorusGrid t(N1, N2);
    SlabGrid plus(t, N3, Side::plus), minus(t, N3, Side::minus);
    auto chi = CutoffProfile::standard_bump();
    double trace_err = 0.0, wall_err = 0.0, d3_err = 0.0;
    std::array<double, 4> ratio{0, 0, 0, 0};
    for (unsigned s = 0; s < 100; ++s) {
        FrontField f = random_front(t, 0.0005, 1000 + s);
        auto lf = lift(f, plus, minus, chi);
        trace_err = std::max({trace_err, (lf.psi_plus.trace(Wall::interface) - f).max_abs(),
                              (lf.psi_minus.trace(Wall::interface) - f).max_abs()});
        wall_err = std::max({wall_err, lf.psi_plus.trace(Wall::top).max_abs(),
                             lf.psi_minus.trace(Wall::bottom).max_abs()});
        d3_err = std::max(d3_err, lf.d3_interface().max_abs());
        for (int m = 1; m <= 4; ++m)
            ratio[m - 1] = std::max(ratio[m - 1], lifting_norm_ratio(f, m, chi));
    }
    std::ostringstream d;
    d << "trace " << trace_err << ", wall " << wall_err << ", d3 " << d3_err
      << ", ratio constants m=1..4: " << ratio[0] << " " << ratio[1] << " " << ratio[2] << " "
      << ratio[3];
    verdict(1,
            trace_err <= 1e-10 && wall_err <= 1e-10 && d3_err <= 1e-8 &&
                *std::max_element(ratio.begin(), ratio.end()) < 1e6,
            d.str());
}

TEST_CASE("criterion 2: piola identity", "[c2]") {
    TorusGrid t(N1, N2);
    SlabGrid plus(t, N3, Side::plus), minus(t, N3, Side::minus);
    auto chi = CutoffProfile::standard_bump();
    double worst = 0.0;
    for (unsigned s = 0; s < 20; ++s) {
        auto lf = lift(random_front(t, 0.0005, 2000 + s), plus, minus, chi);
        GeometryBundle g = build_geometry(lf);
        worst = std::max({worst, piola_residual(g.plus), piola_residual(g.minus)});
    }
    verdict(2, worst <= 1e-8, "max |d_k a_ki| = " + std::to_string(worst));
}

TEST_CASE("criterion 3: transformed divergence identity", "[c3]") {
    TorusGrid t(N1, N2);
    SlabGrid plus(t, N3, Side::plus), minus(t, N3, Side::minus);
    auto chi = CutoffProfile::standard_bump();
    double worst = 0.0;
    for (unsigned s = 0; s < 10; ++s) {
        GeometryBundle g = build_geometry(lift(random_front(t, 0.0005, 3000 + s), plus, minus, chi));
        for (const SideGeometry* side : {&g.plus, &g.minus}) {
            VolumeField u = random_smooth_vector(side->grid, 31 + s);
            worst = std::max(worst, (div_transformed(*side, u) - div_residual_form(*side, u)).max_abs());
        }
    }
    verdict(3, worst <= 1e-10, "max identity defect = " + std::to_string(worst));
}

TEST_CASE("criterion 4: pressure solver", "[c4]") {
    std::ostringstream d;
    bool ok = true;

    // 4a: manufactured flat solution at n3 = 16
    {
        TorusGrid t(N1, N2);
        SlabGrid plus(t, 16, Side::plus), minus(t, 16, Side::minus);
        GeometryBundle g =
            build_geometry(lift(FrontField(t), plus, minus, CutoffProfile::standard_bump()));
        auto Qf = [](double x1, double, double x3) { return std::cos(kTwoPi * x1) * std::cos(M_PI * x3); };
        const double lam = 5.0 * M_PI * M_PI;
        PressureProblem p;
        p.geometry = &g;
        p.Fp = VolumeField::sample_scalar(g.plus.grid,
                                          [&](double a, double b, double c) { return lam * Qf(a, b, c); });
        p.Fm = VolumeField::sample_scalar(g.minus.grid,
                                          [&](double a, double b, double c) { return lam * Qf(a, b, c); });
        p.G = FrontField(t);
        auto sol = PressureSolver(g).solve(p, 1e-11);
        const double err = std::max((sol.Qp - VolumeField::sample_scalar(g.plus.grid, Qf)).max_abs(),
                                    (sol.Qm - VolumeField::sample_scalar(g.minus.grid, Qf)).max_abs());
        ok = ok && sol.converged && err <= 1e-8;
        d << "flat err " << err;
    }

    // 4b: curved-geometry round trip at front amplitude 0.1
    {
        TorusGrid t(N1, N2);
        SlabGrid plus(t, N3, Side::plus), minus(t, N3, Side::minus);
        FrontField f = FrontField::sample(
            t, [](double x1, double) { return 0.05 + 0.05 * std::cos(kTwoPi * x1); });
        GeometryBundle g = build_geometry(lift(f, plus, minus, CutoffProfile::standard_bump()));
        auto Qf = [](double x1, double, double x3) { return std::cos(kTwoPi * x1) * std::cos(M_PI * x3); };
        VolumeField Qp = VolumeField::sample_scalar(g.plus.grid, Qf);
        VolumeField Qm = VolumeField::sample_scalar(g.minus.grid, Qf);
        PressureSolver solver(g);
        PressureProblem p;
        p.geometry = &g;
        p.Fp = solver.apply_operator(g.plus, Qp);
        p.Fm = solver.apply_operator(g.minus, Qm);
        auto conormal = [&](const SideGeometry& s, const VolumeField& q) {
            VolumeField gq = grad_transformed(s, q);
            VolumeField wn = multiply(s.d1psi, gq.component(0));
            wn += multiply(s.d2psi, gq.component(1));
            wn *= -1.0;
            wn += gq.component(2);
            return wn.trace(Wall::interface);
        };
        p.G = conormal(g.plus, Qp) - conormal(g.minus, Qm);
        auto sol = solver.solve(p, 1e-10, 400, 1e-6);
        const double err = std::max((sol.Qp - Qp).max_abs(), (sol.Qm - Qm).max_abs());
        ok = ok && sol.converged && err <= 1e-6;
        d << ", curved err " << err << " in " << sol.iterations << " iters";
    }

    // 4c: compatibility of sources assembled from consistent states
    {
        RunConfig cfg;
        cfg.n1 = N1;
        cfg.n2 = N2;
        cfg.n3 = N3;
        cfg.scenario = "vortex-sheet-stable";
        cfg.eps = 1e-5;
        EvolveContext ctx = make_context(cfg);
        PlasmaState s = scenario(ctx, cfg);
        s.f_t = front_rate(s);
        GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
        PressureProblem p;
        p.geometry = &geom;
        p.Fp = assemble_F(geom.plus, s.vp, s.Bp);
        p.Fm = assemble_F(geom.minus, s.vm, s.Bm);
        p.G = assemble_G(interface_state(s), s.f_t);
        const double scale = std::max({1.0, multiply(geom.plus.J, p.Fp).l2_norm(),
                                       multiply(geom.minus.J, p.Fm).l2_norm()});
        const double compat = std::abs(check_compatibility(p)) / scale;
        ok = ok && compat <= 1e-8;
        d << ", compat " << compat;
    }
    verdict(4, ok, d.str());
}

TEST_CASE("criterion 5: stability cross-validation", "[c5]") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int checked = 0, agreed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::Vector3d up(dist(rng), dist(rng), 0), um(dist(rng), dist(rng), 0);
        Eigen::Vector3d Hp(dist(rng), dist(rng), 0), Hm(dist(rng), dist(rng), 0);
        auto pred = syrovatskii_predicates(Hp, Hm, up - um);
        auto rows = eta_sweep(up, um, Hp, Hm, 256);
        double min_disc = 1e30;
        for (const auto& r : rows) min_disc = std::min(min_disc, r.discriminant);
        if (std::abs(min_disc) < 1e-9 || std::abs(pred.spectral_margin) < 1e-9) continue;
        ++checked;
        if (pred.spectral == (min_disc > 0.0)) ++agreed;
    }
    // worked boundary example: equality in the spectral condition,
    // violation of the strong one
    auto bnd = syrovatskii_predicates({1, 0, 0}, {0, 1, 0}, {1, 1, 0});
    const bool boundary_ok = std::abs(bnd.spectral_margin) < 1e-12 && !bnd.strong;
    std::ostringstream d;
    d << agreed << "/" << checked << " draws agree, boundary example "
      << (boundary_ok ? "confirmed" : "WRONG");
    verdict(5, checked > 800 && agreed == checked && boundary_ok, d.str());
}

TEST_CASE("criterion 6: lambda construction", "[c6]") {
    TorusGrid t(N1, N2);
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> dist(-0.6, 0.6);
    const double delta0 = 0.4;
    StabilityConfig cfg{delta0, 0.1};
    int admissible = 0;
    double jump_err = 0.0, lam_max = 0.0;
    for (int trial = 0; trial < 400 && admissible < 50; ++trial) {
        InterfaceState s;
        s.grid = t;
        s.f = FrontField(t);
        const Eigen::Vector3d vp(dist(rng), dist(rng), 0), vm(dist(rng), dist(rng), 0);
        const Eigen::Vector3d Bp(1.0 + 0.5 * dist(rng), dist(rng), 0),
            Bm(dist(rng), 1.0 + 0.5 * dist(rng), 0);
        for (int c = 0; c < 3; ++c) {
            s.vp[c].assign(t.size(), vp(c));
            s.vm[c].assign(t.size(), vm(c));
            s.Bp[c].assign(t.size(), Bp(c));
            s.Bm[c].assign(t.size(), Bm(c));
        }
        if (!theorem_hypotheses(s, cfg).ok) continue;
        ++admissible;
        auto [lp, lm] = solve_lambda(s, cfg);
        lam_max = std::max({lam_max, lp.max_abs(), lm.max_abs()});
        for (int c = 0; c < 2; ++c) {
            const double jump =
                (vp(c) - lp.mean() * Bp(c)) - (vm(c) - lm.mean() * Bm(c));
            jump_err = std::max(jump_err, std::abs(jump));
        }
    }
    std::ostringstream d;
    d << admissible << " admissible draws, max jump " << jump_err << ", max |lambda| " << lam_max
      << " vs bound " << 1.0 - delta0 / 2.0;
    verdict(6, admissible >= 50 && jump_err <= 1e-10 && lam_max <= 1.0 - delta0 / 2.0 + 1e-12, d.str());
}

TEST_CASE("criterion 7: evolution", "[c7]") {
    std::ostringstream d;
    bool ok = true;

    // steady tangential state over 100 RK4 steps
    {
        TorusGrid t(N1, N2);
        EvolveContext ctx(t, N3);
        PlasmaState s = PlasmaState::zero(ctx.plus, ctx.minus);
        std::fill(s.vp.data(0).begin(), s.vp.data(0).end(), 0.1);
        std::fill(s.vm.data(0).begin(), s.vm.data(0).end(), -0.1);
        std::fill(s.Bp.data(0).begin(), s.Bp.data(0).end(), 1.0);
        std::fill(s.Bm.data(1).begin(), s.Bm.data(1).end(), 1.0);
        PlasmaState s0 = s;
        double div_worst = 0.0;
        for (int n = 0; n < 100; ++n) {
            step(ctx, s, 1e-3);
            if (n % 10 == 0) {
                GeometryBundle g = build_state_geometry(ctx, s.f, s.f_t);
                div_worst = std::max({div_worst, div_transformed(g.plus, s.vp).l2_norm(),
                                      div_transformed(g.minus, s.Bm).l2_norm()});
            }
        }
        double drift = std::max({(s.vp - s0.vp).max_abs(), (s.vm - s0.vm).max_abs(),
                                 (s.Bp - s0.Bp).max_abs(), (s.Bm - s0.Bm).max_abs(),
                                 (s.f - s0.f).max_abs()});
        ok = ok && drift <= 1e-10 && div_worst <= 1e-8;
        d << "steady drift " << drift << ", div " << div_worst;
    }

    // temporal self-convergence: 4th order within +-0.3
    {
        RunConfig cfg;
        cfg.n1 = N1;
        cfg.n2 = N2;
        cfg.n3 = N3;
        cfg.scenario = "vortex-sheet-stable";
        cfg.eps = 1e-3;
        EvolveContext ctx = make_context(cfg);
        auto advance = [&](double dt, int steps) {
            PlasmaState s = scenario(ctx, cfg);
            project_divergence(ctx, s);
            for (int n = 0; n < steps; ++n) step(ctx, s, dt);
            return s;
        };
        const double dt = 4e-3;
        PlasmaState a = advance(dt, 4), b = advance(dt / 2, 8), c = advance(dt / 4, 16);
        auto dist = [](const PlasmaState& x, const PlasmaState& y) {
            return std::max({(x.vp - y.vp).max_abs(), (x.vm - y.vm).max_abs(),
                             (x.Bp - y.Bp).max_abs(), (x.Bm - y.Bm).max_abs(),
                             (x.f - y.f).max_abs()});
        };
        const double e1 = dist(a, b), e2 = dist(b, c);
        const double order = std::log2(e1 / e2);
        ok = ok && order > 3.7 && order < 4.3;
        d << ", convergence order " << order;
    }

    // spectral decay of the curl transport residual under refinement
    {
        auto residual_at = [&](int n1, int n3) {
            RunConfig cfg;
            cfg.n1 = cfg.n2 = n1;
            cfg.n3 = n3;
            cfg.scenario = "vortex-sheet-stable";
            cfg.eps = 1e-3;
            EvolveContext ctx = make_context(cfg);
            PlasmaState s = scenario(ctx, cfg);
            StateDot dot = rhs(ctx, s);
            return curl_transport_residual(ctx, s, dot);
        };
        const double coarse = residual_at(16, 9), fine = residual_at(N1, N3);
        ok = ok && (fine < coarse / 20.0 || fine < 1e-9);
        d << ", curl residual " << coarse << " -> " << fine;
    }
    verdict(7, ok, d.str());
}

TEST_CASE("criterion 8: linear-regime physics", "[c8]") {
    std::ostringstream d;
    bool ok = true;

    auto mode_coef = [](const PlasmaState& s, int kx) { return s.f.at(kx, 0); };

    // neutral oscillation of a stable vortex sheet
    {
        RunConfig cfg;
        cfg.n1 = N1;
        cfg.n2 = N2;
        cfg.n3 = N3;
        cfg.scenario = "vortex-sheet-stable";
        cfg.eps = 1e-4;
        cfg.kx = 1;
        EvolveContext ctx = make_context(cfg);
        PlasmaState s = scenario(ctx, cfg);
        project_divergence(ctx, s);
        auto nm = planar_normal_modes({0.15, 0, 0}, {-0.15, 0, 0}, {1, 0, 0}, {0, 1, 0},
                                      {kTwoPi, 0.0});
        const double tau_pred = nm.tau[0].real(); // the root the initializer picks
        cplx c_prev = mode_coef(s, 1);
        double phase = 0.0;
        const double t_end = 0.3;
        while (s.time < t_end - 1e-12) {
            double dt = std::min(cfl_limit(ctx, s), t_end - s.time);
            step(ctx, s, dt);
            cplx c_now = mode_coef(s, 1);
            phase += std::arg(c_now / c_prev);
            c_prev = c_now;
        }
        const double tau_est = phase / s.time;
        const double rel = std::abs(tau_est - tau_pred) / std::abs(tau_pred);
        ok = ok && rel < 0.05;
        d << "oscillation tau " << tau_est << " vs " << tau_pred << " (rel " << rel << ")";
    }

    // Kelvin-Helmholtz growth
    {
        RunConfig cfg;
        cfg.n1 = N1;
        cfg.n2 = N2;
        cfg.n3 = N3;
        cfg.scenario = "kelvin-helmholtz-unstable";
        cfg.eps = 1e-6;
        cfg.kx = 1;
        EvolveContext ctx = make_context(cfg);
        PlasmaState s = scenario(ctx, cfg);
        project_divergence(ctx, s);
        const double growth_pred =
            planar_normal_modes({0.5, 0, 0}, {-0.5, 0, 0}, {0, 0, 0}, {0, 0, 0}, {kTwoPi, 0.0})
                .growth_rate;
        const double a0 = std::abs(mode_coef(s, 1));
        const double t_end = 0.25;
        while (s.time < t_end - 1e-12) {
            double dt = std::min(cfl_limit(ctx, s), t_end - s.time);
            step(ctx, s, dt);
        }
        const double growth_est = std::log(std::abs(mode_coef(s, 1)) / a0) / s.time;
        const double rel = std::abs(growth_est - growth_pred) / growth_pred;
        ok = ok && rel < 0.05;
        d << "; growth " << growth_est << " vs " << growth_pred << " (rel " << rel << ")";
    }
    verdict(8, ok, d.str());
}

TEST_CASE("criterion 9: boundedness analogue", "[c9]") {
    RunConfig cfg;
    cfg.n1 = N1;
    cfg.n2 = N2;
    cfg.n3 = N3;
    cfg.scenario = "vortex-sheet-stable";
    cfg.eps = 5e-3;
    cfg.kx = 1;
    // the quadrature-level compatibility defect of the assembled sources is
    // cubic in the amplitude (~6e-7 relative here); widen the safety gate so
    // the solver's mean projection can absorb it
    cfg.compat_tol = 1e-5;
    // the preconditioned iteration plateaus around 1e-10 at this amplitude;
    // 1e-9 keeps the pressure far below the energy tolerances probed here
    cfg.pressure_tol = 1e-9;
    EvolveContext ctx = make_context(cfg);
    PlasmaState s = scenario(ctx, cfg);
    project_divergence(ctx, s);
    const double f0 = sobolev_norm_torus(s.f, 2.5);
    REQUIRE(f0 <= 0.01);
    const double E0 = functional_E(s);
    double E_max = E0, f_max = f0;
    const double t_end = 0.5;
    while (s.time < t_end - 1e-12) {
        double dt = std::min(cfl_limit(ctx, s), t_end - s.time);
        step(ctx, s, dt);
        E_max = std::max(E_max, functional_E(s));
        f_max = std::max(f_max, sobolev_norm_torus(s.f, 2.5));
    }
    std::ostringstream d;
    d << "E " << E0 << " -> max " << E_max << ", flatness " << f0 << " -> max " << f_max;
    verdict(9, E_max <= 2.0 * E0 && f_max <= 2.0 * f0 + 0.01, d.str());
}

TEST_CASE("criterion 10: determinism", "[c10]") {
    auto run_once = [](const std::string& dir) {
        RunConfig cfg;
        cfg.n1 = N1;
        cfg.n2 = N2;
        cfg.n3 = N3;
        cfg.scenario = "vortex-sheet-stable";
        cfg.eps = 1e-3;
        cfg.steps = 3;
        cfg.dt = 2e-3;
        cfg.output_dir = dir;
        cfg.reproducible = true;
        run(cfg);
        std::ifstream in(fs::path(dir) / "diagnostics.jsonl", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = run_once("acc10_a"), b = run_once("acc10_b");
    fs::remove_all("acc10_a");
    fs::remove_all("acc10_b");
    verdict(10, !a.empty() && a == b,
            "diagnostics streams of " + std::to_string(a.size()) + " bytes compared");
}
