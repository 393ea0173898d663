// Elliptic transmission solver for the total pressure: manufactured
// solutions, per-mode ODE oracles, source assembly, and compatibility.

#include <catch2/catch_amalgamated.hpp>

#include "cvs/pressure/pressure.hpp"

using namespace cvs;

namespace {

GeometryBundle flat_geometry(const TorusGrid& t, int n3) {
    SlabGrid plus(t, n3, Side::plus), minus(t, n3, Side::minus);
    return build_geometry(lift(FrontField(t), plus, minus, CutoffProfile::standard_bump()));
}

double side_error(const VolumeField& got, const VolumeField& want) {
    return (got - want).max_abs();
}

} // namespace

TEST_CASE("zero sources give the zero pressure") {
    TorusGrid t(8, 8);
    GeometryBundle g = flat_geometry(t, 9);
    PressureProblem p;
    p.geometry = &g;
    p.Fp = VolumeField::scalar(g.plus.grid);
    p.Fm = VolumeField::scalar(g.minus.grid);
    p.G = FrontField(t);
    PressureSolver solver(g);
    auto sol = solver.solve(p);
    REQUIRE(sol.converged);
    CHECK(sol.Qp.max_abs() < 1e-12);
    CHECK(sol.Qm.max_abs() < 1e-12);
}

TEST_CASE("manufactured flat solution Q = cos(2 pi x1) cos(pi x3)") {
    TorusGrid t(16, 8);
    const int n3 = 16;
    GeometryBundle g = flat_geometry(t, n3);
    auto Qfun = [](double x1, double, double x3) { return std::cos(kTwoPi * x1) * std::cos(M_PI * x3); };
    const double lam = 4.0 * M_PI * M_PI + M_PI * M_PI;
    PressureProblem p;
    p.geometry = &g;
    p.Fp = VolumeField::sample_scalar(g.plus.grid,
                                      [&](double x1, double x2, double x3) { return lam * Qfun(x1, x2, x3); });
    p.Fm = VolumeField::sample_scalar(g.minus.grid,
                                      [&](double x1, double x2, double x3) { return lam * Qfun(x1, x2, x3); });
    p.G = FrontField(t);
    PressureSolver solver(g);
    auto sol = solver.solve(p, 1e-11);
    REQUIRE(sol.converged);
    CHECK(side_error(sol.Qp, VolumeField::sample_scalar(g.plus.grid, Qfun)) < 1e-8);
    CHECK(side_error(sol.Qm, VolumeField::sample_scalar(g.minus.grid, Qfun)) < 1e-8);
    CHECK(sol.residuals.jump < 1e-10);
    CHECK(sol.residuals.mean < 1e-10);
}

TEST_CASE("per-mode ODE oracle: interior source on one side") {
    // F+ = cos(2 pi x1), F- = 0, G = 0 on flat geometry. The mode profile
    // solves -phi'' + kap^2 phi = 1 on (0,1), 0 on (-1,0), with Neumann
    // walls, continuity, and zero derivative jump:
    //   phi+ = 1/kap^2 - cosh(kap (x3-1)) / (2 kap^2 cosh kap)
    //   phi- =           cosh(kap (x3+1)) / (2 kap^2 cosh kap)
    TorusGrid t(16, 8);
    GeometryBundle g = flat_geometry(t, 17);
    const double kap = kTwoPi;
    PressureProblem p;
    p.geometry = &g;
    p.Fp = VolumeField::sample_scalar(g.plus.grid,
                                      [](double x1, double, double) { return std::cos(kTwoPi * x1); });
    p.Fm = VolumeField::scalar(g.minus.grid);
    p.G = FrontField(t);
    PressureSolver solver(g);
    auto sol = solver.solve(p, 1e-12);
    REQUIRE(sol.converged);
    auto phip = [&](double z) {
        return 1.0 / (kap * kap) - std::cosh(kap * (z - 1.0)) / (2.0 * kap * kap * std::cosh(kap));
    };
    auto phim = [&](double z) { return std::cosh(kap * (z + 1.0)) / (2.0 * kap * kap * std::cosh(kap)); };
    VolumeField wantp = VolumeField::sample_scalar(
        g.plus.grid, [&](double x1, double, double z) { return std::cos(kTwoPi * x1) * phip(z); });
    VolumeField wantm = VolumeField::sample_scalar(
        g.minus.grid, [&](double x1, double, double z) { return std::cos(kTwoPi * x1) * phim(z); });
    CHECK(side_error(sol.Qp, wantp) < 1e-10);
    CHECK(side_error(sol.Qm, wantm) < 1e-10);
}

TEST_CASE("per-mode ODE oracle: interface jump source") {
    // F = 0, G = g0 cos(2 pi x1): Q = -g0 cos(2 pi x1) cosh(kap(|x3|-1)) / (2 kap sinh kap)
    TorusGrid t(16, 8);
    GeometryBundle g = flat_geometry(t, 17);
    const double kap = kTwoPi, g0 = 0.7;
    PressureProblem p;
    p.geometry = &g;
    p.Fp = VolumeField::scalar(g.plus.grid);
    p.Fm = VolumeField::scalar(g.minus.grid);
    p.G = FrontField::sample(t, [&](double x1, double) { return g0 * std::cos(kTwoPi * x1); });
    PressureSolver solver(g);
    auto sol = solver.solve(p, 1e-12);
    REQUIRE(sol.converged);
    const double amp = -g0 / (2.0 * kap * std::sinh(kap));
    VolumeField wantp = VolumeField::sample_scalar(g.plus.grid, [&](double x1, double, double z) {
        return amp * std::cos(kTwoPi * x1) * std::cosh(kap * (z - 1.0));
    });
    VolumeField wantm = VolumeField::sample_scalar(g.minus.grid, [&](double x1, double, double z) {
        return amp * std::cos(kTwoPi * x1) * std::cosh(kap * (z + 1.0));
    });
    CHECK(side_error(sol.Qp, wantp) < 1e-10);
    CHECK(side_error(sol.Qm, wantm) < 1e-10);
}

TEST_CASE("curved geometry round trip") {
    TorusGrid t(16, 16);
    SlabGrid plus(t, 17, Side::plus), minus(t, 17, Side::minus);
    FrontField f = FrontField::sample(
        t, [](double x1, double) { return 0.05 + 0.05 * std::cos(kTwoPi * x1); });
    GeometryBundle g = build_geometry(lift(f, plus, minus, CutoffProfile::standard_bump()));
    auto Qfun = [](double x1, double, double x3) { return std::cos(kTwoPi * x1) * std::cos(M_PI * x3); };
    VolumeField Qp = VolumeField::sample_scalar(g.plus.grid, Qfun);
    VolumeField Qm = VolumeField::sample_scalar(g.minus.grid, Qfun);

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
    REQUIRE(sol.converged);
    CHECK(side_error(sol.Qp, Qp) < 1e-6);
    CHECK(side_error(sol.Qm, Qm) < 1e-6);
}

TEST_CASE("incompatible sources are rejected") {
    TorusGrid t(8, 8);
    GeometryBundle g = flat_geometry(t, 9);
    PressureProblem p;
    p.geometry = &g;
    p.Fp = VolumeField::sample_scalar(g.plus.grid, [](double, double, double) { return 1.0; });
    p.Fm = VolumeField::sample_scalar(g.minus.grid, [](double, double, double) { return 1.0; });
    p.G = FrontField(t);
    CHECK(check_compatibility(p) == Catch::Approx(2.0)); // int J over both halves
    PressureSolver solver(g);
    CHECK_THROWS(solver.solve(p));
}

TEST_CASE("assemble_F vanishes for constant fields and for v = B static") {
    TorusGrid t(16, 16);
    SlabGrid plus(t, 11, Side::plus), minus(t, 11, Side::minus);
    FrontField f = FrontField::sample(t, [](double x1, double) { return 0.02 * std::cos(kTwoPi * x1); });
    GeometryBundle g = build_geometry(lift(f, plus, minus, CutoffProfile::standard_bump()));

    VolumeField c = VolumeField::sample_vector(
        g.plus.grid, [](double, double, double) { return 0.4; },
        [](double, double, double) { return -1.2; }, [](double, double, double) { return 0.0; });
    CHECK(assemble_F(g.plus, c, c).max_abs() < 1e-10);

    VolumeField w = VolumeField::sample_vector(
        g.plus.grid,
        [](double x1, double x2, double) { return std::sin(kTwoPi * x2); },
        [](double x1, double, double x3) { return std::cos(kTwoPi * x1) * x3; },
        [](double, double, double) { return 0.1; });
    // v = B with static geometry: transport terms cancel pairwise and
    // dt A = 0, so F = 0
    CHECK(assemble_F(g.plus, w, w).max_abs() < 1e-9);
}

TEST_CASE("assemble_G hand-evaluated examples") {
    TorusGrid t(16, 16);
    const double eps = 0.01;
    InterfaceState s;
    s.grid = t;
    s.f = FrontField::sample(t, [&](double x1, double) { return eps * std::cos(kTwoPi * x1); });
    for (int c = 0; c < 3; ++c) {
        s.vp[c].assign(t.size(), 0.0);
        s.vm[c].assign(t.size(), 0.0);
        s.Bp[c].assign(t.size(), 0.0);
        s.Bm[c].assign(t.size(), 0.0);
    }
    FrontField ft(t);

    SECTION("antisymmetric shear cancels") {
        s.vp[0].assign(t.size(), 1.0);
        s.vm[0].assign(t.size(), -1.0);
        CHECK(assemble_G(s, ft).max_abs() < 1e-12);
    }
    SECTION("one-sided shear leaves +4 pi^2 eps cos(2 pi x1)") {
        s.vp[0].assign(t.size(), 1.0);
        FrontField want = FrontField::sample(
            t, [&](double x1, double) { return 4.0 * M_PI * M_PI * eps * std::cos(kTwoPi * x1); });
        CHECK((assemble_G(s, ft) - want).max_abs() < 1e-10);
    }
    SECTION("continuous tangential traces give zero") {
        for (int c = 0; c < 2; ++c) {
            s.vp[c].assign(t.size(), 0.3 * (c + 1));
            s.vm[c] = s.vp[c];
            s.Bp[c].assign(t.size(), -0.2 * (c + 1));
            s.Bm[c] = s.Bp[c];
        }
        FrontField ft2 = FrontField::sample(t, [](double x1, double) { return std::sin(kTwoPi * x1); });
        CHECK(assemble_G(s, ft2).max_abs() < 1e-11);
    }
}
