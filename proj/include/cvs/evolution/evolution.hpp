#pragma once

// Time stepping of the fixed-domain system
//   dt v + (vt . grad) v - (Bt . grad) B + A^T grad Q = 0,
//   dt B + (vt . grad) B - (Bt . grad) v = 0,
//   dt f = v . N  on the interface,
// with per-stage geometry rebuild and pressure solve, RK4 in time, and an
// elliptic divergence projection after each full step. The front rate uses
// the average of the two interface traces of v . N; their difference is a
// discretization-error diagnostic, not a modeling choice.

#include <sstream>

#include "cvs/errors.hpp"
#include "cvs/pressure/pressure.hpp"

namespace cvs {

struct PlasmaState {
    VolumeField vp, vm, Bp, Bm; // 3-vectors
    VolumeField Qp, Qm;         // total pressure
    FrontField f, f_t;
    double time = 0.0;

    static PlasmaState zero(const SlabGrid& plus, const SlabGrid& minus) {
        PlasmaState s;
        s.vp = VolumeField::vector(plus);
        s.Bp = VolumeField::vector(plus);
        s.Qp = VolumeField::scalar(plus);
        s.vm = VolumeField::vector(minus);
        s.Bm = VolumeField::vector(minus);
        s.Qm = VolumeField::scalar(minus);
        s.f = FrontField(plus.torus());
        s.f_t = FrontField(plus.torus());
        return s;
    }
};

struct StateDot {
    VolumeField dvp, dvm, dBp, dBm;
    FrontField df;
};

struct CurlState {
    VolumeField zeta_p, zeta_m, xi_p, xi_m;
};

struct EvolveContext {
    SlabGrid plus, minus;
    CutoffProfile chi = CutoffProfile::standard_bump();
    double pressure_tol = 1e-10;
    int pressure_iters = 400;
    double projection_tol = 1e-11;
    double compat_tol = 1e-8;
    double cfl = 0.5;

    EvolveContext(const TorusGrid& t, int n3)
        : plus(t, n3, Side::plus), minus(t, n3, Side::minus) {}
};

// (w . grad) u with plain grid derivatives, componentwise.
inline VolumeField advect(const VolumeField& w, const VolumeField& u) {
    VolumeField d1 = u.tangential_derivative(1, 0);
    VolumeField d2 = u.tangential_derivative(0, 1);
    VolumeField d3 = u.d3();
    VolumeField out(u.grid(), u.ncomp());
    for (int c = 0; c < u.ncomp(); ++c)
        for (size_t i = 0; i < out.data(c).size(); ++i)
            out.data(c)[i] = w.data(0)[i] * d1.data(c)[i] + w.data(1)[i] * d2.data(c)[i] +
                             w.data(2)[i] * d3.data(c)[i];
    return out;
}

// Interface trace of v . N = -v1 d1f - v2 d2f + v3, needing only the front.
inline FrontField normal_trace(const FrontField& f, const VolumeField& v, Wall w = Wall::interface) {
    auto g1 = f.derivative(1, 0).to_physical();
    auto g2 = f.derivative(0, 1).to_physical();
    auto v1 = v.trace(w, 0).to_physical();
    auto v2 = v.trace(w, 1).to_physical();
    auto v3 = v.trace(w, 2).to_physical();
    std::vector<double> out(v1.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = -v1[i] * g1[i] - v2[i] * g2[i] + v3[i];
    return FrontField::from_physical(f.grid(), out);
}

// Side-averaged dt f; the trace mismatch is returned via *defect if given.
inline FrontField front_rate(const PlasmaState& s, double* defect = nullptr) {
    FrontField np = normal_trace(s.f, s.vp);
    FrontField nm = normal_trace(s.f, s.vm);
    if (defect) *defect = (np - nm).max_abs();
    FrontField out = np + nm;
    out *= 0.5;
    out.dealias();
    return out;
}

inline InterfaceState interface_state(const PlasmaState& s) {
    InterfaceState is;
    is.grid = s.f.grid();
    is.f = s.f;
    for (int c = 0; c < 3; ++c) {
        is.vp[c] = s.vp.trace(Wall::interface, c).to_physical();
        is.vm[c] = s.vm.trace(Wall::interface, c).to_physical();
        is.Bp[c] = s.Bp.trace(Wall::interface, c).to_physical();
        is.Bm[c] = s.Bm.trace(Wall::interface, c).to_physical();
    }
    return is;
}

inline GeometryBundle build_state_geometry(const EvolveContext& ctx, const FrontField& f,
                                           const FrontField& f_t) {
    LiftedFront lf = lift(f, ctx.plus, ctx.minus, ctx.chi);
    auto dc = check_diffeomorphism(lf);
    if (!dc.ok) throw HypothesisError("front too steep: |grad psi| = " + std::to_string(dc.grad_max));
    LiftedFront lft = lift(f_t, ctx.plus, ctx.minus, ctx.chi);
    return build_geometry(lf, lft);
}

// Solve the pressure problem for the current state. f_t must already be
// the front rate of the state.
inline PressureSolution solve_state_pressure(const EvolveContext& ctx, const GeometryBundle& geom,
                                             const PlasmaState& s) {
    PressureProblem prob;
    prob.geometry = &geom;
    prob.Fp = assemble_F(geom.plus, s.vp, s.Bp);
    prob.Fm = assemble_F(geom.minus, s.vm, s.Bm);
    prob.G = assemble_G(interface_state(s), s.f_t);
    PressureSolver solver(geom);
    PressureSolution sol = solver.solve(prob, ctx.pressure_tol, ctx.pressure_iters, ctx.compat_tol);
    if (!sol.converged) {
        std::ostringstream o;
        o << "pressure iteration stalled at residual " << sol.residuals.worst() << " (interior "
          << sol.residuals.interior << ", jump " << sol.residuals.jump << ", continuity "
          << sol.residuals.continuity << ", wall " << sol.residuals.wall << ", mean "
          << sol.residuals.mean << ")";
        throw SolverError(o.str());
    }
    return sol;
}

// Full right-hand side; also refreshes s.f_t and s.Qp/Qm so the state
// carries the diagnostic fields consistent with its (v, B, f).
inline StateDot rhs(const EvolveContext& ctx, PlasmaState& s) {
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    PressureSolution pr = solve_state_pressure(ctx, geom, s);
    s.Qp = pr.Qp;
    s.Qm = pr.Qm;

    StateDot d;
    d.df = s.f_t;
    auto side_rate = [&](const SideGeometry& g, const VolumeField& v, const VolumeField& B,
                         const VolumeField& Q, VolumeField& dv, VolumeField& dB) {
        auto [vt, Bt] = transport_fields(g, v, B);
        dv = advect(Bt, B) - advect(vt, v) - grad_transformed(g, Q);
        dB = advect(Bt, v) - advect(vt, B);
        dv.dealias();
        dB.dealias();
    };
    side_rate(geom.plus, s.vp, s.Bp, s.Qp, d.dvp, d.dBp);
    side_rate(geom.minus, s.vm, s.Bm, s.Qm, d.dvm, d.dBm);
    return d;
}

// Largest stable dt: cfl / max over sides and points of
// |vt1| n1 + |vt2| n2 + |vt3| / dz(level), transport by vt and Bt combined.
inline double cfl_limit(const EvolveContext& ctx, PlasmaState& s) {
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    double rate = 0.0;
    for (Side sd : {Side::plus, Side::minus}) {
        const SideGeometry& g = geom.side(sd);
        const VolumeField& v = sd == Side::plus ? s.vp : s.vm;
        const VolumeField& B = sd == Side::plus ? s.Bp : s.Bm;
        auto [vt, Bt] = transport_fields(g, v, B);
        const auto& grid = g.grid;
        const int nh = grid.torus().size();
        for (int j = 0; j < grid.n3(); ++j) {
            const double above = j > 0 ? std::abs(grid.x3(j - 1) - grid.x3(j)) : 1.0;
            const double below = j < grid.n3() - 1 ? std::abs(grid.x3(j) - grid.x3(j + 1)) : 1.0;
            const double dz = std::min(above, below);
            for (int i = 0; i < nh; ++i) {
                const size_t m = static_cast<size_t>(j) * nh + i;
                const double s1 = std::abs(vt.data(0)[m]) + std::abs(Bt.data(0)[m]);
                const double s2 = std::abs(vt.data(1)[m]) + std::abs(Bt.data(1)[m]);
                const double s3 = std::abs(vt.data(2)[m]) + std::abs(Bt.data(2)[m]);
                rate = std::max(rate, s1 * grid.torus().n1 + s2 * grid.torus().n2 + s3 / dz);
            }
        }
    }
    return rate > 0.0 ? ctx.cfl / rate : std::numeric_limits<double>::infinity();
}

// v <- v - A^T grad phi with L phi = -(A^T grad).v, homogeneous jump data
// and wall Neumann rows; same elliptic machinery as the pressure.
inline void project_pair(const EvolveContext& ctx, const GeometryBundle& geom, VolumeField& up,
                         VolumeField& um) {
    PressureProblem prob;
    prob.geometry = &geom;
    prob.Fp = div_transformed(geom.plus, up);
    prob.Fp *= -1.0;
    prob.Fm = div_transformed(geom.minus, um);
    prob.Fm *= -1.0;
    prob.G = FrontField(geom.f.grid());
    PressureSolver solver(geom);
    PressureSolution sol = solver.solve(prob, ctx.projection_tol, ctx.pressure_iters, ctx.compat_tol);
    if (!sol.converged) {
        std::ostringstream o;
        o << "divergence projection stalled at residual " << sol.residuals.worst() << " (interior "
          << sol.residuals.interior << ", jump " << sol.residuals.jump << ", continuity "
          << sol.residuals.continuity << ", wall " << sol.residuals.wall << ", mean "
          << sol.residuals.mean << ")";
        throw SolverError(o.str());
    }
    up -= grad_transformed(geom.plus, sol.Qp);
    um -= grad_transformed(geom.minus, sol.Qm);
}

inline void project_divergence(const EvolveContext& ctx, PlasmaState& s) {
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    project_pair(ctx, geom, s.vp, s.vm);
    project_pair(ctx, geom, s.Bp, s.Bm);
}

inline PlasmaState advanced(const PlasmaState& base, const StateDot& d, double h) {
    PlasmaState s = base;
    s.vp += h * d.dvp;
    s.vm += h * d.dvm;
    s.Bp += h * d.dBp;
    s.Bm += h * d.dBm;
    s.f += h * d.df;
    s.f.symmetrize();
    return s;
}

// One RK4 step plus divergence projection; refuses dt above the CFL bound.
inline void step(const EvolveContext& ctx, PlasmaState& s, double dt) {
    const double limit = cfl_limit(ctx, s);
    if (dt > limit) throw CflError("dt " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(limit));
    StateDot k1 = rhs(ctx, s);
    PlasmaState s2 = advanced(s, k1, 0.5 * dt);
    StateDot k2 = rhs(ctx, s2);
    PlasmaState s3 = advanced(s, k2, 0.5 * dt);
    StateDot k3 = rhs(ctx, s3);
    PlasmaState s4 = advanced(s, k3, dt);
    StateDot k4 = rhs(ctx, s4);

    auto combine = [&](VolumeField& u, const VolumeField& a, const VolumeField& b, const VolumeField& c,
                       const VolumeField& d) {
        for (int comp = 0; comp < u.ncomp(); ++comp)
            for (size_t i = 0; i < u.data(comp).size(); ++i)
                u.data(comp)[i] += dt / 6.0 * (a.data(comp)[i] + 2.0 * b.data(comp)[i] +
                                               2.0 * c.data(comp)[i] + d.data(comp)[i]);
    };
    combine(s.vp, k1.dvp, k2.dvp, k3.dvp, k4.dvp);
    combine(s.vm, k1.dvm, k2.dvm, k3.dvm, k4.dvm);
    combine(s.Bp, k1.dBp, k2.dBp, k3.dBp, k4.dBp);
    combine(s.Bm, k1.dBm, k2.dBm, k3.dBm, k4.dBm);
    FrontField df = k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df;
    df *= dt / 6.0;
    s.f += df;
    s.f.symmetrize();
    s.time += dt;
    project_divergence(ctx, s);
    // leave the state carrying a pressure and front rate consistent with
    // the projected fields
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    PressureSolution pr = solve_state_pressure(ctx, geom, s);
    s.Qp = pr.Qp;
    s.Qm = pr.Qm;
}

inline CurlState curl_fields(const EvolveContext& ctx, PlasmaState& s) {
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    CurlState c;
    c.zeta_p = curl_transformed(geom.plus, s.vp);
    c.zeta_m = curl_transformed(geom.minus, s.vm);
    c.xi_p = curl_transformed(geom.plus, s.Bp);
    c.xi_m = curl_transformed(geom.minus, s.Bm);
    return c;
}

// Max-norm defect of curl v = zeta + (grad psi x d3 v) / J.
inline double curl_inversion_residual(const SideGeometry& g, const VolumeField& v,
                                      const VolumeField& zeta) {
    VolumeField d1 = v.tangential_derivative(1, 0);
    VolumeField d2 = v.tangential_derivative(0, 1);
    VolumeField d3 = v.d3();
    double m = 0.0;
    for (size_t i = 0; i < d1.data(0).size(); ++i) {
        const double g1 = g.d1psi.data(0)[i], g2 = g.d2psi.data(0)[i], g3 = g.d3psi.data(0)[i];
        const double J = g.J.data(0)[i];
        // plain curl of v
        const double c1 = d2.data(2)[i] - d3.data(1)[i];
        const double c2 = d3.data(0)[i] - d1.data(2)[i];
        const double c3 = d1.data(1)[i] - d2.data(0)[i];
        // grad psi x d3 v
        const double x1 = g2 * d3.data(2)[i] - g3 * d3.data(1)[i];
        const double x2 = g3 * d3.data(0)[i] - g1 * d3.data(2)[i];
        const double x3 = g1 * d3.data(1)[i] - g2 * d3.data(0)[i];
        m = std::max({m, std::abs(c1 - zeta.data(0)[i] - x1 / J),
                      std::abs(c2 - zeta.data(1)[i] - x2 / J),
                      std::abs(c3 - zeta.data(2)[i] - x3 / J)});
    }
    return m;
}

// A u, exploiting that rows 1 and 2 of A are the identity.
inline VolumeField apply_A(const SideGeometry& g, const VolumeField& u) {
    VolumeField out = u;
    for (size_t i = 0; i < out.data(2).size(); ++i)
        out.data(2)[i] = g.A31.data(0)[i] * u.data(0)[i] + g.A32.data(0)[i] * u.data(1)[i] +
                         g.A33.data(0)[i] * u.data(2)[i];
    return out;
}

// Time derivative of the transformed curl operator applied to a fixed
// field: only the A-row-3 coefficients move, so each component is a
// combination of dt A entries against d3 of the components.
inline VolumeField curl_dtA(const SideGeometry& g, const VolumeField& u) {
    VolumeField d3 = u.d3();
    VolumeField out = VolumeField::vector(g.grid);
    for (size_t i = 0; i < out.data(0).size(); ++i) {
        const double t1 = g.A31_t.data(0)[i], t2 = g.A32_t.data(0)[i], t3 = g.A33_t.data(0)[i];
        out.data(0)[i] = t2 * d3.data(2)[i] - t3 * d3.data(1)[i];
        out.data(1)[i] = t3 * d3.data(0)[i] - t1 * d3.data(2)[i];
        out.data(2)[i] = t1 * d3.data(1)[i] - t2 * d3.data(0)[i];
    }
    return out;
}

// Max over sides and equations of the discrete L2 residual of the
// transported-curl system
//   dt zeta + (vt.grad) zeta - (Bt.grad) xi - (A zeta.grad) v + (A xi.grad) B = 0,
//   dt xi + (vt.grad) xi - (Bt.grad) zeta
//     + [A^T grad x; (A v).grad] B - [A^T grad x; (A B).grad] v = 0,
// with dt zeta = curl_dtA(v) + curl_A(dt v) and likewise for xi.
inline double curl_transport_residual(const EvolveContext& ctx, PlasmaState& s, const StateDot& dot) {
    s.f_t = front_rate(s);
    GeometryBundle geom = build_state_geometry(ctx, s.f, s.f_t);
    double worst = 0.0;
    auto side_res = [&](const SideGeometry& g, const VolumeField& v, const VolumeField& B,
                        const VolumeField& dv, const VolumeField& dB) {
        auto [vt, Bt] = transport_fields(g, v, B);
        VolumeField zeta = curl_transformed(g, v);
        VolumeField xi = curl_transformed(g, B);
        VolumeField Av = apply_A(g, v);
        VolumeField AB = apply_A(g, B);
        VolumeField Azeta = apply_A(g, zeta);
        VolumeField Axi = apply_A(g, xi);

        VolumeField rz = curl_dtA(g, v) + curl_transformed(g, dv);
        rz += advect(vt, zeta);
        rz -= advect(Bt, xi);
        rz -= advect(Azeta, v);
        rz += advect(Axi, B);

        auto comm = [&](const VolumeField& w, const VolumeField& u) {
            return curl_transformed(g, advect(w, u)) - advect(w, curl_transformed(g, u));
        };
        VolumeField rx = curl_dtA(g, B) + curl_transformed(g, dB);
        rx += advect(vt, xi);
        rx -= advect(Bt, zeta);
        rx += comm(Av, B);
        rx -= comm(AB, v);
        worst = std::max({worst, rz.l2_norm(), rx.l2_norm()});
    };
    side_res(geom.plus, s.vp, s.Bp, dot.dvp, dot.dBp);
    side_res(geom.minus, s.vm, s.Bm, dot.dvm, dot.dBm);
    return worst;
}

} // namespace cvs
