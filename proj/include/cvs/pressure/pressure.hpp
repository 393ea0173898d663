#pragma once

// Total-pressure transmission problem:
//   -A^T grad . (A^T grad Q) = F   in each half-domain,
//   [Q] = 0,  [(A^T grad Q) . N] = G   at the interface,
//   d3 Q = 0 at the walls, total mean zero.
//
// Discretization: per horizontal Fourier mode the flat-geometry operator
// decouples into a (2 n3) x (2 n3) block coupling the two Chebyshev columns
// through a continuity row and a derivative-jump row; the k = 0 block is
// bordered with the mean constraint and a scalar multiplier on the interior
// rows. Those blocks, LU-factored once per distinct |k|^2, serve both as
// the exact flat solver and as the preconditioner of a Richardson iteration
// for curved geometry: the geometric perturbation of the operator is small
// whenever the diffeomorphism check passes.

#include <map>

#include "cvs/geometry/geometry.hpp"
#include "cvs/stability/stability.hpp"

namespace cvs {

struct PressureProblem {
    const GeometryBundle* geometry = nullptr;
    VolumeField Fp, Fm; // interior sources
    FrontField G;       // interface derivative-jump source
};

struct PressureResiduals {
    double interior = 0.0;   // max over sides of ||L Q - F||_L2
    double jump = 0.0;       // max |[(A^T grad Q).N] - G|
    double continuity = 0.0; // max |[Q]|
    double wall = 0.0;       // max |d3 Q| on the walls
    double mean = 0.0;       // |total mean|
    double compatibility = 0.0;

    double worst() const { return std::max({interior, jump, continuity, wall, mean}); }
};

struct PressureSolution {
    VolumeField Qp, Qm;
    int iterations = 0;
    bool converged = false;
    PressureResiduals residuals;
};

// Quadrature of sum_pm int J F dx - int_Gamma G dx'; zero for data that
// actually come from the momentum equation (a Piola-identity consequence).
inline double check_compatibility(const PressureProblem& p) {
    const auto& g = *p.geometry;
    double vol = multiply(g.plus.J, p.Fp).integral() + multiply(g.minus.J, p.Fm).integral();
    return vol - p.G.mean();
}

class PressureSolver {
  public:
    explicit PressureSolver(const GeometryBundle& g)
        : geom_(&g), n3_(g.plus.grid.n3()), torus_(g.plus.grid.torus()) {
        if (g.minus.grid.n3() != n3_) throw std::invalid_argument("PressureSolver: side resolutions differ");
        D_ = g.plus.grid.diff3(); // identical on both slabs
        D2_ = D_ * D_;
        wq_ = g.plus.grid.weights3();
    }

    // tol bounds the worst residual component relative to the source scale
    // (absolute when the sources are O(1) or smaller); an absolute bound
    // would sit below the rounding floor for large-amplitude data.
    PressureSolution solve(const PressureProblem& p, double tol = 1e-10, int max_iter = 200,
                           double compat_tol = 1e-8) {
        const auto& g = *geom_;
        PressureSolution sol;
        const double compat = check_compatibility(p);
        const double scale =
            std::max({1.0, multiply(g.plus.J, p.Fp).l2_norm(), multiply(g.minus.J, p.Fm).l2_norm()});
        const double rtol = tol * scale;
        sol.residuals.compatibility = std::abs(compat) / scale;
        if (sol.residuals.compatibility > 10.0 * compat_tol)
            throw std::runtime_error("solve_pressure: source terms violate the compatibility condition");
        // project the remaining quadrature-level defect out of F: subtracting
        // c / J with c = defect / vol shifts sum int J F by exactly -defect
        PressureProblem q;
        q.geometry = p.geometry;
        q.Fp = p.Fp;
        q.Fm = p.Fm;
        q.G = p.G;
        const double vol = g.plus.J.integral() + g.minus.J.integral();
        const double c = compat / vol;
        for (size_t i = 0; i < q.Fp.data(0).size(); ++i)
            q.Fp.data(0)[i] -= c / g.plus.J.data(0)[i];
        for (size_t i = 0; i < q.Fm.data(0).size(); ++i)
            q.Fm.data(0)[i] -= c / g.minus.J.data(0)[i];

        sol.Qp = VolumeField::scalar(g.plus.grid);
        sol.Qm = VolumeField::scalar(g.minus.grid);
        for (int it = 0; it < max_iter; ++it) {
            Residual r = residual(q, sol.Qp, sol.Qm);
            sol.iterations = it;
            sol.residuals.interior = std::max(r.int_p_norm, r.int_m_norm);
            sol.residuals.jump = r.jump_norm;
            sol.residuals.continuity = r.cont_norm;
            sol.residuals.wall = r.wall_norm;
            sol.residuals.mean = std::abs(r.mean);
            if (sol.residuals.worst() <= rtol) {
                sol.converged = true;
                return sol;
            }
            apply_correction(r, sol.Qp, sol.Qm);
        }
        // report the final state; callers decide whether to treat it as fatal
        Residual r = residual(q, sol.Qp, sol.Qm);
        sol.iterations = max_iter;
        sol.residuals.interior = std::max(r.int_p_norm, r.int_m_norm);
        sol.residuals.jump = r.jump_norm;
        sol.residuals.continuity = r.cont_norm;
        sol.residuals.wall = r.wall_norm;
        sol.residuals.mean = std::abs(r.mean);
        sol.converged = sol.residuals.worst() <= rtol;
        return sol;
    }

    // -A^T grad . (A^T grad Q) on one side.
    VolumeField apply_operator(const SideGeometry& s, const VolumeField& q) const {
        VolumeField out = div_transformed(s, grad_transformed(s, q));
        out *= -1.0;
        return out;
    }

  private:
    struct Residual {
        // Fourier coefficients, level-major, one block per side.
        std::vector<cplx> int_p, int_m; // F - L Q at every level
        std::vector<cplx> wall_p, wall_m, jump, cont;
        double mean = 0.0;
        double int_p_norm = 0.0, int_m_norm = 0.0;
        double wall_norm = 0.0, jump_norm = 0.0, cont_norm = 0.0;
    };

    static std::vector<cplx> to_modes(const VolumeField& u) {
        const auto& t = u.grid().torus();
        const auto& fft = Fft2::get(t.n1, t.n2);
        const int nh = t.size();
        std::vector<cplx> out(static_cast<size_t>(nh) * u.grid().n3());
        std::vector<double> level(nh);
        std::vector<cplx> coef;
        for (int j = 0; j < u.grid().n3(); ++j) {
            std::copy_n(u.data(0).begin() + static_cast<size_t>(j) * nh, nh, level.begin());
            fft.forward(level, coef);
            std::copy_n(coef.begin(), nh, out.begin() + static_cast<size_t>(j) * nh);
        }
        return out;
    }

    Residual residual(const PressureProblem& p, const VolumeField& Qp, const VolumeField& Qm) const {
        const auto& g = *geom_;
        Residual r;
        VolumeField rp = p.Fp - apply_operator(g.plus, Qp);
        VolumeField rm = p.Fm - apply_operator(g.minus, Qm);
        r.int_p = to_modes(rp);
        r.int_m = to_modes(rm);
        // wall rows enforce plain d3 Q = 0; store 0 - d3 Q so the block
        // solve drives the wall derivative to zero
        FrontField wp = Qp.d3().trace(Wall::top);
        FrontField wm = Qm.d3().trace(Wall::bottom);
        wp *= -1.0;
        wm *= -1.0;
        r.wall_p.assign(wp.coef().begin(), wp.coef().end());
        r.wall_m.assign(wm.coef().begin(), wm.coef().end());
        // derivative jump (A^T grad Q).N, evaluated sideways then jumped
        FrontField jp = conormal_trace(g.plus, Qp, Wall::interface);
        FrontField jm = conormal_trace(g.minus, Qm, Wall::interface);
        FrontField jres = p.G - (jp - jm);
        r.jump.assign(jres.coef().begin(), jres.coef().end());
        FrontField cres = Qp.trace(Wall::interface) - Qm.trace(Wall::interface);
        cres *= -1.0;
        r.cont.assign(cres.coef().begin(), cres.coef().end());
        r.mean = -(Qp.integral() + Qm.integral());

        const int nh = torus_.size();
        auto interior_norm = [&](const std::vector<cplx>& v) {
            double s = 0.0;
            for (int j = 1; j < n3_ - 1; ++j)
                for (int i = 0; i < nh; ++i) s += wq_[j] * std::norm(v[static_cast<size_t>(j) * nh + i]);
            return std::sqrt(s);
        };
        r.int_p_norm = interior_norm(r.int_p);
        r.int_m_norm = interior_norm(r.int_m);
        auto cmax = [](const std::vector<cplx>& v) {
            double m = 0.0;
            for (auto& c : v) m = std::max(m, std::abs(c));
            return m;
        };
        r.wall_norm = std::max(cmax(r.wall_p), cmax(r.wall_m));
        r.jump_norm = cmax(r.jump);
        r.cont_norm = cmax(r.cont);
        return r;
    }

    static FrontField conormal_trace(const SideGeometry& s, const VolumeField& q, Wall w) {
        VolumeField gq = grad_transformed(s, q);
        VolumeField wn = multiply(s.d1psi, gq.component(0));
        wn += multiply(s.d2psi, gq.component(1));
        wn *= -1.0;
        wn += gq.component(2);
        return wn.trace(w);
    }

    void apply_correction(const Residual& r, VolumeField& Qp, VolumeField& Qm) {
        const int nh = torus_.size();
        const int n = n3_;
        std::vector<cplx> cp(static_cast<size_t>(nh) * n), cm(static_cast<size_t>(nh) * n);
        Eigen::VectorXd re, im;
        for (int i1 = 0; i1 < torus_.n1; ++i1)
            for (int i2 = 0; i2 < torus_.n2; ++i2) {
                const int k1 = torus_.wave1(i1), k2 = torus_.wave2(i2);
                const int kk2 = k1 * k1 + k2 * k2;
                const int m = torus_.idx(i1, i2);
                const int dim = (kk2 == 0) ? 2 * n + 1 : 2 * n;
                Eigen::VectorXcd rhs(dim);
                rhs(0) = r.wall_p[m];
                for (int j = 1; j < n - 1; ++j) rhs(j) = r.int_p[static_cast<size_t>(j) * nh + m];
                rhs(n - 1) = r.jump[m];
                rhs(n) = r.cont[m];
                for (int j = 1; j < n - 1; ++j) rhs(n + j) = r.int_m[static_cast<size_t>(j) * nh + m];
                rhs(2 * n - 1) = r.wall_m[m];
                if (kk2 == 0) rhs(2 * n) = cplx{r.mean, 0.0};
                const auto& lu = block_lu(kk2);
                Eigen::VectorXd xr = lu.solve(rhs.real().eval());
                Eigen::VectorXd xi = lu.solve(rhs.imag().eval());
                Eigen::VectorXcd x = xr + cplx{0.0, 1.0} * xi;
                for (int j = 0; j < n; ++j) {
                    cp[static_cast<size_t>(j) * nh + m] += x(j);
                    cm[static_cast<size_t>(j) * nh + m] += x(n + j);
                }
            }
        add_modes(Qp, cp);
        add_modes(Qm, cm);
    }

    void add_modes(VolumeField& q, const std::vector<cplx>& c) const {
        const auto& fft = Fft2::get(torus_.n1, torus_.n2);
        const int nh = torus_.size();
        std::vector<cplx> coef(nh);
        std::vector<double> phys;
        for (int j = 0; j < n3_; ++j) {
            std::copy_n(c.begin() + static_cast<size_t>(j) * nh, nh, coef.begin());
            fft.backward(coef, phys);
            for (int i = 0; i < nh; ++i) q.data(0)[static_cast<size_t>(j) * nh + i] += phys[i];
        }
    }

    // Blocks depend only on (n3, |k|^2); the factorizations are shared
    // process-wide. Single-threaded access per the concurrency contract.
    const Eigen::PartialPivLU<Eigen::MatrixXd>& block_lu(int kk2) {
        static std::map<std::pair<int, int>, Eigen::PartialPivLU<Eigen::MatrixXd>> lus_;
        auto it = lus_.find({n3_, kk2});
        if (it != lus_.end()) return it->second;
        const int n = n3_;
        const double kap2 = kTwoPi * kTwoPi * kk2;
        const int dim = (kk2 == 0) ? 2 * n + 1 : 2 * n;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
        // plus block: row 0 top-wall Neumann, rows 1..n-2 interior,
        // row n-1 derivative jump across the interface
        M.block(0, 0, 1, n) = D_.row(0);
        for (int j = 1; j < n - 1; ++j) {
            M.block(j, 0, 1, n) = -D2_.row(j);
            M(j, j) += kap2;
        }
        M.block(n - 1, 0, 1, n) = D_.row(n - 1);
        M.block(n - 1, n, 1, n) = -D_.row(0);
        // minus block: row n continuity, rows n+1..2n-2 interior,
        // row 2n-1 bottom-wall Neumann
        M(n, n - 1) = 1.0;
        M(n, n) = -1.0;
        for (int j = 1; j < n - 1; ++j) {
            M.block(n + j, n, 1, n) = -D2_.row(j);
            M(n + j, n + j) += kap2;
        }
        M.block(2 * n - 1, n, 1, n) = D_.row(n - 1);
        if (kk2 == 0) {
            // mean row and a multiplier column on the interior rows
            for (int j = 0; j < n; ++j) {
                M(2 * n, j) = wq_[j];
                M(2 * n, n + j) = wq_[j];
            }
            for (int j = 1; j < n - 1; ++j) {
                M(j, 2 * n) = 1.0;
                M(n + j, 2 * n) = 1.0;
            }
        }
        return lus_.emplace(std::make_pair(n3_, kk2), Eigen::PartialPivLU<Eigen::MatrixXd>(M))
            .first->second;
    }

    const GeometryBundle* geom_;
    int n3_;
    TorusGrid torus_;
    Eigen::MatrixXd D_, D2_;
    std::vector<double> wq_;
};

// Five-term interior source of the pressure equation, assembled from the
// divergence of the transport terms with the constraint divergences
// eliminated:
//   F = -dtA_ki dk v_i + A_ki dk vt_j dj v_i - (vt . grad A_ki) dk v_i
//       - A_ki dk Bt_j dj B_i + (Bt . grad A_ki) dk B_i .
// Only row 3 of A is non-constant, so the dtA and grad-A contractions
// reduce to that row.
inline VolumeField assemble_F(const SideGeometry& g, const VolumeField& v, const VolumeField& B) {
    auto [vt, Bt] = transport_fields(g, v, B);
    VolumeField d3v = v.d3(), d3B = B.d3();

    VolumeField F = multiply(g.A31_t, d3v.component(0));
    F += multiply(g.A32_t, d3v.component(1));
    F += multiply(g.A33_t, d3v.component(2));
    F *= -1.0;

    // dj v_i and dj B_i, j-major
    std::array<VolumeField, 3> dv, dB;
    for (int j = 0; j < 3; ++j) {
        dv[j] = dpart(v, j);
        dB[j] = dpart(B, j);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            F += multiply(da(g, i, vt.component(j)), dv[j].component(i));
            F -= multiply(da(g, i, Bt.component(j)), dB[j].component(i));
        }

    const std::array<const VolumeField*, 3> Arow = {&g.A31, &g.A32, &g.A33};
    for (int i = 0; i < 3; ++i) {
        VolumeField adv_v = multiply(vt.component(0), Arow[i]->tangential_derivative(1, 0));
        adv_v += multiply(vt.component(1), Arow[i]->tangential_derivative(0, 1));
        adv_v += multiply(vt.component(2), Arow[i]->d3());
        F -= multiply(adv_v, d3v.component(i));

        VolumeField adv_B = multiply(Bt.component(0), Arow[i]->tangential_derivative(1, 0));
        adv_B += multiply(Bt.component(1), Arow[i]->tangential_derivative(0, 1));
        adv_B += multiply(Bt.component(2), Arow[i]->d3());
        F += multiply(adv_B, d3B.component(i));
    }
    return F;
}

// Interface jump source
//   G = -[ 2 v'.grad' dt f + (v'.grad') grad' f . v' - (B'.grad') grad' f . B' ].
inline FrontField assemble_G(const InterfaceState& s, const FrontField& f_t) {
    const auto& g = s.grid;
    auto d1ft = f_t.derivative(1, 0).to_physical();
    auto d2ft = f_t.derivative(0, 1).to_physical();
    auto f11 = s.f.derivative(2, 0).to_physical();
    auto f12 = s.f.derivative(1, 1).to_physical();
    auto f22 = s.f.derivative(0, 2).to_physical();
    std::vector<double> out(g.size());
    auto side_term = [&](const std::array<std::vector<double>, 3>& v,
                         const std::array<std::vector<double>, 3>& B, int i) {
        const double v1 = v[0][i], v2 = v[1][i], b1 = B[0][i], b2 = B[1][i];
        return 2.0 * (v1 * d1ft[i] + v2 * d2ft[i]) +
               (v1 * v1 * f11[i] + 2.0 * v1 * v2 * f12[i] + v2 * v2 * f22[i]) -
               (b1 * b1 * f11[i] + 2.0 * b1 * b2 * f12[i] + b2 * b2 * f22[i]);
    };
    for (int i = 0; i < g.size(); ++i)
        out[i] = -(side_term(s.vp, s.Bp, i) - side_term(s.vm, s.Bm, i));
    return FrontField::from_physical(g, out);
}

} // namespace cvs
