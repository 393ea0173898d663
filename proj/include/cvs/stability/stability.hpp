#pragma once

// Interface stability machinery: the Syrovatskii predicates on planar
// parameters, their pointwise check over interface traces, the lambda
// multipliers that close the tangential energy estimate, front-gradient
// recovery from the tangency constraint, and planar normal modes.
//
// Dispersion relation used by planar_normal_modes (derivation in
// docs/dispersion.md): surface waves exp(i tau t + i eta.x') with decaying
// or wall-matched x3 profiles satisfy
//   (tau + eta.u+)^2 + (tau + eta.u-)^2 = (eta.H+)^2 + (eta.H-)^2.
// Equal half-depths make the finite-slab correction factors identical on
// both sides, so they cancel and the half-space relation survives.

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "cvs/spectral/torus_grid.hpp"

namespace cvs {

struct StabilityConfig {
    double delta0 = 0.5; // in (0, 1/2]
    double eps0 = 0.1;   // flatness threshold on || f ||_{H^2.5}

    void validate() const {
        if (!(delta0 > 0.0 && delta0 <= 0.5))
            throw std::invalid_argument("StabilityConfig: delta0 must lie in (0, 1/2]");
    }
};

// Physical-space traces of v and B on the interface, one 3-vector per
// torus point, plus the front they belong to.
struct InterfaceState {
    TorusGrid grid;
    std::array<std::vector<double>, 3> vp, vm, Bp, Bm;
    FrontField f;

    Eigen::Vector3d at(const std::array<std::vector<double>, 3>& u, int i1, int i2) const {
        const int i = grid.idx(i1, i2);
        return {u[0][i], u[1][i], u[2][i]};
    }
};

struct SyrovatskiiResult {
    bool weak = false;     // both inequalities of the classical pair, with <=
    bool spectral = false; // strict interior condition
    bool strong = false;   // max(|B+ x [u]|, |B- x [u]|) < |B+ x B-|
    double weak_margin = 0.0;
    double spectral_margin = 0.0;
    double strong_margin = 0.0;
};

inline SyrovatskiiResult syrovatskii_predicates(const Eigen::Vector3d& Bp, const Eigen::Vector3d& Bm,
                                                const Eigen::Vector3d& du) {
    const double cpm2 = Bp.cross(Bm).squaredNorm();
    const double cp2 = Bp.cross(du).squaredNorm();
    const double cm2 = Bm.cross(du).squaredNorm();
    SyrovatskiiResult r;
    const double weak_a = 2.0 * (Bp.squaredNorm() + Bm.squaredNorm()) - du.squaredNorm();
    const double weak_b = 2.0 * cpm2 - cp2 - cm2;
    r.weak = weak_a >= 0.0 && weak_b >= 0.0;
    r.weak_margin = std::min(weak_a, weak_b);
    r.spectral = weak_b > 0.0;
    r.spectral_margin = weak_b;
    const double strong = std::sqrt(cpm2) - std::sqrt(std::max(cp2, cm2));
    r.strong = strong > 0.0;
    r.strong_margin = strong;
    return r;
}

struct HypothesesResult {
    bool ok = false;
    int worst_i1 = 0, worst_i2 = 0; // point minimizing the binding margin
    double min_cross = 0.0;         // min |B+ x B-|
    double cross_margin = 0.0;      // min_cross - delta0
    double strong_margin = 0.0;     // min of (1-delta0)|B+ x B-| - max(|B x [v]|)
};

// Pointwise check of |B+ x B-| >= delta0 and
// max(|B+ x [v]|, |B- x [v]|) <= (1 - delta0) |B+ x B-| over the grid.
// Pass delta0/2 in cfg to test the uniform variants.
inline HypothesesResult theorem_hypotheses(const InterfaceState& s, const StabilityConfig& cfg) {
    cfg.validate();
    HypothesesResult r;
    r.min_cross = std::numeric_limits<double>::infinity();
    r.strong_margin = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (int i1 = 0; i1 < s.grid.n1; ++i1)
        for (int i2 = 0; i2 < s.grid.n2; ++i2) {
            const Eigen::Vector3d Bp = s.at(s.Bp, i1, i2), Bm = s.at(s.Bm, i1, i2);
            const Eigen::Vector3d dv = s.at(s.vp, i1, i2) - s.at(s.vm, i1, i2);
            const double cross = Bp.cross(Bm).norm();
            const double mx = std::max(Bp.cross(dv).norm(), Bm.cross(dv).norm());
            const double m1 = cross - cfg.delta0;
            const double m2 = (1.0 - cfg.delta0) * cross - mx;
            r.min_cross = std::min(r.min_cross, cross);
            r.strong_margin = std::min(r.strong_margin, m2);
            const double binding = std::min(m1, m2);
            if (binding < worst) {
                worst = binding;
                r.worst_i1 = i1;
                r.worst_i2 = i2;
            }
        }
    r.cross_margin = r.min_cross - cfg.delta0;
    r.ok = r.cross_margin >= 0.0 && r.strong_margin >= 0.0;
    return r;
}

// Pointwise Cramer solve of
//   lambda+ B1+ - lambda- B1- = [v1],  lambda+ B2+ - lambda- B2- = [v2],
// so that [v' - lambda B'] = 0. The determinant equals, up to sign,
// |B+ x B-| / sqrt(1 + |grad' f|^2) on the interface, hence it stays away
// from zero under the uniform hypothesis.
inline std::pair<FrontField, FrontField> solve_lambda(const InterfaceState& s, const StabilityConfig& cfg) {
    cfg.validate();
    FrontField g1 = s.f.derivative(1, 0), g2 = s.f.derivative(0, 1);
    auto g1p = g1.to_physical(), g2p = g2.to_physical();
    double grad2max = 0.0;
    for (size_t i = 0; i < g1p.size(); ++i)
        grad2max = std::max(grad2max, g1p[i] * g1p[i] + g2p[i] * g2p[i]);
    const double floor = 0.5 * cfg.delta0 / std::sqrt(1.0 + grad2max);

    std::vector<double> lp(s.grid.size()), lm(s.grid.size());
    for (int i1 = 0; i1 < s.grid.n1; ++i1)
        for (int i2 = 0; i2 < s.grid.n2; ++i2) {
            const Eigen::Vector3d Bp = s.at(s.Bp, i1, i2), Bm = s.at(s.Bm, i1, i2);
            const Eigen::Vector3d dv = s.at(s.vp, i1, i2) - s.at(s.vm, i1, i2);
            const double det = -Bp(0) * Bm(1) + Bm(0) * Bp(1);
            if (std::abs(det) < floor)
                throw std::runtime_error("solve_lambda: tangential fields nearly colinear on the interface");
            const int i = s.grid.idx(i1, i2);
            lp[i] = (-dv(0) * Bm(1) + Bm(0) * dv(1)) / det;
            lm[i] = (Bp(0) * dv(1) - dv(0) * Bp(1)) / det;
        }
    return {FrontField::from_physical(s.grid, lp), FrontField::from_physical(s.grid, lm)};
}

// Pointwise solve of B1 d1f + B2 d2f = B3 for both sides; returns grad' f
// and the max-norm discrepancy against the spectral gradient of the stored
// front (a consistency diagnostic of B.N = 0).
struct FrontGradientResult {
    FrontField d1f, d2f;
    double residual = 0.0;
};

inline FrontGradientResult front_gradient_from_B(const InterfaceState& s, double det_floor = 1e-10) {
    std::vector<double> d1(s.grid.size()), d2(s.grid.size());
    for (int i1 = 0; i1 < s.grid.n1; ++i1)
        for (int i2 = 0; i2 < s.grid.n2; ++i2) {
            const Eigen::Vector3d Bp = s.at(s.Bp, i1, i2), Bm = s.at(s.Bm, i1, i2);
            const double det = Bp(0) * Bm(1) - Bp(1) * Bm(0);
            if (std::abs(det) < det_floor)
                throw std::runtime_error("front_gradient_from_B: degenerate tangential fields");
            const int i = s.grid.idx(i1, i2);
            d1[i] = (Bp(2) * Bm(1) - Bp(1) * Bm(2)) / det;
            d2[i] = (Bp(0) * Bm(2) - Bp(2) * Bm(0)) / det;
        }
    FrontGradientResult r;
    r.d1f = FrontField::from_physical(s.grid, d1);
    r.d2f = FrontField::from_physical(s.grid, d2);
    auto e1 = (r.d1f - s.f.derivative(1, 0)).to_physical();
    auto e2 = (r.d2f - s.f.derivative(0, 1)).to_physical();
    for (size_t i = 0; i < e1.size(); ++i)
        r.residual = std::max({r.residual, std::abs(e1[i]), std::abs(e2[i])});
    return r;
}

struct NormalModes {
    std::array<std::complex<double>, 2> tau;
    double growth_rate = 0.0; // max of -Im tau; 0 for neutral modes
    double discriminant = 0.0;
};

// Roots of 2 tau^2 + 2 tau eta.(u+ + u-) + (eta.u+)^2 + (eta.u-)^2
//   - (eta.H+)^2 - (eta.H-)^2 = 0; discriminant/4 reduces to
//   2 (eta.H+)^2 + 2 (eta.H-)^2 - (eta.[u])^2.
inline NormalModes planar_normal_modes(const Eigen::Vector3d& up, const Eigen::Vector3d& um,
                                       const Eigen::Vector3d& Hp, const Eigen::Vector3d& Hm,
                                       const Eigen::Vector2d& eta) {
    if (eta.squaredNorm() == 0.0) throw std::invalid_argument("planar_normal_modes: eta must be nonzero");
    const double a = eta(0) * up(0) + eta(1) * up(1);
    const double b = eta(0) * um(0) + eta(1) * um(1);
    const double hp = eta(0) * Hp(0) + eta(1) * Hp(1);
    const double hm = eta(0) * Hm(0) + eta(1) * Hm(1);
    const double disc = 2.0 * hp * hp + 2.0 * hm * hm - (a - b) * (a - b);
    NormalModes r;
    r.discriminant = disc;
    const double mid = -0.5 * (a + b);
    if (disc >= 0.0) {
        const double s = 0.5 * std::sqrt(disc);
        r.tau = {std::complex<double>(mid - s, 0.0), std::complex<double>(mid + s, 0.0)};
        r.growth_rate = 0.0;
    } else {
        const double s = 0.5 * std::sqrt(-disc);
        r.tau = {std::complex<double>(mid, -s), std::complex<double>(mid, s)};
        r.growth_rate = s;
    }
    return r;
}

struct EtaSweepRow {
    double angle;
    double discriminant;
    double growth_rate;
};

// 256 uniformly spaced directions on the unit circle; the dispersion is
// homogeneous in |eta| so the unit circle decides stability.
inline std::vector<EtaSweepRow> eta_sweep(const Eigen::Vector3d& up, const Eigen::Vector3d& um,
                                          const Eigen::Vector3d& Hp, const Eigen::Vector3d& Hm,
                                          int n_angles = 256) {
    std::vector<EtaSweepRow> rows;
    rows.reserve(n_angles);
    for (int j = 0; j < n_angles; ++j) {
        const double th = kTwoPi * j / n_angles;
        auto nm = planar_normal_modes(up, um, Hp, Hm, {std::cos(th), std::sin(th)});
        rows.push_back({th, nm.discriminant, nm.growth_rate});
    }
    return rows;
}

} // namespace cvs
