#pragma once

// The three energy functionals and the per-sample diagnostic record.
//
//   E = ||v,B||_m^2 + ||Q||_m^2 + ||f||_{m+1/2}^2 + ||dt f||_{m-1/2}^2
//   H = 1/2 sum_pm sum_{|alpha|<=3} int (da v, da B) [[1,-lambda],[-lambda,1]] (da v, da B)
//   K = 1/2 sum_pm sum_{|beta|<=2} int |d^beta zeta|^2 + |d^beta xi|^2
//
// E uses a configurable order m (default 3; the orders scale as
// m, m, m+1/2, m-1/2); H uses tangential derivatives only with lambda
// extended constant in x3; K uses all derivatives up to order 2.

#include <fstream>
#include <optional>

#include <json.hpp>

#include "cvs/evolution/evolution.hpp"

namespace cvs {

inline double functional_E(const PlasmaState& s, int m = 3) {
    auto sq = [](double x) { return x * x; };
    double e = 0.0;
    e += sq(sobolev_norm_volume(s.vp, m)) + sq(sobolev_norm_volume(s.vm, m));
    e += sq(sobolev_norm_volume(s.Bp, m)) + sq(sobolev_norm_volume(s.Bm, m));
    e += sq(sobolev_norm_volume(s.Qp, m)) + sq(sobolev_norm_volume(s.Qm, m));
    e += sq(sobolev_norm_torus(s.f, m + 0.5));
    e += sq(sobolev_norm_torus(s.f_t, m - 0.5));
    return e;
}

// lambda given on the interface, extended constant in x3 on each side.
inline double functional_H(const PlasmaState& s, const FrontField& lambda_p, const FrontField& lambda_m) {
    auto lp = lambda_p.to_physical();
    auto lm = lambda_m.to_physical();
    for (double l : lp)
        if (std::abs(l) >= 1.0) throw std::invalid_argument("functional_H: |lambda+| must stay below 1");
    for (double l : lm)
        if (std::abs(l) >= 1.0) throw std::invalid_argument("functional_H: |lambda-| must stay below 1");

    double total = 0.0;
    auto side = [&](const VolumeField& v, const VolumeField& B, const std::vector<double>& lam) {
        const auto& g = v.grid();
        const int nh = g.torus().size();
        const auto& w = g.weights3();
        for (int a1 = 0; a1 <= 3; ++a1)
            for (int a2 = 0; a1 + a2 <= 3; ++a2) {
                VolumeField va = v.tangential_derivative(a1, a2);
                VolumeField Ba = B.tangential_derivative(a1, a2);
                for (int j = 0; j < g.n3(); ++j) {
                    double lvl = 0.0;
                    for (int i = 0; i < nh; ++i) {
                        const size_t m = static_cast<size_t>(j) * nh + i;
                        double dot = 0.0, nv = 0.0, nB = 0.0;
                        for (int c = 0; c < 3; ++c) {
                            nv += va.data(c)[m] * va.data(c)[m];
                            nB += Ba.data(c)[m] * Ba.data(c)[m];
                            dot += va.data(c)[m] * Ba.data(c)[m];
                        }
                        lvl += nv + nB - 2.0 * lam[i] * dot;
                    }
                    total += w[j] * lvl / nh;
                }
            }
    };
    side(s.vp, s.Bp, lp);
    side(s.vm, s.Bm, lm);
    return 0.5 * total;
}

inline double functional_K(const CurlState& c) {
    auto sq = [](double x) { return x * x; };
    return 0.5 * (sq(sobolev_norm_volume(c.zeta_p, 2)) + sq(sobolev_norm_volume(c.zeta_m, 2)) +
                  sq(sobolev_norm_volume(c.xi_p, 2)) + sq(sobolev_norm_volume(c.xi_m, 2)));
}

struct EnergyReport {
    double time = 0.0;
    double E = 0.0;
    std::optional<double> H; // absent when lambda is undefined (degenerate B)
    double K = 0.0;
    std::optional<double> lambda_bound;
    double stability_cross_min = 0.0;   // min |B+ x B-| on the interface
    double stability_strong_margin = 0.0;
    double flatness = 0.0; // ||f||_{H^2.5}
    double div_v = 0.0, div_B = 0.0;
    double curl_identity_residual = 0.0;
    double jump_vN = 0.0;              // |[v.N]| on the interface
    double normal_B = 0.0;             // max |B.N| on the interface
    double wall_v3 = 0.0, wall_B3 = 0.0;
    double jump_Q = 0.0;
    double trace_mismatch = 0.0; // disagreement of the two dt f traces
    double compatibility_residual = 0.0;
    double diffeo_margin = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j{{"time", time},
                         {"E", E},
                         {"K", K},
                         {"stability_cross_min", stability_cross_min},
                         {"stability_strong_margin", stability_strong_margin},
                         {"flatness", flatness},
                         {"div_v", div_v},
                         {"div_B", div_B},
                         {"curl_identity_residual", curl_identity_residual},
                         {"jump_vN", jump_vN},
                         {"normal_B", normal_B},
                         {"wall_v3", wall_v3},
                         {"wall_B3", wall_B3},
                         {"jump_Q", jump_Q},
                         {"trace_mismatch", trace_mismatch},
                         {"compatibility_residual", compatibility_residual},
                         {"diffeo_margin", diffeo_margin}};
        j["H"] = H ? nlohmann::json(*H) : nlohmann::json();
        j["lambda_bound"] = lambda_bound ? nlohmann::json(*lambda_bound) : nlohmann::json();
        return j;
    }
};

inline EnergyReport report(const EvolveContext& ctx, PlasmaState& s, const StabilityConfig& cfg = {}) {
    EnergyReport r;
    r.time = s.time;
    r.E = functional_E(s);
    s.f_t = front_rate(s, &r.trace_mismatch);
    LiftedFront lf = lift(s.f, ctx.plus, ctx.minus, ctx.chi);
    auto dc = check_diffeomorphism(lf);
    r.diffeo_margin = dc.margin;
    if (!dc.ok) throw HypothesisError("report: front too steep");
    GeometryBundle geom = build_geometry(lf, lift(s.f_t, ctx.plus, ctx.minus, ctx.chi));

    InterfaceState is = interface_state(s);
    auto hyp = theorem_hypotheses(is, cfg);
    r.stability_cross_min = hyp.min_cross;
    r.stability_strong_margin = hyp.strong_margin;
    r.flatness = sobolev_norm_torus(s.f, 2.5);

    CurlState cs;
    cs.zeta_p = curl_transformed(geom.plus, s.vp);
    cs.zeta_m = curl_transformed(geom.minus, s.vm);
    cs.xi_p = curl_transformed(geom.plus, s.Bp);
    cs.xi_m = curl_transformed(geom.minus, s.Bm);
    r.K = functional_K(cs);
    r.curl_identity_residual =
        std::max({curl_inversion_residual(geom.plus, s.vp, cs.zeta_p),
                  curl_inversion_residual(geom.minus, s.vm, cs.zeta_m),
                  curl_inversion_residual(geom.plus, s.Bp, cs.xi_p),
                  curl_inversion_residual(geom.minus, s.Bm, cs.xi_m)});

    try {
        auto [lp, lm] = solve_lambda(is, cfg);
        r.lambda_bound = std::max(lp.max_abs(), lm.max_abs());
        if (*r.lambda_bound < 1.0) r.H = functional_H(s, lp, lm);
    } catch (const std::runtime_error&) {
        // degenerate tangential fields: lambda and H are undefined
    }

    r.div_v = std::max(div_transformed(geom.plus, s.vp).l2_norm(),
                       div_transformed(geom.minus, s.vm).l2_norm());
    r.div_B = std::max(div_transformed(geom.plus, s.Bp).l2_norm(),
                       div_transformed(geom.minus, s.Bm).l2_norm());

    r.jump_vN = (normal_trace(s.f, s.vp) - normal_trace(s.f, s.vm)).max_abs();
    r.normal_B = std::max(normal_trace(s.f, s.Bp).max_abs(), normal_trace(s.f, s.Bm).max_abs());
    r.wall_v3 = std::max(s.vp.trace(Wall::top, 2).max_abs(), s.vm.trace(Wall::bottom, 2).max_abs());
    r.wall_B3 = std::max(s.Bp.trace(Wall::top, 2).max_abs(), s.Bm.trace(Wall::bottom, 2).max_abs());
    r.jump_Q = (s.Qp.trace(Wall::interface) - s.Qm.trace(Wall::interface)).max_abs();

    PressureProblem prob;
    prob.geometry = &geom;
    prob.Fp = assemble_F(geom.plus, s.vp, s.Bp);
    prob.Fm = assemble_F(geom.minus, s.vm, s.Bm);
    prob.G = assemble_G(is, s.f_t);
    const double scale = std::max({1.0, multiply(geom.plus.J, prob.Fp).l2_norm(),
                                   multiply(geom.minus.J, prob.Fm).l2_norm()});
    r.compatibility_residual = std::abs(check_compatibility(prob)) / scale;
    return r;
}

// JSON-lines stream, one object per sample time.
class ReportWriter {
  public:
    explicit ReportWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("ReportWriter: cannot open " + path);
    }
    void write(const EnergyReport& r) { out_ << r.to_json().dump() << "\n"; }
    void flush() { out_.flush(); }

  private:
    std::ofstream out_;
};

} // namespace cvs
