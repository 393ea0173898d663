#pragma once

// Run orchestration: config file parsing (key = value lines, '#' comments),
// scenario presets, and the time loop
//   geometry -> pressure -> rhs -> step -> project -> sample.
//
// Scenario perturbations use the exact linear eigenmode of the planar
// problem (docs/dispersion.md): for front mode k with eta = 2 pi k,
// sigma = tau + eta.u, h = eta.H and kappa = |eta|,
//   qhat(x3)  = Qhat cosh(kappa (x3 -+ 1)),  Qhat = -(sigma+^2 - h+^2) fhat / (kappa sinh kappa),
//   vhat'     = -eta sigma qhat / (sigma^2 - h^2),
//   vhat3     = i sigma d3 qhat / (sigma^2 - h^2),
//   bhat      = (h / sigma) vhat,
// which satisfies walls, tangency, and the pressure jump by construction.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "cvs/diagnostics/diagnostics.hpp"
#include "cvs/io/checkpoint.hpp"
#include "cvs/io/svg.hpp"

namespace cvs {

struct RunConfig {
    int n1 = 32, n2 = 32, n3 = 17;
    double dt = 0.0; // 0: follow the CFL bound each step
    double cfl = 0.5;
    double t_end = 0.1;
    int steps = 0; // when > 0, overrides t_end
    std::string scenario = "current-sheet";
    double eps = 0.0; // perturbation amplitude
    int kx = 1, ky = 0;
    std::array<double, 3> Bp{1.0, 0.0, 0.0}, Bm{0.0, 1.0, 0.0};
    std::array<double, 3> vp{0.0, 0.0, 0.0}, vm{0.0, 0.0, 0.0};
    double delta0 = 0.5, eps0 = 0.1;
    std::string output_dir = ".";
    int sample_every = 1;
    bool reproducible = true;
    double chi_support = 2.0;
    double pressure_tol = 1e-10;
    int pressure_iters = 400;
    double compat_tol = 1e-8;

    void validate() const {
        if (n1 < 2 || n2 < 2 || n3 < 3 || n1 % 2 || n2 % 2)
            throw ConfigError("grid sizes must be even (n1, n2) and n3 >= 3");
        if (!(delta0 > 0.0 && delta0 <= 0.5)) throw ConfigError("delta0 must lie in (0, 1/2]");
        if (steps <= 0 && t_end <= 0.0) throw ConfigError("end time must be positive");
        if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
        if (chi_support <= 1.0) throw ConfigError("chi_support must exceed 1");
    }

    void set(const std::string& key, const std::string& value);
    std::string to_string() const;
};

namespace detail {

inline std::array<double, 3> parse_vec3(const std::string& s) {
    std::array<double, 3> v{};
    std::stringstream ss(s);
    std::string tok;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, tok, ',')) throw ConfigError("expected three comma-separated values: " + s);
        v[i] = std::stod(tok);
    }
    return v;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
    try {
        if (key == "n1") n1 = std::stoi(value);
        else if (key == "n2") n2 = std::stoi(value);
        else if (key == "n3") n3 = std::stoi(value);
        else if (key == "dt") dt = std::stod(value);
        else if (key == "cfl") cfl = std::stod(value);
        else if (key == "t_end") t_end = std::stod(value);
        else if (key == "steps") steps = std::stoi(value);
        else if (key == "scenario") scenario = value;
        else if (key == "eps") eps = std::stod(value);
        else if (key == "kx") kx = std::stoi(value);
        else if (key == "ky") ky = std::stoi(value);
        else if (key == "Bp") Bp = detail::parse_vec3(value);
        else if (key == "Bm") Bm = detail::parse_vec3(value);
        else if (key == "vp") vp = detail::parse_vec3(value);
        else if (key == "vm") vm = detail::parse_vec3(value);
        else if (key == "delta0") delta0 = std::stod(value);
        else if (key == "eps0") eps0 = std::stod(value);
        else if (key == "output_dir") output_dir = value;
        else if (key == "sample_every") sample_every = std::stoi(value);
        else if (key == "reproducible") reproducible = (value == "true" || value == "1");
        else if (key == "chi_support") chi_support = std::stod(value);
        else if (key == "pressure_tol") pressure_tol = std::stod(value);
        else if (key == "pressure_iters") pressure_iters = std::stoi(value);
        else if (key == "compat_tol") compat_tol = std::stod(value);
        else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
}

inline std::string RunConfig::to_string() const {
    std::ostringstream o;
    o.precision(17);
    auto v3 = [](const std::array<double, 3>& v) {
        std::ostringstream s;
        s.precision(17);
        s << v[0] << "," << v[1] << "," << v[2];
        return s.str();
    };
    o << "n1 = " << n1 << "\nn2 = " << n2 << "\nn3 = " << n3 << "\ndt = " << dt << "\ncfl = " << cfl
      << "\nt_end = " << t_end << "\nsteps = " << steps << "\nscenario = " << scenario
      << "\neps = " << eps << "\nkx = " << kx << "\nky = " << ky << "\nBp = " << v3(Bp)
      << "\nBm = " << v3(Bm) << "\nvp = " << v3(vp) << "\nvm = " << v3(vm) << "\ndelta0 = " << delta0
      << "\neps0 = " << eps0 << "\noutput_dir = " << output_dir << "\nsample_every = " << sample_every
      << "\nreproducible = " << (reproducible ? "true" : "false") << "\nchi_support = " << chi_support
      << "\npressure_tol = " << pressure_tol << "\npressure_iters = " << pressure_iters
      << "\ncompat_tol = " << compat_tol << "\n";
    return o.str();
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        cfg.set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline EvolveContext make_context(const RunConfig& cfg) {
    cfg.validate();
    EvolveContext ctx(TorusGrid(cfg.n1, cfg.n2), cfg.n3);
    ctx.chi = CutoffProfile::standard_bump(cfg.chi_support);
    ctx.pressure_tol = cfg.pressure_tol;
    ctx.pressure_iters = cfg.pressure_iters;
    ctx.compat_tol = cfg.compat_tol;
    ctx.cfl = cfg.cfl;
    return ctx;
}

// Planar background plus the linear eigenmode of front mode (kx, ky) at
// amplitude eps. pick_growing selects the exponentially growing root when
// one exists, otherwise the first (real) root.
inline PlasmaState eigenmode_state(const EvolveContext& ctx, const RunConfig& cfg, bool pick_growing) {
    PlasmaState s = PlasmaState::zero(ctx.plus, ctx.minus);
    const Eigen::Vector3d up(cfg.vp[0], cfg.vp[1], 0.0), um(cfg.vm[0], cfg.vm[1], 0.0);
    const Eigen::Vector3d Hp(cfg.Bp[0], cfg.Bp[1], 0.0), Hm(cfg.Bm[0], cfg.Bm[1], 0.0);
    const Eigen::Vector2d eta(kTwoPi * cfg.kx, kTwoPi * cfg.ky);

    std::complex<double> tau;
    double kappa = 0.0;
    std::complex<double> fhat{0.0, 0.0};
    if (cfg.eps != 0.0) {
        if (cfg.kx == 0 && cfg.ky == 0) throw ConfigError("perturbation mode must be nonzero");
        auto nm = planar_normal_modes(up, um, Hp, Hm, eta);
        tau = nm.tau[0];
        if (pick_growing && nm.growth_rate > 0.0)
            tau = nm.tau[0].imag() < 0.0 ? nm.tau[0] : nm.tau[1];
        kappa = eta.norm();
        fhat = 0.5 * cfg.eps;
    }

    auto build_side = [&](Side sd, const Eigen::Vector3d& u, const Eigen::Vector3d& H, VolumeField& v,
                          VolumeField& B, VolumeField& Q) {
        const SlabGrid& g = sd == Side::plus ? ctx.plus : ctx.minus;
        const double wall = sd == Side::plus ? 1.0 : -1.0;
        using C = std::complex<double>;
        const C sig = tau + C(eta(0) * u(0) + eta(1) * u(1));
        const double h = eta(0) * H(0) + eta(1) * H(1);
        C Qhat{0.0, 0.0};
        C denom{1.0, 0.0};
        if (cfg.eps != 0.0) {
            denom = sig * sig - h * h;
            if (std::abs(denom) < 1e-14) throw ConfigError("degenerate eigenmode: sigma^2 = h^2");
            // the dispersion relation makes sigma^2 - h^2 change sign across
            // the interface; the opposite Qhat signs keep [Q] = 0 and both
            // kinematic conditions consistent
            Qhat = -wall * denom * fhat / (kappa * std::sinh(kappa));
        }
        auto phase = [&](double x1, double x2) {
            const double th = kTwoPi * (cfg.kx * x1 + cfg.ky * x2);
            return C(std::cos(th), std::sin(th));
        };
        auto qprof = [&](double x3) { return Qhat * std::cosh(kappa * (x3 - wall)); };
        auto dqprof = [&](double x3) { return Qhat * kappa * std::sinh(kappa * (x3 - wall)); };
        auto re2 = [](const C& c) { return 2.0 * c.real(); };

        v = VolumeField::sample_vector(
            g,
            [&](double x1, double x2, double x3) {
                return u(0) + (cfg.eps != 0.0
                                   ? re2(phase(x1, x2) * (-eta(0) * sig * qprof(x3) / denom))
                                   : 0.0);
            },
            [&](double x1, double x2, double x3) {
                return u(1) + (cfg.eps != 0.0
                                   ? re2(phase(x1, x2) * (-eta(1) * sig * qprof(x3) / denom))
                                   : 0.0);
            },
            [&](double x1, double x2, double x3) {
                return cfg.eps != 0.0 ? re2(phase(x1, x2) * (C(0.0, 1.0) * sig * dqprof(x3) / denom))
                                      : 0.0;
            });
        B = VolumeField::sample_vector(
            g,
            [&](double x1, double x2, double x3) {
                return H(0) + (cfg.eps != 0.0 && std::abs(sig) > 1e-14
                                   ? re2(phase(x1, x2) * (h / sig) * (-eta(0) * sig * qprof(x3) / denom))
                                   : 0.0);
            },
            [&](double x1, double x2, double x3) {
                return H(1) + (cfg.eps != 0.0 && std::abs(sig) > 1e-14
                                   ? re2(phase(x1, x2) * (h / sig) * (-eta(1) * sig * qprof(x3) / denom))
                                   : 0.0);
            },
            [&](double x1, double x2, double x3) {
                return cfg.eps != 0.0 && std::abs(sig) > 1e-14
                           ? re2(phase(x1, x2) * (h / sig) * (C(0.0, 1.0) * sig * dqprof(x3) / denom))
                           : 0.0;
            });
        Q = VolumeField::sample_scalar(g, [&](double x1, double x2, double x3) {
            return cfg.eps != 0.0 ? re2(phase(x1, x2) * qprof(x3)) : 0.0;
        });
    };
    build_side(Side::plus, up, Hp, s.vp, s.Bp, s.Qp);
    build_side(Side::minus, um, Hm, s.vm, s.Bm, s.Qm);

    if (cfg.eps != 0.0) {
        const int i1 = (cfg.kx % cfg.n1 + cfg.n1) % cfg.n1;
        const int i2 = (cfg.ky % cfg.n2 + cfg.n2) % cfg.n2;
        const int j1 = ((-cfg.kx) % cfg.n1 + cfg.n1) % cfg.n1;
        const int j2 = ((-cfg.ky) % cfg.n2 + cfg.n2) % cfg.n2;
        s.f = FrontField(ctx.plus.torus());
        s.f.at(i1, i2) = fhat;
        s.f.at(j1, j2) = std::conj(fhat);
        const cplx fthat = cplx{0.0, 1.0} * tau * fhat;
        s.f_t = FrontField(ctx.plus.torus());
        s.f_t.at(i1, i2) = fthat;
        s.f_t.at(j1, j2) = std::conj(fthat);
    }
    return s;
}

// Front-only perturbation at constant background fields.
inline PlasmaState background_state(const EvolveContext& ctx, const RunConfig& cfg) {
    PlasmaState s = PlasmaState::zero(ctx.plus, ctx.minus);
    auto fill_const = [](VolumeField& u, const std::array<double, 3>& c) {
        for (int i = 0; i < 3; ++i) std::fill(u.data(i).begin(), u.data(i).end(), c[i]);
    };
    fill_const(s.vp, cfg.vp);
    fill_const(s.vm, cfg.vm);
    fill_const(s.Bp, cfg.Bp);
    fill_const(s.Bm, cfg.Bm);
    if (cfg.eps != 0.0)
        s.f = FrontField::sample(ctx.plus.torus(), [&](double x1, double x2) {
            return cfg.eps * std::cos(kTwoPi * (cfg.kx * x1 + cfg.ky * x2));
        });
    return s;
}

inline PlasmaState scenario(const EvolveContext& ctx, const RunConfig& cfg) {
    RunConfig c = cfg;
    StabilityConfig scfg{cfg.delta0, cfg.eps0};
    if (cfg.scenario == "zero") {
        c.eps = 0.0;
        std::array<double, 3> z{0.0, 0.0, 0.0};
        c.vp = c.vm = c.Bp = c.Bm = z;
        return background_state(ctx, c);
    }
    if (cfg.scenario == "current-sheet") {
        c.vm = c.vp; // a current sheet has no velocity jump
        PlasmaState s = background_state(ctx, c);
        if (!theorem_hypotheses(interface_state(s), scfg).ok)
            throw HypothesisError("current-sheet: stability hypotheses fail at delta0 = " +
                                  std::to_string(cfg.delta0));
        return s;
    }
    if (cfg.scenario == "vortex-sheet-stable") {
        if (c.vp == c.vm) {
            c.vp = {0.15, 0.0, 0.0};
            c.vm = {-0.15, 0.0, 0.0};
        }
        PlasmaState s = eigenmode_state(ctx, c, false);
        if (!theorem_hypotheses(interface_state(s), scfg).ok)
            throw HypothesisError("vortex-sheet-stable: stability hypotheses fail");
        return s;
    }
    if (cfg.scenario == "vortex-sheet-boundary") {
        c.vp = {0.5, 0.5, 0.0};
        c.vm = {-0.5, -0.5, 0.0};
        std::cerr << "warning: parameters sit on the spectral stability boundary\n";
        return background_state(ctx, c);
    }
    if (cfg.scenario == "kelvin-helmholtz-unstable") {
        std::array<double, 3> z{0.0, 0.0, 0.0};
        c.Bp = c.Bm = z;
        if (c.vp == c.vm) {
            c.vp = {0.5, 0.0, 0.0};
            c.vm = {-0.5, 0.0, 0.0};
        }
        std::cerr << "warning: Kelvin-Helmholtz configuration, expect exponential growth\n";
        return eigenmode_state(ctx, c, true);
    }
    if (cfg.scenario == "manufactured") {
        // closed-form data: shear flow with zero transport nonlinearity,
        // so F = 0, G = 0, Q = 0
        PlasmaState s = PlasmaState::zero(ctx.plus, ctx.minus);
        for (VolumeField* u : {&s.vp, &s.vm})
            u->fill(0, [](double, double x2, double) { return std::sin(kTwoPi * x2); });
        return s;
    }
    throw ConfigError("unknown scenario: " + cfg.scenario);
}

struct RunResult {
    PlasmaState final_state;
    std::vector<EnergyReport> samples;
};

inline RunResult run(const RunConfig& cfg) {
    cfg.validate();
    EvolveContext ctx = make_context(cfg);
    StabilityConfig scfg{cfg.delta0, cfg.eps0};
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    {
        std::ofstream o(fs::path(cfg.output_dir) / "resolved_config.cfg");
        o << cfg.to_string();
    }

    RunResult res;
    PlasmaState s = scenario(ctx, cfg);
    project_divergence(ctx, s);

    ReportWriter writer((fs::path(cfg.output_dir) / "diagnostics.jsonl").string());
    std::ofstream csv(fs::path(cfg.output_dir) / "energy.csv");
    csv.precision(17);
    csv << "time,E,H,K,flatness,stability_cross_min,stability_strong_margin\n";
    auto sample = [&](PlasmaState& st) {
        EnergyReport r = report(ctx, st, scfg);
        writer.write(r);
        csv << r.time << "," << r.E << "," << (r.H ? *r.H : std::nan("")) << "," << r.K << ","
            << r.flatness << "," << r.stability_cross_min << "," << r.stability_strong_margin << "\n";
        res.samples.push_back(r);
    };

    sample(s);
    const int max_steps = cfg.steps > 0 ? cfg.steps : std::numeric_limits<int>::max();
    int n = 0;
    while (n < max_steps && (cfg.steps > 0 || s.time < cfg.t_end - 1e-14)) {
        double dt = cfl_limit(ctx, s);
        if (cfg.dt > 0.0) {
            if (cfg.dt > dt) throw CflError("configured dt exceeds the CFL bound");
            dt = cfg.dt;
        } else if (!std::isfinite(dt)) {
            dt = cfg.steps > 0 ? 1e-2 : cfg.t_end - s.time;
        }
        if (cfg.steps == 0 && s.time + dt > cfg.t_end) dt = cfg.t_end - s.time;
        step(ctx, s, dt);
        ++n;
        if (n % cfg.sample_every == 0) sample(s);
    }

    write_state((fs::path(cfg.output_dir) / "final_state.ckpt").string(), s);
    // plots: energy traces, stability margins, final front profile
    std::vector<double> t;
    PlotSeries pe{"E", {}, {}}, ph{"H", {}, {}}, pk{"K", {}, {}};
    PlotSeries m1{"cross_min", {}, {}}, m2{"strong_margin", {}, {}};
    for (const auto& r : res.samples) {
        pe.x.push_back(r.time);
        pe.y.push_back(r.E);
        pk.x.push_back(r.time);
        pk.y.push_back(r.K);
        if (r.H) {
            ph.x.push_back(r.time);
            ph.y.push_back(*r.H);
        }
        m1.x.push_back(r.time);
        m1.y.push_back(r.stability_cross_min);
        m2.x.push_back(r.time);
        m2.y.push_back(r.stability_strong_margin);
    }
    write_svg_lines((fs::path(cfg.output_dir) / "energies.svg").string(), "energy functionals",
                    {pe, ph, pk});
    write_svg_lines((fs::path(cfg.output_dir) / "margins.svg").string(), "stability margins", {m1, m2});
    PlotSeries front{"f(x1, 0)", {}, {}};
    auto fphys = s.f.to_physical();
    for (int i = 0; i < cfg.n1; ++i) {
        front.x.push_back(static_cast<double>(i) / cfg.n1);
        front.y.push_back(fphys[s.f.grid().idx(i, 0)]);
    }
    write_svg_lines((fs::path(cfg.output_dir) / "front.svg").string(), "front snapshot", {front});

    res.final_state = s;
    return res;
}

} // namespace cvs
