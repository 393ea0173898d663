#pragma once

// Volume lifting of a front: psi(x', x3) = (1 - x3^2) chi(x3 |D|) f(x'),
// applied per Fourier mode as c_k -> (1 - x3^2) chi(x3 |k|) c_k. The x3
// derivative at the interface comes from the closed form
//   d3 psi = -2 x3 chi(x3|D|) f + (1 - x3^2) chi'(x3|D|) |D| f,
// which vanishes at x3 = 0 because chi' = 0 near the origin.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "cvs/spectral/volume_field.hpp"

namespace cvs {

// Smooth cutoff chi in C_0^inf(R) with chi = 1 on [-1,1] and support in
// [-S, S]. The default is the standard bump transition.
class CutoffProfile {
  public:
    using Fn = std::function<double(double)>;

    CutoffProfile(Fn chi, Fn chi_prime, double support)
        : chi_(std::move(chi)), chi_prime_(std::move(chi_prime)), support_(support) {
        if (support_ <= 1.0) throw std::invalid_argument("CutoffProfile: support radius must exceed 1");
    }

    static CutoffProfile standard_bump(double support = 2.0) {
        const double S = support;
        auto chi = [S](double s) {
            double a = std::abs(s);
            if (a <= 1.0) return 1.0;
            if (a >= S) return 0.0;
            double r = (a - 1.0) / (S - 1.0);
            return std::exp(1.0 - 1.0 / (1.0 - r * r));
        };
        auto dchi = [S](double s) {
            double a = std::abs(s);
            if (a <= 1.0 || a >= S) return 0.0;
            double r = (a - 1.0) / (S - 1.0);
            double u = 1.0 - r * r;
            double val = std::exp(1.0 - 1.0 / u) * (-2.0 * r / (u * u)) / (S - 1.0);
            return s < 0.0 ? -val : val;
        };
        return CutoffProfile(chi, dchi, S);
    }

    double operator()(double s) const { return chi_(s); }
    double prime(double s) const { return chi_prime_(s); }
    double support() const { return support_; }

  private:
    Fn chi_, chi_prime_;
    double support_;
};

// The lifted front on both half-domains plus its analytic x3 derivative.
struct LiftedFront {
    FrontField source;
    VolumeField psi_plus, psi_minus;       // scalar slabs
    VolumeField d3psi_plus, d3psi_minus;   // closed-form x3 derivative

    const VolumeField& psi(Side s) const { return s == Side::plus ? psi_plus : psi_minus; }
    const VolumeField& d3psi(Side s) const { return s == Side::plus ? d3psi_plus : d3psi_minus; }

    // chi'(0) = 0 forces this to vanish identically; kept as a diagnostic.
    FrontField d3_interface() const { return d3psi_plus.trace(Wall::interface); }
};

namespace detail {

inline void lift_on_slab(const FrontField& f, const CutoffProfile& chi, const SlabGrid& g,
                         VolumeField& psi, VolumeField& d3psi) {
    const auto& t = g.torus();
    const auto& fft = Fft2::get(t.n1, t.n2);
    const int nh = t.size();
    psi = VolumeField::scalar(g);
    d3psi = VolumeField::scalar(g);
    std::vector<cplx> c(nh), dc(nh);
    std::vector<double> phys;
    for (int j3 = 0; j3 < g.n3(); ++j3) {
        const double z = g.x3(j3);
        const double poly = 1.0 - z * z;
        for (int i1 = 0; i1 < t.n1; ++i1)
            for (int i2 = 0; i2 < t.n2; ++i2) {
                const double kk = std::hypot(static_cast<double>(t.wave1(i1)),
                                             static_cast<double>(t.wave2(i2)));
                const cplx ck = f.at(i1, i2);
                const double x = chi(z * kk);
                c[t.idx(i1, i2)] = poly * x * ck;
                dc[t.idx(i1, i2)] = (-2.0 * z * x + poly * chi.prime(z * kk) * kk) * ck;
            }
        fft.backward(c, phys);
        std::copy_n(phys.begin(), nh, psi.data(0).begin() + static_cast<size_t>(j3) * nh);
        fft.backward(dc, phys);
        std::copy_n(phys.begin(), nh, d3psi.data(0).begin() + static_cast<size_t>(j3) * nh);
    }
}

} // namespace detail

inline LiftedFront lift(const FrontField& f, const SlabGrid& plus, const SlabGrid& minus,
                        const CutoffProfile& chi) {
    if (plus.side() != Side::plus || minus.side() != Side::minus)
        throw std::invalid_argument("lift: slab sides mismatched");
    LiftedFront out;
    out.source = f;
    detail::lift_on_slab(f, chi, plus, out.psi_plus, out.d3psi_plus);
    detail::lift_on_slab(f, chi, minus, out.psi_minus, out.d3psi_minus);
    return out;
}

struct DiffeoCheck {
    bool ok = false;
    double margin = 0.0;   // 1/2 - max |grad psi| when ok
    double grad_max = 0.0; // pointwise Euclidean norm, maximized on the grid
};

inline DiffeoCheck check_diffeomorphism(const LiftedFront& lf) {
    double m = 0.0;
    for (Side s : {Side::plus, Side::minus}) {
        const auto& psi = lf.psi(s);
        VolumeField g1 = psi.tangential_derivative(1, 0);
        VolumeField g2 = psi.tangential_derivative(0, 1);
        const auto& g3 = lf.d3psi(s);
        for (size_t i = 0; i < g1.data(0).size(); ++i) {
            double a = g1.data(0)[i], b = g2.data(0)[i], c = g3.data(0)[i];
            m = std::max(m, std::sqrt(a * a + b * b + c * c));
        }
    }
    DiffeoCheck out;
    out.grad_max = m;
    out.ok = m < 0.5;
    out.margin = 0.5 - m;
    return out;
}

// || psi ||_{H^m(Omega)} / || f ||_{H^{m-1/2}(T^2)}, evaluated per mode on
// a fine 1-D Chebyshev grid over (-1,1) so the ratio does not depend on the
// slab resolution. m in 1..4.
inline double lifting_norm_ratio(const FrontField& f, int m, const CutoffProfile& chi,
                                 int fine_n = 129) {
    if (m < 1 || m > 4) throw std::invalid_argument("lifting_norm_ratio: m must be in 1..4");
    const double fnorm = sobolev_norm_torus(f, m - 0.5);
    if (fnorm == 0.0) throw std::invalid_argument("lifting_norm_ratio: zero front");

    const auto t = cheb_nodes(fine_n);
    const Eigen::MatrixXd D = cheb_diff_matrix(fine_n);
    const auto w = clenshaw_curtis_weights(fine_n);
    const auto& g = f.grid();

    double total = 0.0;
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            const double c2 = std::norm(f.at(i1, i2));
            if (c2 == 0.0) continue;
            const double k1 = kTwoPi * g.wave1(i1), k2 = kTwoPi * g.wave2(i2);
            const double kk = std::hypot(static_cast<double>(g.wave1(i1)),
                                         static_cast<double>(g.wave2(i2)));
            // mode profile and its x3 derivatives on the fine grid
            std::vector<Eigen::VectorXd> dp(m + 1, Eigen::VectorXd(fine_n));
            for (int j = 0; j < fine_n; ++j)
                dp[0](j) = (1.0 - t[j] * t[j]) * chi(t[j] * kk);
            for (int a = 1; a <= m; ++a) dp[a] = D * dp[a - 1];
            for (int a1 = 0; a1 <= m; ++a1)
                for (int a2 = 0; a1 + a2 <= m; ++a2)
                    for (int a3 = 0; a1 + a2 + a3 <= m; ++a3) {
                        double prof = 0.0;
                        for (int j = 0; j < fine_n; ++j) prof += w[j] * dp[a3](j) * dp[a3](j);
                        total += std::pow(k1 * k1, a1) * std::pow(k2 * k2, a2) * prof * c2;
                    }
        }
    return std::sqrt(total) / fnorm;
}

} // namespace cvs
