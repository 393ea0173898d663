#pragma once

// Scalar or 3-vector field on one half-domain. Values are stored in
// physical space, level-major: idx = j3 * (n1*n2) + i1*n2 + i2.
// Tangential derivatives go through the FFT, x3 derivatives through the
// slab's collocation matrix.

#include <functional>
#include <stdexcept>
#include <vector>

#include "cvs/spectral/slab_grid.hpp"

namespace cvs {

class VolumeField {
  public:
    VolumeField() = default;
    VolumeField(const SlabGrid& g, int ncomp) : grid_(g), comp_(ncomp) {
        if (ncomp != 1 && ncomp != 3)
            throw std::invalid_argument("VolumeField: component count must be 1 or 3");
        for (auto& c : comp_) c.assign(static_cast<size_t>(g.torus().size()) * g.n3(), 0.0);
    }

    static VolumeField scalar(const SlabGrid& g) { return VolumeField(g, 1); }
    static VolumeField vector(const SlabGrid& g) { return VolumeField(g, 3); }

    // fn(x1, x2, x3) -> double, per component.
    template <class Fn>
    static VolumeField sample_scalar(const SlabGrid& g, Fn&& fn) {
        VolumeField u(g, 1);
        u.fill(0, fn);
        return u;
    }
    template <class F1, class F2, class F3>
    static VolumeField sample_vector(const SlabGrid& g, F1&& f1, F2&& f2, F3&& f3) {
        VolumeField u(g, 3);
        u.fill(0, f1);
        u.fill(1, f2);
        u.fill(2, f3);
        return u;
    }

    template <class Fn>
    void fill(int c, Fn&& fn) {
        const auto& t = grid_.torus();
        for (int j3 = 0; j3 < grid_.n3(); ++j3)
            for (int i1 = 0; i1 < t.n1; ++i1)
                for (int i2 = 0; i2 < t.n2; ++i2)
                    comp_[c][idx(i1, i2, j3)] = fn(t.x1(i1), t.x2(i2), grid_.x3(j3));
    }

    const SlabGrid& grid() const { return grid_; }
    int ncomp() const { return static_cast<int>(comp_.size()); }
    size_t idx(int i1, int i2, int j3) const {
        return static_cast<size_t>(j3) * grid_.torus().size() + grid_.torus().idx(i1, i2);
    }
    double& at(int c, int i1, int i2, int j3) { return comp_[c][idx(i1, i2, j3)]; }
    double at(int c, int i1, int i2, int j3) const { return comp_[c][idx(i1, i2, j3)]; }
    const std::vector<double>& data(int c) const { return comp_[c]; }
    std::vector<double>& data(int c) { return comp_[c]; }

    VolumeField component(int c) const {
        VolumeField out(grid_, 1);
        out.comp_[0] = comp_[c];
        return out;
    }
    void set_component(int c, const VolumeField& s) {
        if (!(grid_ == s.grid_) || s.ncomp() != 1)
            throw std::invalid_argument("set_component: scalar field on the same grid expected");
        comp_[c] = s.comp_[0];
    }

    // Exact Fourier differentiation in x'; x3 untouched. |alpha| <= 3.
    VolumeField tangential_derivative(int a1, int a2) const {
        if (a1 < 0 || a2 < 0 || a1 + a2 > 3)
            throw std::invalid_argument("tangential_derivative: order must satisfy 0 <= |alpha| <= 3");
        if (a1 == 0 && a2 == 0) return *this;
        const auto& t = grid_.torus();
        const auto& fft = Fft2::get(t.n1, t.n2);
        const int nh = t.size();
        VolumeField out(grid_, ncomp());
        std::vector<double> level(nh), back;
        std::vector<cplx> coef;
        for (int c = 0; c < ncomp(); ++c) {
            for (int j3 = 0; j3 < grid_.n3(); ++j3) {
                std::copy_n(comp_[c].begin() + static_cast<size_t>(j3) * nh, nh, level.begin());
                fft.forward(level, coef);
                for (int i1 = 0; i1 < t.n1; ++i1)
                    for (int i2 = 0; i2 < t.n2; ++i2) {
                        cplx& v = coef[t.idx(i1, i2)];
                        if ((a1 % 2 && i1 == t.n1 / 2) || (a2 % 2 && i2 == t.n2 / 2)) {
                            v = 0.0;
                            continue;
                        }
                        v *= std::pow(cplx{0.0, kTwoPi * t.wave1(i1)}, a1) *
                             std::pow(cplx{0.0, kTwoPi * t.wave2(i2)}, a2);
                    }
                fft.backward(coef, back);
                std::copy_n(back.begin(), nh, out.comp_[c].begin() + static_cast<size_t>(j3) * nh);
            }
        }
        return out;
    }

    // Collocation derivative in x3.
    VolumeField d3() const {
        const auto& D = grid_.diff3();
        const int nh = grid_.torus().size();
        const int n3 = grid_.n3();
        VolumeField out(grid_, ncomp());
        for (int c = 0; c < ncomp(); ++c) {
            for (int j = 0; j < n3; ++j) {
                auto* dst = out.comp_[c].data() + static_cast<size_t>(j) * nh;
                for (int l = 0; l < n3; ++l) {
                    const double djl = D(j, l);
                    if (djl == 0.0) continue;
                    const auto* src = comp_[c].data() + static_cast<size_t>(l) * nh;
                    for (int i = 0; i < nh; ++i) dst[i] += djl * src[i];
                }
            }
        }
        return out;
    }

    // Trace of one component at a boundary level, as a torus field.
    FrontField trace(Wall where, int c = 0) const {
        const int j = grid_.level_of(where);
        const int nh = grid_.torus().size();
        std::vector<double> level(comp_[c].begin() + static_cast<size_t>(j) * nh,
                                  comp_[c].begin() + static_cast<size_t>(j + 1) * nh);
        return FrontField::from_physical(grid_.torus(), level);
    }

    // 2/3-rule truncation of the horizontal spectrum, level by level.
    void dealias() {
        const auto& t = grid_.torus();
        const auto& fft = Fft2::get(t.n1, t.n2);
        const int nh = t.size();
        std::vector<double> level(nh), back;
        std::vector<cplx> coef;
        for (auto& c : comp_) {
            for (int j3 = 0; j3 < grid_.n3(); ++j3) {
                std::copy_n(c.begin() + static_cast<size_t>(j3) * nh, nh, level.begin());
                fft.forward(level, coef);
                for (int i1 = 0; i1 < t.n1; ++i1)
                    for (int i2 = 0; i2 < t.n2; ++i2)
                        if (3 * std::abs(t.wave1(i1)) > t.n1 || 3 * std::abs(t.wave2(i2)) > t.n2)
                            coef[t.idx(i1, i2)] = 0.0;
                fft.backward(coef, back);
                std::copy_n(back.begin(), nh, c.begin() + static_cast<size_t>(j3) * nh);
            }
        }
    }

    VolumeField& operator+=(const VolumeField& o) {
        check_grid(o);
        for (int c = 0; c < ncomp(); ++c)
            for (size_t i = 0; i < comp_[c].size(); ++i) comp_[c][i] += o.comp_[c][i];
        return *this;
    }
    VolumeField& operator-=(const VolumeField& o) {
        check_grid(o);
        for (int c = 0; c < ncomp(); ++c)
            for (size_t i = 0; i < comp_[c].size(); ++i) comp_[c][i] -= o.comp_[c][i];
        return *this;
    }
    VolumeField& operator*=(double s) {
        for (auto& c : comp_)
            for (auto& v : c) v *= s;
        return *this;
    }
    friend VolumeField operator+(VolumeField a, const VolumeField& b) { return a += b; }
    friend VolumeField operator-(VolumeField a, const VolumeField& b) { return a -= b; }
    friend VolumeField operator*(double s, VolumeField a) { return a *= s; }

    // Pointwise product of scalars (no dealiasing here; callers decide).
    friend VolumeField multiply(const VolumeField& a, const VolumeField& b) {
        a.check_grid(b);
        if (a.ncomp() != 1 || b.ncomp() != 1)
            throw std::invalid_argument("multiply: scalar fields expected");
        VolumeField out(a.grid_, 1);
        for (size_t i = 0; i < a.comp_[0].size(); ++i) out.comp_[0][i] = a.comp_[0][i] * b.comp_[0][i];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : comp_)
            for (double v : c) m = std::max(m, std::abs(v));
        return m;
    }

    // Integral over the half-domain; horizontal trapezoid is exact for
    // band-limited integrands.
    double integral() const {
        if (ncomp() != 1) throw std::invalid_argument("integral: scalar field expected");
        const int nh = grid_.torus().size();
        const auto& w = grid_.weights3();
        double sum = 0.0;
        for (int j3 = 0; j3 < grid_.n3(); ++j3) {
            double lvl = 0.0;
            const auto* src = comp_[0].data() + static_cast<size_t>(j3) * nh;
            for (int i = 0; i < nh; ++i) lvl += src[i];
            sum += w[j3] * lvl / nh;
        }
        return sum;
    }

    // L2 norm over the half-domain, all components.
    double l2_norm() const {
        const int nh = grid_.torus().size();
        const auto& w = grid_.weights3();
        double sum = 0.0;
        for (const auto& c : comp_)
            for (int j3 = 0; j3 < grid_.n3(); ++j3) {
                double lvl = 0.0;
                const auto* src = c.data() + static_cast<size_t>(j3) * nh;
                for (int i = 0; i < nh; ++i) lvl += src[i] * src[i];
                sum += w[j3] * lvl / nh;
            }
        return std::sqrt(sum);
    }

  private:
    void check_grid(const VolumeField& o) const {
        if (!(grid_ == o.grid_) || ncomp() != o.ncomp())
            throw std::invalid_argument("VolumeField: grid or component mismatch");
    }
    SlabGrid grid_;
    std::vector<std::vector<double>> comp_;
};

// || u ||_{H^m(Omega^s)}: all derivatives up to order m, true (2 pi scaled)
// tangential derivatives, collocation x3 derivatives, grid quadrature.
inline double sobolev_norm_volume(const VolumeField& u, int m) {
    if (m < 0 || m > 3) throw std::invalid_argument("sobolev_norm_volume: only 0 <= m <= 3 supported");
    double sum = 0.0;
    for (int a3 = 0; a3 <= m; ++a3) {
        VolumeField base = u;
        for (int j = 0; j < a3; ++j) base = base.d3();
        for (int a1 = 0; a1 + a3 <= m; ++a1)
            for (int a2 = 0; a1 + a2 + a3 <= m; ++a2) {
                double n = base.tangential_derivative(a1, a2).l2_norm();
                sum += n * n;
            }
    }
    return std::sqrt(sum);
}

} // namespace cvs
