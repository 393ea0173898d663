#pragma once

// Fourier grid on the unit 2-torus and scalar fields on it (FrontField).
// Coefficients use the FFTW layout: index i maps to wavenumber i for
// i < n/2 and i - n otherwise (Nyquist at i = n/2 maps to -n/2).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cvs/spectral/fft2.hpp"

namespace cvs {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct TorusGrid {
    int n1 = 0;
    int n2 = 0;

    TorusGrid() = default;
    TorusGrid(int n1_, int n2_) : n1(n1_), n2(n2_) {
        if (n1 < 2 || n2 < 2 || n1 % 2 || n2 % 2)
            throw std::invalid_argument("TorusGrid: sizes must be positive even integers");
    }

    bool operator==(const TorusGrid&) const = default;

    int size() const { return n1 * n2; }
    int wave1(int i) const { return i < n1 / 2 ? i : i - n1; }
    int wave2(int i) const { return i < n2 / 2 ? i : i - n2; }
    double x1(int i) const { return static_cast<double>(i) / n1; }
    double x2(int i) const { return static_cast<double>(i) / n2; }
    int idx(int i1, int i2) const { return i1 * n2 + i2; }
};

// Real scalar function on the torus stored as Fourier coefficients.
class FrontField {
  public:
    FrontField() = default;
    explicit FrontField(const TorusGrid& g) : grid_(g), coef_(g.size(), cplx{0.0, 0.0}) {}
    FrontField(const TorusGrid& g, std::vector<cplx> coef) : grid_(g), coef_(std::move(coef)) {
        if (static_cast<int>(coef_.size()) != g.size())
            throw std::invalid_argument("FrontField: coefficient size mismatch");
    }

    static FrontField from_physical(const TorusGrid& g, const std::vector<double>& vals) {
        FrontField f(g);
        Fft2::get(g.n1, g.n2).forward(vals, f.coef_);
        return f;
    }

    template <class Fn>
    static FrontField sample(const TorusGrid& g, Fn&& fn) {
        std::vector<double> vals(g.size());
        for (int i1 = 0; i1 < g.n1; ++i1)
            for (int i2 = 0; i2 < g.n2; ++i2)
                vals[g.idx(i1, i2)] = fn(g.x1(i1), g.x2(i2));
        return from_physical(g, vals);
    }

    const TorusGrid& grid() const { return grid_; }
    const std::vector<cplx>& coef() const { return coef_; }
    std::vector<cplx>& coef() { return coef_; }
    cplx& at(int i1, int i2) { return coef_[grid_.idx(i1, i2)]; }
    const cplx& at(int i1, int i2) const { return coef_[grid_.idx(i1, i2)]; }

    std::vector<double> to_physical() const {
        std::vector<double> vals;
        Fft2::get(grid_.n1, grid_.n2).backward(coef_, vals);
        return vals;
    }

    double mean() const { return coef_.empty() ? 0.0 : coef_[0].real(); }

    // d^(a1+a2) / dx1^a1 dx2^a2, exact per mode. Nyquist modes are zeroed
    // for odd orders (their derivative has no consistent real representation).
    FrontField derivative(int a1, int a2) const {
        FrontField out(grid_);
        for (int i1 = 0; i1 < grid_.n1; ++i1) {
            for (int i2 = 0; i2 < grid_.n2; ++i2) {
                int k1 = grid_.wave1(i1), k2 = grid_.wave2(i2);
                if ((a1 % 2 && i1 == grid_.n1 / 2) || (a2 % 2 && i2 == grid_.n2 / 2)) continue;
                cplx factor = std::pow(cplx{0.0, kTwoPi * k1}, a1) * std::pow(cplx{0.0, kTwoPi * k2}, a2);
                out.coef_[grid_.idx(i1, i2)] = factor * coef_[grid_.idx(i1, i2)];
            }
        }
        return out;
    }

    // 2/3-rule truncation.
    void dealias() {
        for (int i1 = 0; i1 < grid_.n1; ++i1)
            for (int i2 = 0; i2 < grid_.n2; ++i2)
                if (3 * std::abs(grid_.wave1(i1)) > grid_.n1 || 3 * std::abs(grid_.wave2(i2)) > grid_.n2)
                    coef_[grid_.idx(i1, i2)] = 0.0;
    }

    // Restore exact Hermitian symmetry (c_{-k} = conj(c_k)).
    void symmetrize() {
        for (int i1 = 0; i1 < grid_.n1; ++i1) {
            for (int i2 = 0; i2 < grid_.n2; ++i2) {
                int j1 = (grid_.n1 - i1) % grid_.n1, j2 = (grid_.n2 - i2) % grid_.n2;
                if (grid_.idx(i1, i2) < grid_.idx(j1, j2)) {
                    cplx avg = 0.5 * (coef_[grid_.idx(i1, i2)] + std::conj(coef_[grid_.idx(j1, j2)]));
                    coef_[grid_.idx(i1, i2)] = avg;
                    coef_[grid_.idx(j1, j2)] = std::conj(avg);
                } else if (grid_.idx(i1, i2) == grid_.idx(j1, j2)) {
                    coef_[grid_.idx(i1, i2)] = coef_[grid_.idx(i1, i2)].real();
                }
            }
        }
    }

    double hermitian_defect() const {
        double d = 0.0;
        for (int i1 = 0; i1 < grid_.n1; ++i1)
            for (int i2 = 0; i2 < grid_.n2; ++i2) {
                int j1 = (grid_.n1 - i1) % grid_.n1, j2 = (grid_.n2 - i2) % grid_.n2;
                d = std::max(d, std::abs(coef_[grid_.idx(i1, i2)] - std::conj(coef_[grid_.idx(j1, j2)])));
            }
        return d;
    }

    FrontField& operator+=(const FrontField& o) {
        for (size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
        return *this;
    }
    FrontField& operator-=(const FrontField& o) {
        for (size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
        return *this;
    }
    FrontField& operator*=(double s) {
        for (auto& c : coef_) c *= s;
        return *this;
    }
    friend FrontField operator+(FrontField a, const FrontField& b) { return a += b; }
    friend FrontField operator-(FrontField a, const FrontField& b) { return a -= b; }
    friend FrontField operator*(double s, FrontField a) { return a *= s; }

    double max_abs() const {
        auto vals = to_physical();
        double m = 0.0;
        for (double v : vals) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    TorusGrid grid_;
    std::vector<cplx> coef_;
};

// || f ||_{H^s(T^2)} = sqrt( sum_k (1+|k|^2)^s |c_k|^2 ), exact for
// band-limited f; s may be fractional.
inline double sobolev_norm_torus(const FrontField& f, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm_torus: s must be >= 0");
    const auto& g = f.grid();
    double sum = 0.0;
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            double k1 = g.wave1(i1), k2 = g.wave2(i2);
            sum += std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(f.at(i1, i2));
        }
    return std::sqrt(sum);
}

} // namespace cvs
