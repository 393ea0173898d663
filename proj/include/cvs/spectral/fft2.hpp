#pragma once

// Thin wrapper around FFTW for 2-D periodic transforms on the unit torus.
// Plans are cached per grid size; all transforms are FFTW_ESTIMATE so runs
// are deterministic and planning is cheap at the sizes we use.

#include <complex>
#include <map>
#include <memory>
#include <vector>

#include <fftw3.h>

namespace cvs {

using cplx = std::complex<double>;

class Fft2 {
  public:
    Fft2(int n1, int n2) : n1_(n1), n2_(n2) {
        buf_ = fftw_alloc_complex(static_cast<size_t>(n1) * n2);
        auto* b = reinterpret_cast<fftw_complex*>(buf_);
        fwd_ = fftw_plan_dft_2d(n1, n2, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(n1, n2, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    // physical (real) -> Fourier coefficients c_k, normalized so that
    // c_k = (1/(n1 n2)) sum f(x_j) exp(-2 pi i k.x_j).
    void forward(const std::vector<double>& phys, std::vector<cplx>& coef) const {
        const size_t n = static_cast<size_t>(n1_) * n2_;
        auto* b = reinterpret_cast<cplx*>(buf_);
        for (size_t i = 0; i < n; ++i) b[i] = phys[i];
        fftw_execute(fwd_);
        coef.resize(n);
        const double scale = 1.0 / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) coef[i] = b[i] * scale;
    }

    // Fourier coefficients -> physical values (real part; imaginary part is
    // roundoff for Hermitian input).
    void backward(const std::vector<cplx>& coef, std::vector<double>& phys) const {
        const size_t n = static_cast<size_t>(n1_) * n2_;
        auto* b = reinterpret_cast<cplx*>(buf_);
        for (size_t i = 0; i < n; ++i) b[i] = coef[i];
        fftw_execute(bwd_);
        phys.resize(n);
        for (size_t i = 0; i < n; ++i) phys[i] = b[i].real();
    }

    static const Fft2& get(int n1, int n2) {
        static std::map<std::pair<int, int>, std::unique_ptr<Fft2>> cache;
        auto key = std::make_pair(n1, n2);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::make_unique<Fft2>(n1, n2)).first;
        return *it->second;
    }

  private:
    int n1_, n2_;
    void* buf_;
    fftw_plan fwd_, bwd_;
};

} // namespace cvs
