#pragma once

// Iterative radix-2 complex FFT for the power-of-two periodic grids used by
// the desk-scale evolution runs.

#include <complex>
#include <stdexcept>
#include <vector>

namespace nde5 {

inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2 * M_PI / static_cast<double>(len) * (inverse ? 1 : -1);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

inline std::vector<std::complex<double>> fft_forward(const std::vector<double>& u) {
    std::vector<std::complex<double>> a(u.begin(), u.end());
    fft_inplace(a, false);
    return a;
}

// inverse transform returning the real part; the imaginary residue is the
// caller's reality diagnostic
inline std::vector<double> fft_inverse_real(std::vector<std::complex<double>> a,
                                            double* max_imag = nullptr) {
    fft_inplace(a, true);
    std::vector<double> u(a.size());
    double mi = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        u[i] = a[i].real();
        mi = std::max(mi, std::fabs(a[i].imag()));
    }
    if (max_imag) *max_imag = mi;
    return u;
}

} // namespace nde5
