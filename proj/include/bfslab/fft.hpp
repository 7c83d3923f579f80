#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bfslab::detail {

using cdouble = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place radix-2 Cooley-Tukey transform of length n (power of two).
/// sign = -1 computes sum_i a_i e^{-2*pi*i*k*i/n}, sign = +1 the conjugate
/// transform. No 1/n normalization is applied.
inline void fft_pow2(cdouble* a, std::size_t n, int sign) {
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: length must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cdouble wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w{1.0, 0.0};
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cdouble u = a[i + j];
                const cdouble v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Transform every axis of a row-major [n x n] array (dim = 2) or a length-n
/// vector (dim = 1).
inline void fft_axes(std::vector<cdouble>& a, int dim, std::size_t n, int sign) {
    if (dim == 1) {
        fft_pow2(a.data(), n, sign);
        return;
    }
    // rows
    for (std::size_t r = 0; r < n; ++r) fft_pow2(a.data() + r * n, n, sign);
    // columns, gathered through a scratch buffer
    std::vector<cdouble> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = a[r * n + c];
        fft_pow2(col.data(), n, sign);
        for (std::size_t r = 0; r < n; ++r) a[r * n + c] = col[r];
    }
}

}  // namespace bfslab::detail
