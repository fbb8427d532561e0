#include "qread/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qread {

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_core(cplx* a, size_t n, int sign) {
    // bit reversal
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = static_cast<double>(sign) * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace

void fft_pow2(cplx* data, size_t n, int sign) {
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: length not a power of two");
    fft_core(data, n, sign);
}

void fft_pow2_strided(cplx* data, size_t n, size_t stride, int sign) {
    if (stride == 1) {
        fft_pow2(data, n, sign);
        return;
    }
    static thread_local std::vector<cplx> scratch;
    scratch.resize(n);
    for (size_t i = 0; i < n; ++i) scratch[i] = data[i * stride];
    fft_pow2(scratch.data(), n, sign);
    for (size_t i = 0; i < n; ++i) data[i * stride] = scratch[i];
}

void fft_nd(std::vector<cplx>& data, const std::vector<size_t>& dims, int sign) {
    size_t total = 1;
    for (size_t d : dims) total *= d;
    if (total != data.size()) throw std::invalid_argument("fft_nd: size mismatch");
    size_t stride = 1;
    for (size_t d : dims) {
        const size_t block = stride * d;
        for (size_t base = 0; base < total; base += block) {
            for (size_t off = 0; off < stride; ++off) {
                fft_pow2_strided(data.data() + base + off, d, stride, sign);
            }
        }
        stride = block;
    }
}

}  // namespace qread
