#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qread {

using cplx = std::complex<double>;

// In-place radix-2 FFT on contiguous data, length must be a power of two.
// sign = -1: forward (exp(-2*pi*i*j*k/N)), sign = +1: inverse kernel.
// No normalization is applied here.
void fft_pow2(cplx* data, size_t n, int sign);

// Strided variant: transforms the n elements data[0], data[stride], ...
void fft_pow2_strided(cplx* data, size_t n, size_t stride, int sign);

// d-dimensional FFT over a row-major array with dimension 0 fastest
// (index = j0 + dims[0]*(j1 + dims[1]*(...))). Each dims[l] is a power of two.
void fft_nd(std::vector<cplx>& data, const std::vector<size_t>& dims, int sign);

}  // namespace qread
