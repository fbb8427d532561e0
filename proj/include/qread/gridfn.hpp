#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qread/fft.hpp"

namespace qread {

struct GridSpec {
    std::vector<uint64_t> counts;  // N_l per dimension, powers of two
    std::vector<double> lengths;   // domain lengths L_l

    int dim() const { return static_cast<int>(counts.size()); }
    uint64_t total() const;
    std::vector<int> qubits() const;  // n_l = log2(N_l)
    void validate() const;
    bool operator==(const GridSpec&) const = default;

    // grid point x_j = (j_1 L_1/N_1, ..., j_d L_d/N_d)
    std::vector<double> point(const std::vector<uint64_t>& jvec) const;
};

struct GridFunction {
    GridSpec spec;
    std::vector<double> values;  // row-major, dimension 1 fastest
};

// Amplitude encoding psi_j = f(x_j)/A_N with A_N = (sum |f|^2)^(1/2).
struct NormalizedState {
    GridSpec spec;
    std::vector<double> amplitudes;
    double a_n = 0.0;
};

// DFT coefficients in the quantum convention: c_k equals the amplitude of |k>
// after the per-dimension inverse QFT, i.e. the unitary forward DFT
// c_k = (1/sqrt(N)) sum_j psi_j exp(-2*pi*i*j.k/N). Scale C_N = A_N/sqrt(N).
struct FourierCoefficients {
    GridSpec spec;
    std::vector<cplx> c;
    double c_n = 0.0;
};

// j = sum_l j_l * prod_{l'<l} N_l'  (dimension 1 fastest)
uint64_t index_map(const std::vector<uint64_t>& jvec, const GridSpec& spec);
std::vector<uint64_t> index_unmap(uint64_t j, const GridSpec& spec);

NormalizedState encode(const GridFunction& f);
GridFunction decode(const NormalizedState& state);

FourierCoefficients dft_coefficients(const NormalizedState& state);

// Signed-index lookup: for k_d >= 0 the first d-1 indices wrap around; for
// k_d < 0 the value is the conjugate at the mirrored index. Index N_l folds
// to 0.
cplx negative_index_lookup(const FourierCoefficients& coeffs, const std::vector<int64_t>& k);

// Truncated Fourier reconstruction over the full grid,
// f(x) ~ C_N * sum_{|k_l| < M_l} c_k prod_l exp(i 2 pi k_l x_l / L_l),
// using the signed-index rule. Requires 1 <= M_l <= N_l/2.
GridFunction reconstruct(const FourierCoefficients& coeffs, const std::vector<uint64_t>& m);

// Same truncated series evaluated at arbitrary (possibly off-grid) points.
std::vector<double> reconstruct_at(const FourierCoefficients& coeffs,
                                   const std::vector<uint64_t>& m,
                                   const std::vector<std::vector<double>>& points);

// Spectral mass on the k_d = N_d/2 row that the signed-index halving cannot
// represent; used to warn when the fold introduces visible error.
double nyquist_row_mass(const FourierCoefficients& coeffs);

// l2 error between the unit-normalized inputs; symmetric, in [0, 2].
double l2ns_error(const GridFunction& a, const GridFunction& b);
double l2ns_error(const std::vector<double>& a, const std::vector<double>& b);

// Grid CSV: "#qgrid v1 d=<d> n=<N1,..,Nd> L=<L1,..,Ld>" then one value per
// line, row-major with dimension 1 fastest, 17 significant digits.
struct RawGrid {
    std::vector<uint64_t> counts;  // not necessarily powers of two
    std::vector<double> lengths;
    std::vector<double> values;

    bool power_of_two() const;
    GridFunction to_grid_function() const;  // throws unless power-of-two
};

void write_grid_csv(const std::string& path, const GridFunction& f);
RawGrid read_grid_csv(const std::string& path);

}  // namespace qread
