#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qread/gridfn.hpp"
#include "qread/statevec.hpp"

namespace qread {

struct ReadoutConfig {
    uint64_t shots = 10000;  // total budget; two-circuit methods split it evenly
    uint64_t seed = 0;
    std::optional<std::vector<uint64_t>> block_m;  // M_l; empty = adaptive choice
    double shift = 0.0;       // known shift encoded upstream, subtracted after readout
    int spline_order = 0;     // 0 = default (cubic for d <= 2, linear otherwise)
    double beta = 5.0;        // sampling-error confidence constant
    bool analytic = false;    // shot-free mode: exact outcome probabilities
    int adaptive_p_hat = 2;   // FSR block rule M = 2^ceil(log2(shots)/(2*p_hat-1+d))
    double adaptive_tau = 4.0;  // FSR cutoff: keep |c|^2 > tau/shots
    int arsr_start_m = 1;     // adaptive ARSR starting exponent
};

struct CoefficientEstimate {
    std::vector<int64_t> k;  // table index of the coefficient
    double re = 0.0, im = 0.0;
    double abs = 0.0;
    int sign_re = +1, sign_im = +1;
    bool tie_re = false, tie_im = false;
    bool kept = true;       // survived the adaptive cutoff
    uint64_t queries = 0;   // oracle queries spent on this coefficient (QAE)
};

struct Reconstruction {
    GridFunction result;
    std::string method;
    uint64_t shots_used = 0;
    uint64_t queries = 0;  // oracle queries (QAE methods)
    std::vector<uint64_t> chosen_m;
    std::vector<double> arsr_err_steps;         // ||f_(k+1) - f_(k)|| per adaptive step
    std::vector<CoefficientEstimate> coeffs;    // Fourier methods
    bool nyquist_warning = false;
};

// ---- real-space readouts ----

// Full Z-basis sampling; values A_N * sqrt(p~_j) - shift.
Reconstruction rsr_readout(const NormalizedState& state, const ReadoutConfig& cfg);

// Coarse-block averages of fine value estimates.
enum class PostProcess { Rms, Mean, ShiftedHarmonic, Fmf };
std::vector<double> post_process(const GridFunction& fine, PostProcess method,
                                 const std::vector<uint64_t>& m, double delta = 0.1);

// Coarse cell centers along dimension l: (kbar + 1/2 - M/(2N)) * L / M.
std::vector<double> coarse_centers(const GridSpec& spec, uint64_t m_l, int l);

// Measures the most significant m_l qubits per dimension (RMS coarse values),
// then spline-interpolates to the full grid. block_m empty runs the adaptive
// convergence rule; err_k diagnostics land in arsr_err_steps.
Reconstruction arsr_readout(const NormalizedState& state, const ReadoutConfig& cfg);

// Interpolate coarse values (at block centers) back onto the fine grid.
std::vector<double> interpolate_coarse(const GridSpec& spec, const std::vector<uint64_t>& m,
                                       const std::vector<double>& coarse, int spline_order);

// ---- modified Fourier-space readout ----

// Dominant block: k_l in [0,M_l) u [N_l-M_l, N_l) for l < d-1, k_d in [0,M_d).
std::vector<std::vector<uint64_t>> fsr_dominant_block(const GridSpec& spec,
                                                      const std::vector<uint64_t>& m);

// Outcome law of the coefficient-magnitude circuit, outcome = k + N*q:
// P(q=0,k) = Re(c_k)^2, P(q=1,k) = Im(c_k)^2.
std::vector<double> fsr_magnitude_law(const FourierCoefficients& coeffs);

// Outcome law of the sign circuit, outcome = k + N*(q + 2s); for block
// entries P = (X_k + sigma/sqrt(2*Mtot))^2/4 with sigma = +1 for s=0,
// X = Re (q=0) or Im (q=1), and 2*Mtot = 2*2^(d-1)*prod(M_l).
std::vector<double> fsr_sign_law(const FourierCoefficients& coeffs,
                                 const std::vector<uint64_t>& m);

// Gate-level reference distributions for the same circuits (tests/acceptance).
std::vector<double> fsr_magnitude_distribution_gate(const NormalizedState& state);
std::vector<double> fsr_sign_distribution_gate(const NormalizedState& state,
                                               const std::vector<uint64_t>& m);

struct FsrMagnitudes {
    std::vector<std::vector<uint64_t>> block;
    std::vector<double> abs_re, abs_im;  // |Re c|, |Im c| estimates
    std::vector<double> p_re, p_im;      // underlying probability estimates
    uint64_t shots = 0;
    double nyquist_mass_est = 0.0;  // estimated mass on the k_d = N_d/2 row
};
FsrMagnitudes fsr_magnitudes(const NormalizedState& state, const std::vector<uint64_t>& m,
                             uint64_t shots, uint64_t seed, bool analytic = false);

struct FsrSigns {
    std::vector<std::vector<uint64_t>> block;
    std::vector<int> sign_re, sign_im;
    std::vector<bool> tie_re, tie_im;
    uint64_t shots = 0;
};
FsrSigns fsr_signs(const NormalizedState& state, const std::vector<uint64_t>& m,
                   uint64_t shots, uint64_t seed, bool analytic = false);

// Magnitudes + signs + signed-index reconstruction. Adaptive mode picks the
// block from shots and drops coefficients below the shot-noise cutoff.
Reconstruction fsr_readout(const NormalizedState& state, const ReadoutConfig& cfg);

// ---- original (extension) Fourier-space readout ----

// Even extension of the encoded state: every dimension doubled, amplitudes
// mirrored and scaled by 2^(-d/2); the extended spectrum is real.
NormalizedState extend_state(const NormalizedState& state);

// Outcome laws on the extended grid (coefficients real, no q ancilla).
std::vector<double> ext_fsr_magnitude_law(const FourierCoefficients& ext_coeffs);
std::vector<double> ext_fsr_sign_law(const FourierCoefficients& ext_coeffs,
                                     const std::vector<uint64_t>& m);
std::vector<double> ext_fsr_magnitude_distribution_gate(const NormalizedState& state);
std::vector<double> ext_fsr_sign_distribution_gate(const NormalizedState& state,
                                                   const std::vector<uint64_t>& m);

Reconstruction extension_fsr_readout(const NormalizedState& state, const ReadoutConfig& cfg);

// FSR block rule M_l = min(cap_l, 2^ceil(log2(shots)/(2*p_hat - 1 + d))).
std::vector<uint64_t> fsr_adaptive_block(const GridSpec& spec, uint64_t shots, int p_hat,
                                         bool extended);

// Dense fill + inverse transform of dominant-block estimates (Hermitian
// mirror for the negative k_d half; k_d = 0 entries Hermitian-averaged).
GridFunction reconstruct_hermitian_block(const GridSpec& spec, double c_n,
                                         const std::vector<std::vector<uint64_t>>& block,
                                         std::vector<cplx> estimates);

// Even-symmetric counterpart on the extended grid: estimates over [0,M)^d
// (row-major, dimension 0 fastest) are mirrored to every sign combination,
// inverse-transformed, and restricted to the original domain.
GridFunction reconstruct_even_block(const GridSpec& orig_spec, double a_n,
                                    const std::vector<uint64_t>& m,
                                    const std::vector<double>& estimates);

// Coefficient dump: "k1,..,kd,re,im,abs_est,sign_re,sign_im" per line.
void write_coefficient_csv(const std::string& path,
                           const std::vector<CoefficientEstimate>& coeffs, int dim);

}  // namespace qread
