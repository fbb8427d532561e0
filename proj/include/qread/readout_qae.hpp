#pragma once

#include <cstdint>
#include <vector>

#include "qread/gridfn.hpp"
#include "qread/readout_sampling.hpp"
#include "qread/statevec.hpp"

namespace qread {

struct RqaeConfig {
    double eps0 = 0.01;  // target half-width of the confidence interval
    double gamma = 0.05;
    double q = 2.0;  // amplification policy: Grover-power growth ratio
    uint64_t min_shots_per_iter = 0;  // 0 = derived from gamma

    // Outcome channel for the per-iteration Bernoulli draws. Statevector runs
    // A and Q^k on the fast backend; Analytic samples the rotation law
    // sin^2((2k+1) asin((a+b)/2)) directly (the identity the statevector
    // route is tested against), which large coefficient sweeps rely on.
    enum class Channel { Statevector, Analytic };
    Channel channel = Channel::Statevector;
};

struct RqaeResult {
    double estimate = 0.0;
    double half_width = 0.0;
    uint64_t oracle_queries = 0;  // every application of A or A^dagger counts once
    uint64_t max_grover_power = 0;
    int iterations = 0;
    bool converged = false;
};

// Shift oracle A[b]: the prepared state has <0...0| amplitude (a + b)/2 where
// a is the target quantity. Self-contained operator; apply() works on
// arbitrary states so Grover powers can be formed.
struct ShiftOracle {
    enum class Kind {
        RealSpace,        // a = psi_j
        FourierExtended,  // a = real coefficient of the even extension
        FourierRe,        // a = Re c_k
        FourierIm,        // a = Im c_k
    };

    Kind kind = Kind::RealSpace;
    std::vector<uint64_t> index;  // per-dimension target index
    double b = 0.0;
    NormalizedState state;

    RegisterLayout layout() const;
    void apply(StateVector& sv, bool adjoint) const;
    StateVector prepare() const;  // A[b] |0...0>
    double target_value() const;  // exact a, cached at build time

    // cached internals
    std::vector<double> prep_amps;  // state-prep target over the prep slice
    int prep_count = 0;             // qubits in the prep slice
    uint64_t flat_index = 0;        // modular-subtract constant
    double cached_target = 0.0;
};

ShiftOracle build_shift_oracle(ShiftOracle::Kind kind, const NormalizedState& state,
                               const std::vector<uint64_t>& index, double b = 0.0);

// Q^k with Q = -A S0 A^dagger S0 and S0 = I - 2|0><0|; after k applications
// the all-zeros amplitude of Q^k A|0> is sin((2k+1) theta), sin(theta)=(a+b)/2.
void grover_apply(const ShiftOracle& oracle, StateVector& sv, uint64_t power);

// Iterative estimation: first round uses b = 0.5 to fix the sign, later
// rounds re-center b to the interval edge and grow the Grover power with
// ratio <= q. Assumes |a| <= 0.9. A non-shrinking interval is reported via
// converged = false, never silently.
RqaeResult rqae_estimate(const ShiftOracle& oracle, const RqaeConfig& cfg, uint64_t seed);

// Per-target RQAE on real-space amplitudes; values A_N * a^. Non-target grid
// entries are left at zero.
Reconstruction rsqae_readout(const NormalizedState& state, const std::vector<uint64_t>& targets,
                             const RqaeConfig& cfg, uint64_t seed);

// RQAE per extended Fourier coefficient in [0,M)^d, reconstruction restricted
// to the original domain.
Reconstruction fsqae_readout(const NormalizedState& state, const std::vector<uint64_t>& m,
                             const RqaeConfig& cfg, uint64_t seed);

// Two RQAE runs per coefficient (real and imaginary parts) over the dominant
// block, no extension.
Reconstruction fsqae2_readout(const NormalizedState& state, const std::vector<uint64_t>& m,
                              const RqaeConfig& cfg, uint64_t seed);

}  // namespace qread
