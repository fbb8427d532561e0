#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qread/fft.hpp"
#include "qread/rng.hpp"

namespace qread {

// Qubit q is bit q of the basis-state index (qubit 0 = least significant).
// Spatial registers sit at the low bits, dimension 1 first, ancillas on top.
struct RegisterLayout {
    std::vector<int> dims;  // qubits per spatial dimension
    int ancillas = 0;
    int max_qubits = 24;  // memory cap, configurable

    int total() const;
    int dim_offset(int dim) const;  // first qubit of spatial register `dim`
    int ancilla_offset() const;     // first ancilla qubit
    void validate() const;
};

struct StateVector {
    RegisterLayout layout;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(RegisterLayout lay);  // |0...0>

    size_t size() const { return amps.size(); }
    double norm() const;
    void check_norm(double tol = 1e-9) const;  // norm <= 1 + tol
};

// Backend selection: GateLevel applies elementary-gate decompositions
// (correctness oracle), FastPath uses closed forms (FFT, index permutations).
enum class Backend { GateLevel, FastPath };

// Control condition on arbitrary qubits; value bit 0 = open control.
struct Controls {
    uint64_t mask = 0;
    uint64_t value = 0;

    Controls() = default;
    void add(int qubit, bool required_value);
    bool pass(uint64_t idx) const { return (idx & mask) == value; }
    bool empty() const { return mask == 0; }
};

struct Gate {
    enum class Kind { H, X, Z, P, Ry };
    Kind kind;
    int target = 0;
    double angle = 0.0;  // P phase or Ry rotation angle
    Controls ctrl;

    static Gate h(int t, Controls c = {}) { return {Kind::H, t, 0.0, c}; }
    static Gate x(int t, Controls c = {}) { return {Kind::X, t, 0.0, c}; }
    static Gate z(int t, Controls c = {}) { return {Kind::Z, t, 0.0, c}; }
    static Gate p(int t, double phi, Controls c = {}) { return {Kind::P, t, phi, c}; }
    static Gate ry(int t, double theta, Controls c = {}) { return {Kind::Ry, t, theta, c}; }
};

void apply_gate(StateVector& state, const Gate& gate);

// QFT on the contiguous qubit slice [first, first+count):
// |j> -> (1/sqrt(N)) sum_k exp(+2*pi*i*j*k/N) |k>, bit-order swaps included,
// so integer index conventions are preserved. `inverse` applies the adjoint.
void qft(StateVector& state, int first, int count, bool inverse, Backend backend,
         const Controls& ctrl = {});

// |k> -> |(k +/- addend) mod N> on the slice.
void modular_add(StateVector& state, int first, int count, uint64_t addend, bool inverse,
                 Backend backend, const Controls& ctrl = {});

// |k> -> |(k +/- 1) mod N> on the slice.
void incrementer(StateVector& state, int first, int count, Backend backend,
                 const Controls& ctrl = {}, bool inverse = false);

// Even extension: ancilla (in |0>) becomes the new top bit of the slice; the
// mirrored copy lands on indices [N, 2N) so the extended DFT is real-valued.
void even_extension(StateVector& state, int first, int count, int ancilla, Backend backend,
                    const Controls& ctrl = {}, bool inverse = false,
                    bool enforce_zero_ancilla = true);

// |k> -> |(-k) mod N_l> on every spatial register (X on all bits, then +1);
// conjugates the spectrum of a real-valued state.
void negate_registers(StateVector& state, Backend backend, const Controls& ctrl = {},
                      bool inverse = false);

// State-preparation unitary U_psi realized as the Householder reflection that
// completes the column |psi> at |0>; self-adjoint, so it is its own inverse.
// `target_amps` must be real-valued and unit-norm over the slice.
void apply_state_prep(StateVector& state, const std::vector<double>& target_amps, int first,
                      int count, const Controls& ctrl = {});

struct MeasurementHistogram {
    std::vector<int> qubits;  // sorted ascending; outcome bit r = qubits[r]
    std::vector<std::pair<uint64_t, uint64_t>> counts;  // sorted by outcome
    uint64_t total_shots = 0;

    uint64_t count_of(uint64_t outcome) const;
    void merge(const MeasurementHistogram& other);  // associative
};

// Exact marginal outcome probabilities of the measured subset (2^m entries).
std::vector<double> marginal_probabilities(const StateVector& state,
                                           const std::vector<int>& qubits);

// Multinomial sampling of the marginal; deterministic under (state, seed, shots).
MeasurementHistogram sample(const StateVector& state, const std::vector<int>& qubits,
                            uint64_t shots, uint64_t seed);

struct PostSelection {
    StateVector state;  // renormalized; measured qubits remain, pinned to the outcome
    double probability;
};

// Throws if the requested outcome has zero probability.
PostSelection post_select(const StateVector& state, const std::vector<int>& qubits,
                          uint64_t outcome);

}  // namespace qread
