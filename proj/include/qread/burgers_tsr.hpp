#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qread/cfd.hpp"
#include "qread/gridfn.hpp"

namespace qread {

struct BurgersConfig {
    int n0 = 5;        // qubits per axis; N = 2^n0 x 2^n0 on [0, 2 pi]^2
    double dt = 0.04;
    int steps = 25;    // dt * steps = 1
    double viscosity = 0.05;
    std::string method = "fsr";  // per-step readout: fsr | rsr
    uint64_t shots_per_circuit = 100000;
    double kappa = 0.51;  // sub-normalization factor of the emulated evolution
    uint64_t seed = 0;
    bool analytic = false;  // shot-free readout (truncation error only)
    std::optional<std::vector<uint64_t>> block_m;
    double fsr_tau = 1.0;  // per-step cutoff; the time-marching chain keeps
                           // nascent harmonics that a one-shot readout drops
    bool keep_fields = false;  // retain every reconstructed field in the trace

    void validate() const;
};

// u_x = u_y = sin(x+y)/(2 pi); continuous L2 norm of the stacked field is 1
VelocityField initial_condition(const BurgersConfig& cfg);

// continuous L2 norm (periodic trapezoid quadrature) of the stacked field
double continuous_l2_norm(const VelocityField& u);

// spectral first derivative along `axis` (Nyquist mode dropped)
GridFunction spectral_derivative(const GridFunction& g, int axis);

// Linearized generator on the stacked (u_x, u_y) vector:
//   H = blockdiag(-nu Lap, -nu Lap) + [[dx ux, dy ux], [dx uy, dy uy]],
// diffusion diagonal in Fourier space, advection diagonal in real space.
struct LinearizedGenerator {
    GridSpec spec;
    double viscosity = 0.0;
    std::vector<double> dux_dx, dux_dy, duy_dx, duy_dy;

    void apply(const std::vector<double>& v, std::vector<double>& out) const;
    std::vector<double> dense() const;  // row-major 2N x 2N
};
LinearizedGenerator build_linearized_generator(const VelocityField& u, double viscosity);

// exp(-dt H) u with a dense scaling-and-squaring exponential of the
// generator frozen at `gen`
VelocityField apply_reference_exponential(const LinearizedGenerator& gen,
                                          const VelocityField& u, double dt);

// one reference time step: generator frozen at the input field
VelocityField reference_step(const VelocityField& u, double dt, double viscosity);

// matrix-free exp(-dt H) v (scaled Taylor series)
std::vector<double> expm_multiply(const LinearizedGenerator& gen, double dt,
                                  const std::vector<double>& v);

// Non-unitary evolution of the normalized stacked state; p_k is kappa times
// the squared norm after the decay, and the returned state is renormalized.
struct PiteResult {
    std::vector<double> state;
    double p_k = 0.0;
};
PiteResult pite_emulated_step(const std::vector<double>& psi, const LinearizedGenerator& gen,
                              double dt, double kappa);

struct TsrStep {
    int k = 0;
    double p_k = 0.0;
    double cumulative = 0.0;   // prod_{i<=k} p_i
    double l2ns_error = 0.0;   // stacked field vs the reference chain
    double shots = 0.0;        // raw shots consumed, budget / p_k
};

struct TsrTrace {
    std::vector<TsrStep> steps;
    std::vector<VelocityField> fields;  // populated when keep_fields is set
    VelocityField final_field;
    double total_shots = 0.0;
    double final_error = 0.0;
};

// reference solution chain u_ref^(1..K); shareable across pipeline variants
std::vector<VelocityField> compute_reference_chain(const BurgersConfig& cfg);

TsrTrace tsr_run(const BurgersConfig& cfg,
                 const std::vector<VelocityField>* reference_chain = nullptr);

void write_trace_csv(const std::string& path, const TsrTrace& trace);

}  // namespace qread
