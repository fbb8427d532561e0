#include "qread/burgers_tsr.hpp"

#include <armadillo>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qread/fft.hpp"
#include "qread/readout_sampling.hpp"
#include "qread/rng.hpp"

namespace qread {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// signed integer wavenumber for index k on an N-point axis; Nyquist drops out
double wavenumber(uint64_t k, uint64_t n) {
    if (2 * k == n) return 0.0;
    return k < n / 2 ? double(k) : double(k) - double(n);
}

double laplace_wavenumber(uint64_t k, uint64_t n) {
    // the Nyquist column keeps its |k|^2 weight in the diffusion operator
    const double v = k <= n / 2 ? double(k) : double(n) - double(k);
    return v;
}

}  // namespace

void BurgersConfig::validate() const {
    require(n0 >= 2 && 2 * n0 + 1 <= 26, "n0 out of range");
    require(dt > 0.0 && steps >= 1, "bad time stepping");
    require(viscosity > 0.0, "viscosity must be positive");
    require(kappa > 0.0 && kappa <= 1.0, "kappa must lie in (0, 1]");
    require(method == "fsr" || method == "rsr", "TSR readout must be fsr or rsr");
}

VelocityField initial_condition(const BurgersConfig& cfg) {
    const uint64_t n = uint64_t(1) << cfg.n0;
    GridSpec spec{{n, n}, {2.0 * kPi, 2.0 * kPi}};
    VelocityField u;
    u.ux.spec = u.uy.spec = spec;
    u.ux.values.resize(spec.total());
    const double c = 1.0 / (2.0 * kPi);
    for (uint64_t j = 0; j < spec.total(); ++j) {
        const auto x = spec.point(index_unmap(j, spec));
        u.ux.values[j] = c * std::sin(x[0] + x[1]);
    }
    u.uy.values = u.ux.values;
    return u;
}

double continuous_l2_norm(const VelocityField& u) {
    const GridSpec& spec = u.spec();
    const double cell = (spec.lengths[0] / double(spec.counts[0])) *
                        (spec.lengths[1] / double(spec.counts[1]));
    double s = 0.0;
    for (double v : u.ux.values) s += v * v;
    for (double v : u.uy.values) s += v * v;
    return std::sqrt(s * cell);
}

GridFunction spectral_derivative(const GridFunction& g, int axis) {
    const GridSpec& spec = g.spec;
    std::vector<cplx> work(g.values.begin(), g.values.end());
    std::vector<size_t> dims(spec.counts.begin(), spec.counts.end());
    fft_nd(work, dims, -1);
    const double scale = 2.0 * kPi / spec.lengths[axis];
    for (uint64_t j = 0; j < spec.total(); ++j) {
        const auto kv = index_unmap(j, spec);
        const double k = wavenumber(kv[axis], spec.counts[axis]) * scale;
        work[j] *= cplx(0.0, k);
    }
    fft_nd(work, dims, +1);
    GridFunction out;
    out.spec = spec;
    out.values.resize(work.size());
    const double inv_n = 1.0 / double(spec.total());
    for (size_t i = 0; i < work.size(); ++i) out.values[i] = work[i].real() * inv_n;
    return out;
}

LinearizedGenerator build_linearized_generator(const VelocityField& u, double viscosity) {
    LinearizedGenerator gen;
    gen.spec = u.spec();
    gen.viscosity = viscosity;
    gen.dux_dx = spectral_derivative(u.ux, 0).values;
    gen.dux_dy = spectral_derivative(u.ux, 1).values;
    gen.duy_dx = spectral_derivative(u.uy, 0).values;
    gen.duy_dy = spectral_derivative(u.uy, 1).values;
    return gen;
}

void LinearizedGenerator::apply(const std::vector<double>& v, std::vector<double>& out) const {
    const uint64_t n = spec.total();
    require(v.size() == 2 * n, "generator: stacked vector size mismatch");
    out.assign(2 * n, 0.0);

    // diffusion part: -nu Lap, diagonal in Fourier space
    std::vector<size_t> dims(spec.counts.begin(), spec.counts.end());
    const double sx = 2.0 * kPi / spec.lengths[0], sy = 2.0 * kPi / spec.lengths[1];
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<cplx> work(n);
        for (uint64_t j = 0; j < n; ++j) work[j] = v[comp * n + j];
        fft_nd(work, dims, -1);
        for (uint64_t j = 0; j < n; ++j) {
            const auto kv = index_unmap(j, spec);
            const double kx = laplace_wavenumber(kv[0], spec.counts[0]) * sx;
            const double ky = laplace_wavenumber(kv[1], spec.counts[1]) * sy;
            work[j] *= viscosity * (kx * kx + ky * ky);
        }
        fft_nd(work, dims, +1);
        const double inv_n = 1.0 / double(n);
        for (uint64_t j = 0; j < n; ++j) out[comp * n + j] = work[j].real() * inv_n;
    }
    // advection part: diagonal in real space
    for (uint64_t j = 0; j < n; ++j) {
        out[j] += dux_dx[j] * v[j] + dux_dy[j] * v[n + j];
        out[n + j] += duy_dx[j] * v[j] + duy_dy[j] * v[n + j];
    }
}

std::vector<double> LinearizedGenerator::dense() const {
    const uint64_t n2 = 2 * spec.total();
    std::vector<double> mat(n2 * n2, 0.0);
    std::vector<double> e(n2, 0.0), col;
    for (uint64_t c = 0; c < n2; ++c) {
        e[c] = 1.0;
        apply(e, col);
        e[c] = 0.0;
        for (uint64_t r = 0; r < n2; ++r) mat[r * n2 + c] = col[r];
    }
    return mat;
}

VelocityField apply_reference_exponential(const LinearizedGenerator& gen,
                                          const VelocityField& u, double dt) {
    const uint64_t n = gen.spec.total();
    const std::vector<double> h = gen.dense();
    arma::mat hm(2 * n, 2 * n);
    for (uint64_t r = 0; r < 2 * n; ++r)
        for (uint64_t c = 0; c < 2 * n; ++c) hm(r, c) = h[r * 2 * n + c];
    const arma::mat em = arma::expmat(-dt * hm);

    arma::vec v(2 * n);
    for (uint64_t j = 0; j < n; ++j) {
        v(j) = u.ux.values[j];
        v(n + j) = u.uy.values[j];
    }
    const arma::vec w = em * v;
    VelocityField out;
    out.ux.spec = out.uy.spec = gen.spec;
    out.ux.values.resize(n);
    out.uy.values.resize(n);
    for (uint64_t j = 0; j < n; ++j) {
        out.ux.values[j] = w(j);
        out.uy.values[j] = w(n + j);
    }
    return out;
}

VelocityField reference_step(const VelocityField& u, double dt, double viscosity) {
    if (dt == 0.0) return u;
    return apply_reference_exponential(build_linearized_generator(u, viscosity), u, dt);
}

std::vector<double> expm_multiply(const LinearizedGenerator& gen, double dt,
                                  const std::vector<double>& v) {
    // crude norm bound: peak diffusion eigenvalue plus the advection diagonals
    const double sx = 2.0 * kPi / gen.spec.lengths[0];
    const double kmax = double(gen.spec.counts[0] / 2) * sx;  // square grids here
    double adv = 0.0;
    for (const auto* f : {&gen.dux_dx, &gen.dux_dy, &gen.duy_dx, &gen.duy_dy})
        for (double x : *f) adv = std::max(adv, std::abs(x));
    const double bound = std::abs(dt) * (2.0 * gen.viscosity * kmax * kmax + 2.0 * adv);
    const int substeps = std::max(1, int(std::ceil(bound / 0.5)));
    const double h = -dt / double(substeps);

    std::vector<double> cur = v, term, tmp;
    for (int s = 0; s < substeps; ++s) {
        std::vector<double> acc = cur;
        term = cur;
        double base = 0.0;
        for (double x : cur) base += x * x;
        base = std::sqrt(base);
        for (int m = 1; m <= 60; ++m) {
            gen.apply(term, tmp);
            const double f = h / double(m);
            double tn = 0.0;
            for (size_t i = 0; i < term.size(); ++i) {
                term[i] = tmp[i] * f;
                acc[i] += term[i];
                tn += term[i] * term[i];
            }
            if (std::sqrt(tn) < 1e-16 * std::max(base, 1e-300)) break;
        }
        cur = std::move(acc);
    }
    return cur;
}

PiteResult pite_emulated_step(const std::vector<double>& psi, const LinearizedGenerator& gen,
                              double dt, double kappa) {
    double nin = 0.0;
    for (double x : psi) nin += x * x;
    require(std::abs(nin - 1.0) < 1e-9, "pite step: input not normalized");

    PiteResult out;
    out.state = expm_multiply(gen, dt, psi);
    double nout = 0.0;
    for (double x : out.state) nout += x * x;
    out.p_k = kappa * nout;
    if (out.p_k <= 0.0) throw std::runtime_error("pite step: zero success probability");
    const double inv = 1.0 / std::sqrt(nout);
    for (double& x : out.state) x *= inv;
    return out;
}

namespace {

// per-component readout of the stacked evolved field
GridFunction component_readout(const BurgersConfig& cfg, const GridSpec& spec,
                               const std::vector<double>& stacked, int comp, double a_stacked,
                               const GridFunction& prev_component, uint64_t seed) {
    const uint64_t n = spec.total();
    NormalizedState st;
    st.spec = spec;
    st.amplitudes.assign(stacked.begin() + comp * n, stacked.begin() + (comp + 1) * n);
    double w = 0.0;
    for (double v : st.amplitudes) w += v * v;
    w = std::sqrt(w);
    for (double& v : st.amplitudes) v /= w;
    st.a_n = a_stacked * w;

    ReadoutConfig rc;
    rc.seed = seed;
    rc.analytic = cfg.analytic;
    rc.block_m = cfg.block_m;
    rc.adaptive_tau = cfg.fsr_tau;
    if (cfg.method == "fsr") {
        rc.shots = 2 * cfg.shots_per_circuit;  // magnitude and sign circuits
        return fsr_readout(st, rc).result;
    }
    // RSR needs a nonnegative function: shift by the running minimum of the
    // previous reconstruction (time steps are short), with a safety margin
    double lo = prev_component.values[0], hi = prev_component.values[0];
    for (double v : prev_component.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double shift = -lo + 0.2 * (hi - lo) + 1e-12;
    GridFunction g = decode(st);
    for (double& v : g.values) v += shift;
    for (double& v : g.values) v = std::max(v, 0.0);  // margin failures clip at zero
    NormalizedState shifted = encode(g);
    rc.shots = 2 * cfg.shots_per_circuit;  // equal total budget with the fsr pair
    rc.shift = shift;
    return rsr_readout(shifted, rc).result;
}

}  // namespace

std::vector<VelocityField> compute_reference_chain(const BurgersConfig& cfg) {
    cfg.validate();
    std::vector<VelocityField> chain;
    chain.reserve(cfg.steps);
    VelocityField u = initial_condition(cfg);
    for (int k = 1; k <= cfg.steps; ++k) {
        u = reference_step(u, cfg.dt, cfg.viscosity);
        chain.push_back(u);
    }
    return chain;
}

TsrTrace tsr_run(const BurgersConfig& cfg, const std::vector<VelocityField>* reference_chain) {
    cfg.validate();
    std::vector<VelocityField> own_chain;
    if (!reference_chain) {
        own_chain = compute_reference_chain(cfg);
        reference_chain = &own_chain;
    }
    require(int(reference_chain->size()) == cfg.steps,
            "tsr_run: reference chain length mismatch");
    const VelocityField u0 = initial_condition(cfg);
    const GridSpec& spec = u0.spec();
    const uint64_t n = spec.total();

    TsrTrace trace;
    VelocityField u_sim = u0;
    double cumulative = 1.0;

    for (int k = 1; k <= cfg.steps; ++k) {
        const VelocityField& u_ref = (*reference_chain)[size_t(k - 1)];

        // evolve the stacked state non-unitarily and track its norm
        const LinearizedGenerator gen = build_linearized_generator(u_sim, cfg.viscosity);
        std::vector<double> stacked(2 * n);
        double a_in = 0.0;
        for (uint64_t j = 0; j < n; ++j) {
            stacked[j] = u_sim.ux.values[j];
            stacked[n + j] = u_sim.uy.values[j];
        }
        for (double v : stacked) a_in += v * v;
        a_in = std::sqrt(a_in);
        for (double& v : stacked) v /= a_in;

        const PiteResult pite = pite_emulated_step(stacked, gen, cfg.dt, cfg.kappa);
        const double a_out = a_in * std::sqrt(pite.p_k / cfg.kappa);

        VelocityField u_next;
        u_next.ux.spec = u_next.uy.spec = spec;
        u_next.ux = component_readout(cfg, spec, pite.state, 0, a_out, u_sim.ux,
                                      derive_seed(cfg.seed, {uint64_t(k), 0}));
        u_next.uy = component_readout(cfg, spec, pite.state, 1, a_out, u_sim.uy,
                                      derive_seed(cfg.seed, {uint64_t(k), 1}));
        u_sim = std::move(u_next);

        cumulative *= pite.p_k;
        TsrStep step;
        step.k = k;
        step.p_k = pite.p_k;
        step.cumulative = cumulative;
        const int circuits = 4;  // two components, two circuits each
        step.shots =
            cfg.analytic ? 0.0
                         : double(circuits) * double(cfg.shots_per_circuit) / pite.p_k;
        std::vector<double> sim_st(2 * n), ref_st(2 * n);
        for (uint64_t j = 0; j < n; ++j) {
            sim_st[j] = u_sim.ux.values[j];
            sim_st[n + j] = u_sim.uy.values[j];
            ref_st[j] = u_ref.ux.values[j];
            ref_st[n + j] = u_ref.uy.values[j];
        }
        step.l2ns_error = l2ns_error(sim_st, ref_st);
        trace.total_shots += step.shots;
        trace.steps.push_back(step);
        if (cfg.keep_fields) trace.fields.push_back(u_sim);
    }
    trace.final_field = u_sim;
    trace.final_error = trace.steps.back().l2ns_error;
    return trace;
}

void write_trace_csv(const std::string& path, const TsrTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "step,p_k,cumulative,l2ns_error,shots\n";
    char buf[160];
    for (const auto& s : trace.steps) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", s.k, s.p_k,
                      s.cumulative, s.l2ns_error, s.shots);
        out << buf;
    }
}

}  // namespace qread
