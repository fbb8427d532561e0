#include "qread/readout_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qread/rng.hpp"
#include "qread/spline.hpp"

namespace qread {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

int default_spline_order(int requested, int dim) {
    if (requested == 1 || requested == 3) return requested;
    return dim <= 2 ? 3 : 1;
}

// fine-grid value estimates A_N * sqrt(p~_j); shared by RSR and ARSR so the
// post-processing equivalence is exact (identical floating-point path)
std::vector<double> fine_value_estimates(const NormalizedState& state, const ReadoutConfig& cfg,
                                         uint64_t shots, uint64_t seed) {
    const uint64_t n = state.spec.total();
    std::vector<double> values(n);
    if (cfg.analytic) {
        for (uint64_t j = 0; j < n; ++j)
            values[j] = state.a_n * std::abs(state.amplitudes[j]);
        return values;
    }
    std::vector<double> probs(n);
    for (uint64_t j = 0; j < n; ++j)
        probs[j] = state.amplitudes[j] * state.amplitudes[j];
    const std::vector<uint64_t> counts = multinomial_counts(probs, shots, seed);
    for (uint64_t j = 0; j < n; ++j)
        values[j] = state.a_n * std::sqrt(double(counts[j]) / double(shots));
    return values;
}

}  // namespace

Reconstruction rsr_readout(const NormalizedState& state, const ReadoutConfig& cfg) {
    require(cfg.analytic || cfg.shots >= 1, "rsr_readout: shots must be >= 1");
    Reconstruction rec;
    rec.method = "rsr";
    rec.shots_used = cfg.analytic ? 0 : cfg.shots;
    rec.result.spec = state.spec;
    rec.result.values = fine_value_estimates(state, cfg, cfg.shots, cfg.seed);
    if (cfg.shift != 0.0)
        for (double& v : rec.result.values) v -= cfg.shift;
    return rec;
}

std::vector<double> coarse_centers(const GridSpec& spec, uint64_t m_l, int l) {
    std::vector<double> x(m_l);
    const double nl = double(spec.counts[l]);
    for (uint64_t k = 0; k < m_l; ++k)
        x[k] = (double(k) + 0.5 - double(m_l) / (2.0 * nl)) * spec.lengths[l] / double(m_l);
    return x;
}

std::vector<double> post_process(const GridFunction& fine, PostProcess method,
                                 const std::vector<uint64_t>& m, double delta) {
    const GridSpec& spec = fine.spec;
    const int d = spec.dim();
    require(int(m.size()) == d, "post_process: block dimension mismatch");
    uint64_t coarse_total = 1;
    for (int l = 0; l < d; ++l) {
        require(m[l] >= 1 && m[l] <= spec.counts[l] && spec.counts[l] % m[l] == 0,
                "post_process: block sizes must divide the grid");
        coarse_total *= m[l];
    }

    std::vector<double> acc(coarse_total, 0.0);
    const double cell = double(spec.total()) / double(coarse_total);
    for (uint64_t j = 0; j < spec.total(); ++j) {
        uint64_t rest = j, cidx = 0, stride = 1;
        for (int l = 0; l < d; ++l) {
            const uint64_t jl = rest % spec.counts[l];
            rest /= spec.counts[l];
            cidx += (jl * m[l] / spec.counts[l]) * stride;
            stride *= m[l];
        }
        const double a = fine.values[j];
        switch (method) {
            case PostProcess::Rms: acc[cidx] += a * a; break;
            case PostProcess::Mean: acc[cidx] += a; break;
            case PostProcess::ShiftedHarmonic: acc[cidx] += 1.0 / (a + delta); break;
            case PostProcess::Fmf: acc[cidx] += (a * a) * (a * a); break;
        }
    }
    for (double& v : acc) {
        switch (method) {
            case PostProcess::Rms: v = std::sqrt(v / cell); break;
            case PostProcess::Mean: v /= cell; break;
            case PostProcess::ShiftedHarmonic: v = cell / v - delta; break;
            case PostProcess::Fmf: v = std::sqrt(std::sqrt(v / cell)); break;
        }
    }
    return acc;
}

std::vector<double> interpolate_coarse(const GridSpec& spec, const std::vector<uint64_t>& m,
                                       const std::vector<double>& coarse, int spline_order) {
    const int d = spec.dim();
    std::vector<std::vector<double>> nodes(d), targets(d);
    for (int l = 0; l < d; ++l) {
        nodes[l] = coarse_centers(spec, m[l], l);
        targets[l].resize(spec.counts[l]);
        for (uint64_t j = 0; j < spec.counts[l]; ++j)
            targets[l][j] = double(j) * spec.lengths[l] / double(spec.counts[l]);
    }
    const int order = default_spline_order(spline_order, d);
    return tensor_interpolate(nodes, coarse, order, targets);
}

Reconstruction arsr_readout(const NormalizedState& state, const ReadoutConfig& cfg) {
    const GridSpec& spec = state.spec;
    const int d = spec.dim();
    const std::vector<int> qubits = spec.qubits();

    if (cfg.block_m) {
        require(int(cfg.block_m->size()) == d, "arsr_readout: block dimension mismatch");
        for (int l = 0; l < d; ++l)
            if ((*cfg.block_m)[l] > spec.counts[l] / 2)
                throw std::invalid_argument("arsr_readout: M_l > N_l/2 (center rule invalid)");
    }

    Reconstruction rec;
    rec.method = "arsr";
    rec.shots_used = cfg.analytic ? 0 : cfg.shots;
    rec.result.spec = spec;

    GridFunction fine{spec, fine_value_estimates(state, cfg, cfg.shots, cfg.seed)};
    const auto coarse_field = [&](const std::vector<uint64_t>& m) {
        const std::vector<double> coarse = post_process(fine, PostProcess::Rms, m);
        return interpolate_coarse(spec, m, coarse, cfg.spline_order);
    };

    if (cfg.block_m) {
        rec.chosen_m = *cfg.block_m;
        rec.result.values = coarse_field(rec.chosen_m);
    } else {
        // convergence rule: grow m until ||f_(k+1) - f_(k)|| starts increasing
        int max_m = *std::min_element(qubits.begin(), qubits.end()) - 1;
        max_m = std::max(max_m, 1);
        int k = std::min(cfg.arsr_start_m, max_m);
        auto block_of = [&](int expo) {
            return std::vector<uint64_t>(size_t(d), uint64_t(1) << expo);
        };
        std::vector<double> fk = coarse_field(block_of(k));
        double prev_err = -1.0;
        while (k < max_m) {
            std::vector<double> fk1 = coarse_field(block_of(k + 1));
            double err = 0.0;
            for (size_t i = 0; i < fk.size(); ++i) {
                const double dv = fk1[i] - fk[i];
                err += dv * dv;
            }
            err = std::sqrt(err);
            rec.arsr_err_steps.push_back(err);
            if (prev_err >= 0.0 && err > prev_err) break;  // f_(k) is the answer
            prev_err = err;
            fk = std::move(fk1);
            ++k;
        }
        rec.chosen_m = block_of(k);
        rec.result.values = std::move(fk);
    }
    if (cfg.shift != 0.0)
        for (double& v : rec.result.values) v -= cfg.shift;
    return rec;
}

// ---- modified FSR ----

std::vector<uint64_t> fsr_adaptive_block(const GridSpec& spec, uint64_t shots, int p_hat,
                                         bool extended) {
    const int d = spec.dim();
    const double expo = std::log2(double(std::max<uint64_t>(shots, 2))) / double(2 * p_hat - 1 + d);
    const uint64_t m0 = uint64_t(1) << uint64_t(std::ceil(expo));
    std::vector<uint64_t> m(static_cast<size_t>(d), 0);
    for (int l = 0; l < d; ++l) {
        const uint64_t cap = extended ? spec.counts[l] : spec.counts[l] / 2;
        m[l] = std::min(m0, std::max<uint64_t>(cap, 1));
    }
    return m;
}

std::vector<std::vector<uint64_t>> fsr_dominant_block(const GridSpec& spec,
                                                      const std::vector<uint64_t>& m) {
    const int d = spec.dim();
    require(int(m.size()) == d, "fsr_dominant_block: dimension mismatch");
    for (int l = 0; l < d; ++l)
        require(m[l] >= 1 && m[l] <= spec.counts[l] / 2, "fsr_dominant_block: M out of range");

    std::vector<std::vector<uint64_t>> per_dim(d);
    for (int l = 0; l < d; ++l) {
        for (uint64_t k = 0; k < m[l]; ++k) per_dim[l].push_back(k);
        if (l + 1 < d)  // mirrored half for all but the last dimension
            for (uint64_t k = spec.counts[l] - m[l]; k < spec.counts[l]; ++k)
                per_dim[l].push_back(k);
    }
    std::vector<std::vector<uint64_t>> block;
    std::vector<size_t> pos(size_t(d), 0);
    for (;;) {
        std::vector<uint64_t> k(static_cast<size_t>(d), 0);
        for (int l = 0; l < d; ++l) k[l] = per_dim[l][pos[l]];
        block.push_back(std::move(k));
        int l = 0;
        for (; l < d; ++l) {
            if (++pos[l] < per_dim[l].size()) break;
            pos[l] = 0;
        }
        if (l == d) break;
    }
    return block;
}

std::vector<double> fsr_magnitude_law(const FourierCoefficients& coeffs) {
    const uint64_t n = coeffs.spec.total();
    std::vector<double> law(2 * n);
    for (uint64_t k = 0; k < n; ++k) {
        law[k] = coeffs.c[k].real() * coeffs.c[k].real();
        law[n + k] = coeffs.c[k].imag() * coeffs.c[k].imag();
    }
    return law;
}

std::vector<double> fsr_sign_law(const FourierCoefficients& coeffs,
                                 const std::vector<uint64_t>& m) {
    const GridSpec& spec = coeffs.spec;
    const uint64_t n = spec.total();
    const auto block = fsr_dominant_block(spec, m);
    const double h = 1.0 / std::sqrt(2.0 * double(block.size()));

    std::vector<double> law(4 * n, 0.0);
    for (uint64_t k = 0; k < n; ++k) {
        const double re = coeffs.c[k].real(), im = coeffs.c[k].imag();
        law[k] = 0.25 * re * re;            // (q=0, s=0)
        law[k + n] = 0.25 * im * im;        // (q=1, s=0)
        law[k + 2 * n] = 0.25 * re * re;    // (q=0, s=1)
        law[k + 3 * n] = 0.25 * im * im;    // (q=1, s=1)
    }
    for (const auto& kv : block) {
        const uint64_t k = index_map(kv, spec);
        const double re = coeffs.c[k].real(), im = coeffs.c[k].imag();
        law[k] = 0.25 * (h + re) * (h + re);
        law[k + n] = 0.25 * (h + im) * (h + im);
        law[k + 2 * n] = 0.25 * (h - re) * (h - re);
        law[k + 3 * n] = 0.25 * (h - im) * (h - im);
    }
    return law;
}

namespace {

StateVector state_with_ancillas(const NormalizedState& state, int ancillas) {
    RegisterLayout lay;
    lay.dims = state.spec.qubits();
    lay.ancillas = ancillas;
    StateVector sv(lay);
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    for (uint64_t j = 0; j < state.spec.total(); ++j) sv.amps[j] = state.amplitudes[j];
    return sv;
}

}  // namespace

std::vector<double> fsr_magnitude_distribution_gate(const NormalizedState& state) {
    StateVector sv = state_with_ancillas(state, 1);
    const int q = sv.layout.ancilla_offset();
    Controls on_q;
    on_q.add(q, true);

    apply_gate(sv, Gate::h(q));
    for (size_t l = 0; l < sv.layout.dims.size(); ++l)
        qft(sv, sv.layout.dim_offset(int(l)), sv.layout.dims[l], /*inverse=*/true,
            Backend::GateLevel);
    negate_registers(sv, Backend::GateLevel, on_q);
    apply_gate(sv, Gate::h(q));
    apply_gate(sv, Gate::p(q, -std::numbers::pi / 2.0));

    std::vector<double> dist(sv.amps.size());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = std::norm(sv.amps[i]);
    return dist;
}

std::vector<double> fsr_sign_distribution_gate(const NormalizedState& state,
                                               const std::vector<uint64_t>& m) {
    StateVector sv(RegisterLayout{state.spec.qubits(), 2});
    const int d = sv.layout.dims.size() ? int(sv.layout.dims.size()) : 0;
    const int q = sv.layout.ancilla_offset();
    const int s = q + 1;
    Controls on_s, on_qs, off_s;
    on_s.add(s, true);
    on_qs.add(q, true);
    on_qs.add(s, true);
    off_s.add(s, false);

    apply_gate(sv, Gate::h(s));
    apply_gate(sv, Gate::h(q));
    apply_state_prep(sv, state.amplitudes, 0, q, on_s);
    for (int l = 0; l < d; ++l)
        qft(sv, sv.layout.dim_offset(l), sv.layout.dims[l], true, Backend::GateLevel, on_s);
    negate_registers(sv, Backend::GateLevel, on_qs);
    apply_gate(sv, Gate::h(q));
    apply_gate(sv, Gate::p(q, -std::numbers::pi / 2.0, on_s));

    // reference branch: uniform superposition over the dominant block
    const std::vector<int> qubits = state.spec.qubits();
    for (int l = 0; l < d; ++l) {
        const int first = sv.layout.dim_offset(l);
        int mexp = 0;
        while ((uint64_t(1) << mexp) < m[l]) ++mexp;
        for (int b = 0; b < mexp; ++b) apply_gate(sv, Gate::h(first + b, off_s));
        if (l + 1 < d) {
            // one more H plus a decrement of the high bits covers the mirrored half
            apply_gate(sv, Gate::h(first + mexp, off_s));
            incrementer(sv, first + mexp, qubits[l] - mexp, Backend::GateLevel, off_s,
                        /*inverse=*/true);
        }
    }
    apply_gate(sv, Gate::h(q, off_s));
    apply_gate(sv, Gate::h(s));

    std::vector<double> dist(sv.amps.size());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = std::norm(sv.amps[i]);
    return dist;
}

namespace {

struct SampledLaw {
    std::vector<double> est;  // per-outcome probability estimates
    uint64_t shots = 0;
};

SampledLaw estimate_law(const std::vector<double>& law, uint64_t shots, uint64_t seed,
                        bool analytic) {
    SampledLaw out;
    if (analytic) {
        out.est = law;
        return out;
    }
    out.shots = shots;
    out.est.assign(law.size(), 0.0);
    if (shots == 0) return out;
    const std::vector<uint64_t> counts = multinomial_counts(law, shots, seed);
    for (size_t i = 0; i < counts.size(); ++i)
        out.est[i] = double(counts[i]) / double(shots);
    return out;
}

}  // namespace

FsrMagnitudes fsr_magnitudes(const NormalizedState& state, const std::vector<uint64_t>& m,
                             uint64_t shots, uint64_t seed, bool analytic) {
    const GridSpec& spec = state.spec;
    const uint64_t n = spec.total();
    const FourierCoefficients coeffs = dft_coefficients(state);
    const SampledLaw lw = estimate_law(fsr_magnitude_law(coeffs), shots, seed, analytic);

    FsrMagnitudes out;
    out.block = fsr_dominant_block(spec, m);
    out.shots = analytic ? 0 : shots;
    out.abs_re.reserve(out.block.size());
    for (const auto& kv : out.block) {
        const uint64_t k = index_map(kv, spec);
        out.p_re.push_back(lw.est[k]);
        out.p_im.push_back(lw.est[n + k]);
        out.abs_re.push_back(std::sqrt(lw.est[k]));
        out.abs_im.push_back(std::sqrt(lw.est[n + k]));
    }
    // mass observed on the k_d = N_d/2 row (unrepresentable under the
    // signed-index halving)
    const int d = spec.dim();
    const uint64_t nyq = spec.counts[d - 1] / 2;
    double mass = 0.0;
    for (uint64_t k = 0; k < n; ++k)
        if (index_unmap(k, spec)[d - 1] == nyq) mass += lw.est[k] + lw.est[n + k];
    out.nyquist_mass_est = mass;
    return out;
}

FsrSigns fsr_signs(const NormalizedState& state, const std::vector<uint64_t>& m,
                   uint64_t shots, uint64_t seed, bool analytic) {
    const GridSpec& spec = state.spec;
    const uint64_t n = spec.total();
    const FourierCoefficients coeffs = dft_coefficients(state);
    const SampledLaw lw = estimate_law(fsr_sign_law(coeffs, m), shots, seed, analytic);

    FsrSigns out;
    out.block = fsr_dominant_block(spec, m);
    out.shots = analytic ? 0 : shots;
    for (const auto& kv : out.block) {
        const uint64_t k = index_map(kv, spec);
        const double dre = lw.est[k] - lw.est[k + 2 * n];
        const double dim = lw.est[k + n] - lw.est[k + 3 * n];
        // a difference at rounding level is an unresolved tie, defaulting to +
        const double floor_re = 1e-14 * (lw.est[k] + lw.est[k + 2 * n]);
        const double floor_im = 1e-14 * (lw.est[k + n] + lw.est[k + 3 * n]);
        out.sign_re.push_back(dre < -floor_re ? -1 : +1);
        out.sign_im.push_back(dim < -floor_im ? -1 : +1);
        out.tie_re.push_back(std::abs(dre) <= floor_re);
        out.tie_im.push_back(std::abs(dim) <= floor_im);
    }
    return out;
}

// Mirror-fills a dense coefficient array from dominant-block estimates and
// inverse-transforms it. Estimates on the k_d = 0 hyperplane are Hermitian-
// averaged first so the reconstruction is real by construction.
GridFunction reconstruct_hermitian_block(const GridSpec& spec, double c_n,
                                         const std::vector<std::vector<uint64_t>>& block,
                                         std::vector<cplx> est) {
    const int d = spec.dim();
    std::vector<cplx> dense(spec.total(), cplx(0.0, 0.0));

    // Hermitian averaging on the last-dimension-zero hyperplane
    std::vector<size_t> flat_to_pos(spec.total(), size_t(-1));
    for (size_t i = 0; i < block.size(); ++i) flat_to_pos[index_map(block[i], spec)] = i;
    for (size_t i = 0; i < block.size(); ++i) {
        if (block[i][d - 1] != 0) continue;
        std::vector<uint64_t> mir(block[i]);
        for (int l = 0; l < d; ++l) mir[l] = (spec.counts[l] - block[i][l]) % spec.counts[l];
        const size_t j = flat_to_pos[index_map(mir, spec)];
        if (j == size_t(-1) || j < i) continue;
        if (j == i) {
            est[i] = cplx(est[i].real(), 0.0);
        } else {
            const cplx avg = 0.5 * (est[i] + std::conj(est[j]));
            est[i] = avg;
            est[j] = std::conj(avg);
        }
    }

    for (size_t i = 0; i < block.size(); ++i) {
        dense[index_map(block[i], spec)] = est[i];
        if (block[i][d - 1] >= 1) {  // Hermitian mirror fills the negative k_d half
            std::vector<uint64_t> mir(block[i]);
            for (int l = 0; l < d; ++l)
                mir[l] = (spec.counts[l] - block[i][l]) % spec.counts[l];
            dense[index_map(mir, spec)] = std::conj(est[i]);
        }
    }

    std::vector<size_t> dims(spec.counts.begin(), spec.counts.end());
    fft_nd(dense, dims, +1);
    GridFunction out;
    out.spec = spec;
    out.values.resize(dense.size());
    for (size_t i = 0; i < dense.size(); ++i) out.values[i] = c_n * dense[i].real();
    return out;
}

Reconstruction fsr_readout(const NormalizedState& state, const ReadoutConfig& cfg) {
    const GridSpec& spec = state.spec;
    const std::vector<uint64_t> m =
        cfg.block_m ? *cfg.block_m
                    : fsr_adaptive_block(spec, cfg.shots, cfg.adaptive_p_hat, false);
    const uint64_t shots_mag = cfg.analytic ? 0 : (cfg.shots + 1) / 2;
    const uint64_t shots_sgn = cfg.analytic ? 0 : cfg.shots - shots_mag;

    const FsrMagnitudes mags = fsr_magnitudes(state, m, shots_mag,
                                              derive_seed(cfg.seed, {0x6d61676eULL}),
                                              cfg.analytic);
    const FsrSigns signs = fsr_signs(state, m, shots_sgn,
                                     derive_seed(cfg.seed, {0x7369676eULL}), cfg.analytic);

    Reconstruction rec;
    rec.method = "fsr";
    rec.shots_used = shots_mag + shots_sgn;
    rec.chosen_m = m;

    const double cutoff = cfg.analytic ? 0.0 : cfg.adaptive_tau / double(std::max<uint64_t>(shots_mag, 1));
    std::vector<cplx> est(mags.block.size(), cplx(0.0, 0.0));
    for (size_t i = 0; i < mags.block.size(); ++i) {
        CoefficientEstimate ce;
        ce.k.assign(mags.block[i].begin(), mags.block[i].end());
        ce.sign_re = signs.sign_re[i];
        ce.sign_im = signs.sign_im[i];
        ce.tie_re = signs.tie_re[i];
        ce.tie_im = signs.tie_im[i];
        const double p_abs2 = mags.p_re[i] + mags.p_im[i];
        ce.kept = cfg.analytic || p_abs2 > cutoff;
        if (ce.kept) {
            ce.re = ce.sign_re * mags.abs_re[i];
            ce.im = ce.sign_im * mags.abs_im[i];
        }
        ce.abs = std::sqrt(p_abs2);
        est[i] = cplx(ce.re, ce.im);
        rec.coeffs.push_back(std::move(ce));
    }

    rec.result = reconstruct_hermitian_block(spec, state.a_n / std::sqrt(double(spec.total())),
                                             mags.block, std::move(est));
    const double nyq_threshold =
        cfg.analytic ? 1e-8 : std::max(1e-8, cfg.adaptive_tau / double(std::max<uint64_t>(shots_mag, 1)));
    rec.nyquist_warning = mags.nyquist_mass_est > nyq_threshold;
    if (cfg.shift != 0.0)
        for (double& v : rec.result.values) v -= cfg.shift;
    return rec;
}

// ---- extension FSR ----

NormalizedState extend_state(const NormalizedState& state) {
    const GridSpec& spec = state.spec;
    const int d = spec.dim();
    NormalizedState ext;
    ext.spec.counts.resize(d);
    ext.spec.lengths.resize(d);
    for (int l = 0; l < d; ++l) {
        ext.spec.counts[l] = 2 * spec.counts[l];
        ext.spec.lengths[l] = 2.0 * spec.lengths[l];
    }
    ext.a_n = state.a_n * std::pow(2.0, 0.5 * d);
    const double scale = std::pow(2.0, -0.5 * d);

    ext.amplitudes.resize(ext.spec.total());
    for (uint64_t j = 0; j < ext.spec.total(); ++j) {
        uint64_t rest = j, src = 0, stride = 1;
        for (int l = 0; l < d; ++l) {
            uint64_t jl = rest % ext.spec.counts[l];
            rest /= ext.spec.counts[l];
            if (jl >= spec.counts[l]) jl = (2 * spec.counts[l] - jl) % spec.counts[l];
            src += jl * stride;
            stride *= spec.counts[l];
        }
        ext.amplitudes[j] = scale * state.amplitudes[src];
    }
    return ext;
}

std::vector<double> ext_fsr_magnitude_law(const FourierCoefficients& ext_coeffs) {
    std::vector<double> law(ext_coeffs.c.size());
    for (size_t k = 0; k < law.size(); ++k) law[k] = std::norm(ext_coeffs.c[k]);
    return law;
}

std::vector<double> ext_fsr_sign_law(const FourierCoefficients& ext_coeffs,
                                     const std::vector<uint64_t>& m) {
    const GridSpec& spec = ext_coeffs.spec;
    const uint64_t n = spec.total();
    uint64_t bsize = 1;
    for (uint64_t ml : m) bsize *= ml;
    const double h = 1.0 / std::sqrt(double(bsize));

    std::vector<double> law(2 * n, 0.0);
    for (uint64_t k = 0; k < n; ++k) {
        const double c = ext_coeffs.c[k].real();
        bool in_block = true;
        uint64_t rest = k;
        for (int l = 0; l < spec.dim(); ++l) {
            const uint64_t kl = rest % spec.counts[l];
            rest /= spec.counts[l];
            if (kl >= m[l]) in_block = false;
        }
        if (in_block) {
            law[k] = 0.25 * (h + c) * (h + c);
            law[k + n] = 0.25 * (h - c) * (h - c);
        } else {
            law[k] = 0.25 * c * c;
            law[k + n] = 0.25 * c * c;
        }
    }
    return law;
}

namespace {

// extended-register layout: each dimension gets one extra top qubit
StateVector extended_state_vector(const NormalizedState& state, int extra_ancillas) {
    RegisterLayout lay;
    for (int nl : state.spec.qubits()) lay.dims.push_back(nl + 1);
    lay.ancillas = extra_ancillas;
    StateVector sv(lay);
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    // original amplitudes with every extension bit clear
    const int d = state.spec.dim();
    const std::vector<int> qubits = state.spec.qubits();
    for (uint64_t j = 0; j < state.spec.total(); ++j) {
        uint64_t rest = j, idx = 0;
        int shift = 0;
        for (int l = 0; l < d; ++l) {
            const uint64_t jl = rest % state.spec.counts[l];
            rest /= state.spec.counts[l];
            idx |= jl << shift;
            shift += qubits[l] + 1;
        }
        sv.amps[idx] = state.amplitudes[j];
    }
    return sv;
}

void apply_extension_circuit(StateVector& sv, const std::vector<int>& orig_qubits,
                             Backend backend, const Controls& ctrl = {}, bool inverse = false) {
    const int d = int(orig_qubits.size());
    if (!inverse) {
        for (int l = 0; l < d; ++l) {
            const int first = sv.layout.dim_offset(l);
            even_extension(sv, first, orig_qubits[l], first + orig_qubits[l], backend, ctrl);
        }
    } else {
        for (int l = d; l-- > 0;) {
            const int first = sv.layout.dim_offset(l);
            even_extension(sv, first, orig_qubits[l], first + orig_qubits[l], backend, ctrl,
                           true);
        }
    }
}

}  // namespace

std::vector<double> ext_fsr_magnitude_distribution_gate(const NormalizedState& state) {
    StateVector sv = extended_state_vector(state, 0);
    const std::vector<int> qubits = state.spec.qubits();
    apply_extension_circuit(sv, qubits, Backend::GateLevel);
    for (size_t l = 0; l < sv.layout.dims.size(); ++l)
        qft(sv, sv.layout.dim_offset(int(l)), sv.layout.dims[l], true, Backend::GateLevel);
    std::vector<double> dist(sv.amps.size());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = std::norm(sv.amps[i]);
    return dist;
}

std::vector<double> ext_fsr_sign_distribution_gate(const NormalizedState& state,
                                                   const std::vector<uint64_t>& m) {
    StateVector sv = extended_state_vector(state, 1);
    // pull the amplitudes back out: the controlled preparation must start from
    // |0>, so rebuild via a padded Householder under control of the ancilla
    std::vector<double> padded(uint64_t(1) << sv.layout.ancilla_offset(), 0.0);
    for (uint64_t i = 0; i < padded.size(); ++i) padded[i] = sv.amps[i].real();
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    sv.amps[0] = 1.0;

    const int s = sv.layout.ancilla_offset();
    Controls on_s, off_s;
    on_s.add(s, true);
    off_s.add(s, false);
    const std::vector<int> qubits = state.spec.qubits();

    apply_gate(sv, Gate::h(s));
    apply_state_prep(sv, padded, 0, s, on_s);
    apply_extension_circuit(sv, qubits, Backend::GateLevel, on_s);
    for (size_t l = 0; l < sv.layout.dims.size(); ++l)
        qft(sv, sv.layout.dim_offset(int(l)), sv.layout.dims[l], true, Backend::GateLevel, on_s);
    for (size_t l = 0; l < sv.layout.dims.size(); ++l) {
        const int first = sv.layout.dim_offset(int(l));
        int mexp = 0;
        while ((uint64_t(1) << mexp) < m[l]) ++mexp;
        for (int b = 0; b < mexp; ++b) apply_gate(sv, Gate::h(first + b, off_s));
    }
    apply_gate(sv, Gate::h(s));

    std::vector<double> dist(sv.amps.size());
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = std::norm(sv.amps[i]);
    return dist;
}

Reconstruction extension_fsr_readout(const NormalizedState& state, const ReadoutConfig& cfg) {
    const NormalizedState ext = extend_state(state);
    const GridSpec& espec = ext.spec;
    const int d = espec.dim();
    const FourierCoefficients ec = dft_coefficients(ext);

    std::vector<uint64_t> m;
    if (cfg.block_m) {
        m = *cfg.block_m;
        for (int l = 0; l < d; ++l)
            require(m[l] >= 1 && m[l] <= espec.counts[l] / 2,
                    "extension_fsr_readout: M out of range");
    } else {
        m = fsr_adaptive_block(state.spec, cfg.shots, cfg.adaptive_p_hat, true);
    }

    const uint64_t shots_mag = cfg.analytic ? 0 : (cfg.shots + 1) / 2;
    const uint64_t shots_sgn = cfg.analytic ? 0 : cfg.shots - shots_mag;
    const SampledLaw mag = estimate_law(ext_fsr_magnitude_law(ec), shots_mag,
                                        derive_seed(cfg.seed, {0x65787431ULL}), cfg.analytic);
    const SampledLaw sgn = estimate_law(ext_fsr_sign_law(ec, m), shots_sgn,
                                        derive_seed(cfg.seed, {0x65787432ULL}), cfg.analytic);

    Reconstruction rec;
    rec.method = "extfsr";
    rec.shots_used = shots_mag + shots_sgn;
    rec.chosen_m = m;

    const uint64_t ne = espec.total();
    const double cutoff =
        cfg.analytic ? 0.0 : cfg.adaptive_tau / double(std::max<uint64_t>(shots_mag, 1));

    // enumerate block [0,M)^d
    std::vector<double> est;
    std::vector<uint64_t> kv(size_t(d), 0);
    for (;;) {
        const uint64_t k = index_map(kv, espec);
        CoefficientEstimate ce;
        ce.k.assign(kv.begin(), kv.end());
        const double diff = sgn.est[k] - sgn.est[k + ne];
        const double floor_re = 1e-14 * (sgn.est[k] + sgn.est[k + ne]);
        ce.sign_re = diff < -floor_re ? -1 : +1;
        ce.tie_re = std::abs(diff) <= floor_re;
        ce.abs = std::sqrt(mag.est[k]);
        ce.kept = cfg.analytic || mag.est[k] > cutoff;
        if (ce.kept) ce.re = ce.sign_re * ce.abs;
        rec.coeffs.push_back(ce);
        est.push_back(ce.re);

        int l = 0;
        for (; l < d; ++l) {
            if (++kv[l] < m[l]) break;
            kv[l] = 0;
        }
        if (l == d) break;
    }

    rec.result = reconstruct_even_block(state.spec, state.a_n, m, est);
    if (cfg.shift != 0.0)
        for (double& v : rec.result.values) v -= cfg.shift;
    return rec;
}

GridFunction reconstruct_even_block(const GridSpec& orig_spec, double a_n,
                                    const std::vector<uint64_t>& m,
                                    const std::vector<double>& estimates) {
    const int d = orig_spec.dim();
    GridSpec espec;
    espec.counts.resize(d);
    espec.lengths.resize(d);
    for (int l = 0; l < d; ++l) {
        espec.counts[l] = 2 * orig_spec.counts[l];
        espec.lengths[l] = 2.0 * orig_spec.lengths[l];
    }

    std::vector<cplx> dense(espec.total(), cplx(0.0, 0.0));
    std::vector<uint64_t> kv(size_t(d), 0);
    size_t pos = 0;
    for (;;) {
        const double v = estimates[pos++];
        if (v != 0.0) {
            // even symmetry: every sign combination of indices carries the value
            std::vector<uint64_t> flip(size_t(d), 0);
            for (;;) {
                std::vector<uint64_t> idx(kv);
                for (int l = 0; l < d; ++l)
                    if (flip[l]) idx[l] = (espec.counts[l] - kv[l]) % espec.counts[l];
                dense[index_map(idx, espec)] = v;
                int l = 0;
                for (; l < d; ++l) {
                    if (++flip[l] <= 1) break;
                    flip[l] = 0;
                }
                if (l == d) break;
            }
        }
        int l = 0;
        for (; l < d; ++l) {
            if (++kv[l] < m[l]) break;
            kv[l] = 0;
        }
        if (l == d) break;
    }

    std::vector<size_t> dims(espec.counts.begin(), espec.counts.end());
    fft_nd(dense, dims, +1);

    // restrict the extended reconstruction to the original domain
    GridFunction out;
    out.spec = orig_spec;
    out.values.resize(orig_spec.total());
    const double c_n = a_n / std::sqrt(double(orig_spec.total()));
    for (uint64_t j = 0; j < orig_spec.total(); ++j) {
        uint64_t rest = j, eidx = 0, stride = 1;
        for (int l = 0; l < d; ++l) {
            eidx += (rest % orig_spec.counts[l]) * stride;
            rest /= orig_spec.counts[l];
            stride *= espec.counts[l];
        }
        out.values[j] = c_n * dense[eidx].real();
    }
    return out;
}

void write_coefficient_csv(const std::string& path,
                           const std::vector<CoefficientEstimate>& coeffs, int dim) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (int l = 1; l <= dim; ++l) out << "k" << l << ",";
    out << "re,im,abs_est,sign_re,sign_im\n";
    char buf[40];
    for (const auto& ce : coeffs) {
        for (int l = 0; l < dim; ++l) out << ce.k[l] << ",";
        std::snprintf(buf, sizeof buf, "%.17g", ce.re);
        out << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", ce.im);
        out << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", ce.abs);
        out << buf << "," << ce.sign_re << "," << ce.sign_im << "\n";
    }
}

}  // namespace qread
