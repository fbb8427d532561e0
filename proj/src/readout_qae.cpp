#include "qread/readout_qae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qread/rng.hpp"

namespace qread {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double clamp01sym(double v) { return std::min(1.0, std::max(-1.0, v)); }

}  // namespace

RegisterLayout ShiftOracle::layout() const {
    RegisterLayout lay;
    switch (kind) {
        case Kind::RealSpace:
            lay.dims = state.spec.qubits();
            lay.ancillas = 1;  // shift ancilla
            break;
        case Kind::FourierExtended:
            for (int nl : state.spec.qubits()) lay.dims.push_back(nl + 1);
            lay.ancillas = 1;
            break;
        case Kind::FourierRe:
        case Kind::FourierIm:
            lay.dims = state.spec.qubits();
            lay.ancillas = 2;  // conjugation ancilla q, shift ancilla s
            break;
    }
    return lay;
}

double ShiftOracle::target_value() const { return cached_target; }

namespace {

double compute_target(const ShiftOracle& o) {
    const auto& state = o.state;
    const auto& index = o.index;
    switch (o.kind) {
        case ShiftOracle::Kind::RealSpace:
            return state.amplitudes[index_map(index, state.spec)];
        case ShiftOracle::Kind::FourierExtended: {
            const NormalizedState ext = extend_state(state);
            const FourierCoefficients ec = dft_coefficients(ext);
            return ec.c[index_map(index, ext.spec)].real();
        }
        case ShiftOracle::Kind::FourierRe:
        case ShiftOracle::Kind::FourierIm: {
            const FourierCoefficients c = dft_coefficients(state);
            const cplx v = c.c[index_map(index, state.spec)];
            return o.kind == ShiftOracle::Kind::FourierRe ? v.real() : v.imag();
        }
    }
    return 0.0;
}

}  // namespace

void ShiftOracle::apply(StateVector& sv, bool adjoint) const {
    const RegisterLayout lay = sv.layout;
    const int s = lay.total() - 1;  // shift ancilla is the top qubit
    Controls on_s;
    on_s.add(s, true);
    Controls off_s;
    off_s.add(s, false);
    const double theta_b = 2.0 * std::acos(clamp01sym(b));
    const std::vector<int> orig_qubits = state.spec.qubits();
    const Backend bk = Backend::FastPath;

    const auto fwd_qfts = [&] {
        for (size_t l = 0; l < lay.dims.size(); ++l)
            qft(sv, lay.dim_offset(int(l)), lay.dims[l], /*inverse=*/true, bk, on_s);
    };
    const auto inv_qfts = [&] {
        for (size_t l = lay.dims.size(); l-- > 0;)
            qft(sv, lay.dim_offset(int(l)), lay.dims[l], /*inverse=*/false, bk, on_s);
    };
    const auto ext_circuit = [&](bool inv) {
        if (!inv) {
            for (size_t l = 0; l < lay.dims.size(); ++l) {
                const int first = lay.dim_offset(int(l));
                even_extension(sv, first, orig_qubits[l], first + orig_qubits[l], bk, on_s,
                               false, /*enforce_zero_ancilla=*/false);
            }
        } else {
            for (size_t l = lay.dims.size(); l-- > 0;) {
                const int first = lay.dim_offset(int(l));
                even_extension(sv, first, orig_qubits[l], first + orig_qubits[l], bk, on_s,
                               true, /*enforce_zero_ancilla=*/false);
            }
        }
    };

    if (kind == Kind::RealSpace || kind == Kind::FourierExtended) {
        const bool extended = kind == Kind::FourierExtended;
        if (!adjoint) {
            apply_gate(sv, Gate::h(s));
            apply_state_prep(sv, prep_amps, 0, prep_count, on_s);
            if (extended) {
                ext_circuit(false);
                fwd_qfts();
            }
            modular_add(sv, 0, prep_count, flat_index, /*inverse=*/true, bk, on_s);
            apply_gate(sv, Gate::ry(0, theta_b, off_s));
            apply_gate(sv, Gate::h(s));
        } else {
            apply_gate(sv, Gate::h(s));
            apply_gate(sv, Gate::ry(0, -theta_b, off_s));
            modular_add(sv, 0, prep_count, flat_index, /*inverse=*/false, bk, on_s);
            if (extended) {
                inv_qfts();
                ext_circuit(true);
            }
            apply_state_prep(sv, prep_amps, 0, prep_count, on_s);  // self-adjoint
            apply_gate(sv, Gate::h(s));
        }
        return;
    }

    // FourierRe / FourierIm: conjugation trick separates the two parts
    const int q = lay.ancilla_offset();
    Controls on_qs = on_s;
    on_qs.add(q, true);
    const bool want_im = kind == Kind::FourierIm;
    if (!adjoint) {
        apply_gate(sv, Gate::h(s));
        apply_state_prep(sv, prep_amps, 0, prep_count, on_s);
        apply_gate(sv, Gate::h(q, on_s));
        fwd_qfts();
        negate_registers(sv, bk, on_qs);
        apply_gate(sv, Gate::h(q, on_s));
        apply_gate(sv, Gate::p(q, -kPi / 2.0, on_s));
        if (want_im) apply_gate(sv, Gate::x(q, on_s));
        modular_add(sv, 0, prep_count, flat_index, /*inverse=*/true, bk, on_s);
        apply_gate(sv, Gate::ry(0, theta_b, off_s));
        apply_gate(sv, Gate::h(s));
    } else {
        apply_gate(sv, Gate::h(s));
        apply_gate(sv, Gate::ry(0, -theta_b, off_s));
        modular_add(sv, 0, prep_count, flat_index, /*inverse=*/false, bk, on_s);
        if (want_im) apply_gate(sv, Gate::x(q, on_s));
        apply_gate(sv, Gate::p(q, kPi / 2.0, on_s));
        apply_gate(sv, Gate::h(q, on_s));
        negate_registers(sv, bk, on_qs, /*inverse=*/true);
        inv_qfts();
        apply_gate(sv, Gate::h(q, on_s));
        apply_state_prep(sv, prep_amps, 0, prep_count, on_s);
        apply_gate(sv, Gate::h(s));
    }
}

StateVector ShiftOracle::prepare() const {
    StateVector sv(layout());
    apply(sv, /*adjoint=*/false);
    return sv;
}

ShiftOracle build_shift_oracle(ShiftOracle::Kind kind, const NormalizedState& state,
                               const std::vector<uint64_t>& index, double b) {
    ShiftOracle o;
    o.kind = kind;
    o.state = state;
    o.index = index;
    o.b = b;
    require(std::abs(b) <= 1.0, "shift oracle: |b| must be <= 1");
    const int d = state.spec.dim();
    require(int(index.size()) == d, "shift oracle: index dimension mismatch");

    if (kind == ShiftOracle::Kind::FourierExtended) {
        GridSpec espec;
        espec.counts.resize(d);
        espec.lengths.resize(d);
        for (int l = 0; l < d; ++l) {
            espec.counts[l] = 2 * state.spec.counts[l];
            espec.lengths[l] = 2.0 * state.spec.lengths[l];
            require(index[l] < espec.counts[l], "shift oracle: index out of range");
        }
        o.flat_index = index_map(index, espec);
        // psi padded into the extended register layout (extension bits clear)
        const std::vector<int> qubits = state.spec.qubits();
        int total = 0;
        for (int nl : qubits) total += nl + 1;
        o.prep_count = total;
        o.prep_amps.assign(uint64_t(1) << total, 0.0);
        for (uint64_t j = 0; j < state.spec.total(); ++j) {
            uint64_t rest = j, idx = 0;
            int shift = 0;
            for (int l = 0; l < d; ++l) {
                idx |= (rest % state.spec.counts[l]) << shift;
                rest /= state.spec.counts[l];
                shift += qubits[l] + 1;
            }
            o.prep_amps[idx] = state.amplitudes[j];
        }
    } else {
        for (int l = 0; l < d; ++l)
            require(index[l] < state.spec.counts[l], "shift oracle: index out of range");
        o.flat_index = index_map(index, state.spec);
        int total = 0;
        for (int nl : state.spec.qubits()) total += nl;
        o.prep_count = total;
        o.prep_amps = state.amplitudes;
    }
    o.cached_target = compute_target(o);
    return o;
}

void grover_apply(const ShiftOracle& oracle, StateVector& sv, uint64_t power) {
    for (uint64_t i = 0; i < power; ++i) {
        sv.amps[0] = -sv.amps[0];            // S0
        oracle.apply(sv, /*adjoint=*/true);  // A^dagger
        sv.amps[0] = -sv.amps[0];            // S0
        oracle.apply(sv, /*adjoint=*/false);  // A
        for (cplx& a : sv.amps) a = -a;       // global phase of Q
    }
}

RqaeResult rqae_estimate(const ShiftOracle& oracle, const RqaeConfig& cfg, uint64_t seed) {
    require(cfg.eps0 > 0.0 && cfg.eps0 < 0.5, "rqae: eps0 must lie in (0, 0.5)");
    require(cfg.gamma > 0.0 && cfg.gamma < 1.0, "rqae: gamma must lie in (0, 1)");
    require(cfg.q >= 2.0, "rqae: amplification policy q must be >= 2");

    const int t_max =
        int(std::ceil(std::log(kPi / (4.0 * cfg.eps0)) / std::log(cfg.q))) + 3;
    const double gamma_i = cfg.gamma / double(t_max);
    const double delta_p = 0.10;  // per-iteration Hoeffding radius in probability
    uint64_t shots = uint64_t(std::ceil(std::log(2.0 / gamma_i) / (2.0 * delta_p * delta_p)));
    shots = std::max(shots, cfg.min_shots_per_iter);

    Rng rng(seed);
    RqaeResult res;
    double a_lo = -1.0, a_hi = 1.0;
    uint64_t prev_k = 0;  // Grover power of the previous round
    int stalls = 0;

    for (int iter = 0; iter < t_max + 8; ++iter) {
        res.iterations = iter + 1;
        const bool first = iter == 0;
        double b;
        uint64_t k;
        if (first) {
            b = 0.5;
            k = 0;
        } else {
            b = clamp01sym(-a_lo);
            const double s_hi = std::max(1e-15, std::min(1.0, (a_hi + b) / 2.0));
            const double theta_hi = std::asin(s_hi);
            // largest power with (2k+1) * theta_hi <= pi/2, growth ratio <= q on k
            const uint64_t pow_geom = uint64_t(std::max(1.0, std::floor((kPi / 2.0) / theta_hi)));
            const uint64_t k_geom = (pow_geom - 1) / 2;
            const uint64_t k_cap = std::max<uint64_t>(1, uint64_t(cfg.q * double(prev_k)));
            k = std::min(k_geom, k_cap);
        }

        double p_zero;
        if (cfg.channel == RqaeConfig::Channel::Analytic) {
            const double sin_theta =
                std::min(1.0, std::max(-1.0, 0.5 * (oracle.cached_target + b)));
            const double amp = std::sin(double(2 * k + 1) * std::asin(sin_theta));
            p_zero = amp * amp;
        } else {
            ShiftOracle ob = oracle;
            ob.b = b;
            StateVector sv = ob.prepare();
            grover_apply(ob, sv, k);
            p_zero = std::norm(sv.amps[0]);
        }

        uint64_t cnt = 0;
        for (uint64_t sh = 0; sh < shots; ++sh)
            if (rng.uniform01() < p_zero) ++cnt;
        const uint64_t pw = 2 * k + 1;
        res.oracle_queries += shots * pw;
        res.max_grover_power = std::max(res.max_grover_power, k);

        const double phat = double(cnt) / double(shots);
        const double delta = std::sqrt(std::log(2.0 / gamma_i) / (2.0 * double(shots)));
        const double plo = std::max(0.0, phat - delta);
        const double phi = std::min(1.0, phat + delta);

        const double w_before = a_hi - a_lo;
        if (first) {
            // |a+b| in [r_lo, r_hi]; both sign branches feasible in [-1, 1]
            const double r_lo = 2.0 * std::sqrt(plo), r_hi = 2.0 * std::sqrt(phi);
            double lo = 2.0, hi = -2.0;
            if (r_lo - b <= 1.0) {  // positive branch
                lo = std::min(lo, std::max(-1.0, r_lo - b));
                hi = std::max(hi, std::min(1.0, r_hi - b));
            }
            if (-r_lo - b >= -1.0) {  // negative branch
                lo = std::min(lo, std::max(-1.0, -r_hi - b));
                hi = std::max(hi, std::min(1.0, -r_lo - b));
            }
            if (lo <= hi) {
                a_lo = std::max(a_lo, lo);
                a_hi = std::min(a_hi, hi);
            }
        } else {
            const double th_lo = std::asin(std::sqrt(plo)) / double(pw);
            const double th_hi = std::asin(std::sqrt(phi)) / double(pw);
            a_lo = std::max(a_lo, 2.0 * std::sin(th_lo) - b);
            a_hi = std::min(a_hi, 2.0 * std::sin(th_hi) - b);
        }
        if (a_lo > a_hi) {  // inconsistent rounds; collapse to the midpoint
            const double mid = 0.5 * (a_lo + a_hi);
            a_lo = a_hi = mid;
        }
        prev_k = k;

        res.estimate = 0.5 * (a_lo + a_hi);
        res.half_width = 0.5 * (a_hi - a_lo);
        if (res.half_width <= cfg.eps0) {
            res.converged = true;
            return res;
        }
        if (!first) {
            stalls = (a_hi - a_lo > 0.9 * w_before) ? stalls + 1 : 0;
            if (stalls >= 4) break;  // schedule exhaustion, reported below
        }
    }
    res.converged = res.half_width <= cfg.eps0;
    return res;
}

Reconstruction rsqae_readout(const NormalizedState& state, const std::vector<uint64_t>& targets,
                             const RqaeConfig& cfg, uint64_t seed) {
    Reconstruction rec;
    rec.method = "rsqae";
    rec.result.spec = state.spec;
    rec.result.values.assign(state.spec.total(), 0.0);
    for (uint64_t j : targets) {
        require(j < state.spec.total(), "rsqae_readout: target outside the grid");
        const ShiftOracle oracle = build_shift_oracle(ShiftOracle::Kind::RealSpace, state,
                                                      index_unmap(j, state.spec));
        const RqaeResult r = rqae_estimate(oracle, cfg, derive_seed(seed, {j}));
        if (!r.converged)
            throw std::runtime_error("rsqae_readout: estimation did not converge at target " +
                                     std::to_string(j));
        rec.result.values[j] = state.a_n * r.estimate;
        rec.queries += r.oracle_queries;
    }
    return rec;
}

Reconstruction fsqae_readout(const NormalizedState& state, const std::vector<uint64_t>& m,
                             const RqaeConfig& cfg, uint64_t seed) {
    const int d = state.spec.dim();
    require(int(m.size()) == d, "fsqae_readout: block dimension mismatch");
    for (int l = 0; l < d; ++l)
        require(m[l] >= 1 && m[l] <= state.spec.counts[l], "fsqae_readout: M out of range");

    Reconstruction rec;
    rec.method = "fsqae";
    rec.chosen_m = m;

    std::vector<double> est;
    std::vector<uint64_t> kv(size_t(d), 0);
    for (;;) {
        const ShiftOracle oracle =
            build_shift_oracle(ShiftOracle::Kind::FourierExtended, state, kv);
        const RqaeResult r =
            rqae_estimate(oracle, cfg, derive_seed(seed, {0xf5ULL, oracle.flat_index}));
        if (!r.converged)
            throw std::runtime_error("fsqae_readout: estimation did not converge");
        est.push_back(r.estimate);
        rec.queries += r.oracle_queries;
        CoefficientEstimate ce;
        ce.k.assign(kv.begin(), kv.end());
        ce.re = r.estimate;
        ce.abs = std::abs(r.estimate);
        ce.sign_re = r.estimate < 0.0 ? -1 : +1;
        ce.queries = r.oracle_queries;
        rec.coeffs.push_back(std::move(ce));

        int l = 0;
        for (; l < d; ++l) {
            if (++kv[l] < m[l]) break;
            kv[l] = 0;
        }
        if (l == d) break;
    }
    rec.result = reconstruct_even_block(state.spec, state.a_n, m, est);
    return rec;
}

Reconstruction fsqae2_readout(const NormalizedState& state, const std::vector<uint64_t>& m,
                              const RqaeConfig& cfg, uint64_t seed) {
    Reconstruction rec;
    rec.method = "fsqae2";
    rec.chosen_m = m;

    const auto block = fsr_dominant_block(state.spec, m);
    std::vector<cplx> est(block.size());
    for (size_t i = 0; i < block.size(); ++i) {
        const ShiftOracle ore =
            build_shift_oracle(ShiftOracle::Kind::FourierRe, state, block[i]);
        const ShiftOracle oim =
            build_shift_oracle(ShiftOracle::Kind::FourierIm, state, block[i]);
        const RqaeResult rre =
            rqae_estimate(ore, cfg, derive_seed(seed, {0xf2ULL, ore.flat_index, 0}));
        const RqaeResult rim =
            rqae_estimate(oim, cfg, derive_seed(seed, {0xf2ULL, oim.flat_index, 1}));
        if (!rre.converged || !rim.converged)
            throw std::runtime_error("fsqae2_readout: estimation did not converge");
        est[i] = cplx(rre.estimate, rim.estimate);
        rec.queries += rre.oracle_queries + rim.oracle_queries;

        CoefficientEstimate ce;
        ce.queries = rre.oracle_queries + rim.oracle_queries;
        ce.k.assign(block[i].begin(), block[i].end());
        ce.re = rre.estimate;
        ce.im = rim.estimate;
        ce.abs = std::abs(est[i]);
        ce.sign_re = ce.re < 0.0 ? -1 : +1;
        ce.sign_im = ce.im < 0.0 ? -1 : +1;
        rec.coeffs.push_back(std::move(ce));
    }
    rec.result = reconstruct_hermitian_block(
        state.spec, state.a_n / std::sqrt(double(state.spec.total())), block, std::move(est));
    return rec;
}

}  // namespace qread
