#include "qread/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace qread {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_slice(const StateVector& s, int first, int count) {
    require(count >= 1 && first >= 0 && first + count <= s.layout.total(),
            "qubit slice out of range");
}

void check_ctrl_disjoint(const Controls& ctrl, int first, int count) {
    const uint64_t slice_mask = ((count >= 64 ? 0 : (uint64_t(1) << count)) - 1) << first;
    require((ctrl.mask & slice_mask) == 0, "controls overlap the target slice");
}

}  // namespace

int RegisterLayout::total() const {
    int t = ancillas;
    for (int n : dims) t += n;
    return t;
}

int RegisterLayout::dim_offset(int dim) const {
    int off = 0;
    for (int i = 0; i < dim; ++i) off += dims[i];
    return off;
}

int RegisterLayout::ancilla_offset() const { return total() - ancillas; }

void RegisterLayout::validate() const {
    for (int n : dims) require(n >= 1, "register must have at least one qubit");
    require(ancillas >= 0, "negative ancilla count");
    require(total() >= 1, "empty layout");
    require(total() <= max_qubits, "layout exceeds qubit cap");
}

StateVector::StateVector(RegisterLayout lay) : layout(std::move(lay)) {
    layout.validate();
    amps.assign(uint64_t(1) << layout.total(), cplx(0.0, 0.0));
    amps[0] = 1.0;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::check_norm(double tol) const {
    if (norm() > 1.0 + tol) throw std::runtime_error("state norm exceeds 1");
}

void Controls::add(int qubit, bool required_value) {
    const uint64_t bit = uint64_t(1) << qubit;
    if (mask & bit) throw std::invalid_argument("duplicate control qubit");
    mask |= bit;
    if (required_value) value |= bit;
}

void apply_gate(StateVector& state, const Gate& gate) {
    const int t = gate.target;
    require(t >= 0 && t < state.layout.total(), "gate target out of range");
    require((gate.ctrl.mask & (uint64_t(1) << t)) == 0, "control overlaps target");
    const uint64_t n = state.amps.size();
    const uint64_t step = uint64_t(1) << t;
    auto& a = state.amps;

    switch (gate.kind) {
        case Gate::Kind::H: {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for (uint64_t base = 0; base < n; base += 2 * step)
                for (uint64_t i = base; i < base + step; ++i) {
                    if (!gate.ctrl.pass(i)) continue;
                    const cplx lo = a[i], hi = a[i + step];
                    a[i] = (lo + hi) * inv_sqrt2;
                    a[i + step] = (lo - hi) * inv_sqrt2;
                }
            break;
        }
        case Gate::Kind::X: {
            for (uint64_t base = 0; base < n; base += 2 * step)
                for (uint64_t i = base; i < base + step; ++i) {
                    if (!gate.ctrl.pass(i)) continue;
                    std::swap(a[i], a[i + step]);
                }
            break;
        }
        case Gate::Kind::Z: {
            for (uint64_t base = 0; base < n; base += 2 * step)
                for (uint64_t i = base; i < base + step; ++i) {
                    if (!gate.ctrl.pass(i)) continue;
                    a[i + step] = -a[i + step];
                }
            break;
        }
        case Gate::Kind::P: {
            const cplx ph(std::cos(gate.angle), std::sin(gate.angle));
            for (uint64_t base = 0; base < n; base += 2 * step)
                for (uint64_t i = base; i < base + step; ++i) {
                    if (!gate.ctrl.pass(i)) continue;
                    a[i + step] *= ph;
                }
            break;
        }
        case Gate::Kind::Ry: {
            const double c = std::cos(gate.angle / 2.0), s = std::sin(gate.angle / 2.0);
            for (uint64_t base = 0; base < n; base += 2 * step)
                for (uint64_t i = base; i < base + step; ++i) {
                    if (!gate.ctrl.pass(i)) continue;
                    const cplx lo = a[i], hi = a[i + step];
                    a[i] = c * lo - s * hi;
                    a[i + step] = s * lo + c * hi;
                }
            break;
        }
    }
}

namespace {

// Runs fn(base) for every pair (high, low) outside the slice that passes the
// controls; base is the index with slice bits zero. Slice entries then live at
// base + k*stride for k in [0, 2^count).
template <typename Fn>
void for_each_slice_group(const StateVector& s, int first, int count, const Controls& ctrl,
                          Fn&& fn) {
    const uint64_t n = s.amps.size();
    const uint64_t stride = uint64_t(1) << first;
    const uint64_t block = stride << count;
    for (uint64_t high = 0; high < n; high += block)
        for (uint64_t low = 0; low < stride; ++low) {
            const uint64_t base = high + low;
            if (!ctrl.pass(base)) continue;
            fn(base);
        }
}

void qft_gate_level(StateVector& state, int first, int count, bool inverse,
                    const Controls& ctrl) {
    const auto cp = [&](int control, int target, double angle) {
        Controls c = ctrl;
        c.add(control, true);
        apply_gate(state, Gate::p(target, angle, c));
    };
    const auto swap_pair = [&](int qa, int qb) {
        // SWAP via three CX
        Controls ca = ctrl, cb = ctrl;
        ca.add(qa, true);
        cb.add(qb, true);
        apply_gate(state, Gate::x(qb, ca));
        apply_gate(state, Gate::x(qa, cb));
        apply_gate(state, Gate::x(qb, ca));
    };
    if (!inverse) {
        for (int i = count - 1; i >= 0; --i) {
            apply_gate(state, Gate::h(first + i, ctrl));
            for (int m = i - 1; m >= 0; --m)
                cp(first + m, first + i, kPi / double(uint64_t(1) << (i - m)));
        }
        for (int i = 0; i < count / 2; ++i) swap_pair(first + i, first + count - 1 - i);
    } else {
        for (int i = 0; i < count / 2; ++i) swap_pair(first + i, first + count - 1 - i);
        for (int i = 0; i < count; ++i) {
            for (int m = 0; m < i; ++m)
                cp(first + m, first + i, -kPi / double(uint64_t(1) << (i - m)));
            apply_gate(state, Gate::h(first + i, ctrl));
        }
    }
}

void qft_fast(StateVector& state, int first, int count, bool inverse, const Controls& ctrl) {
    const uint64_t m = uint64_t(1) << count;
    const uint64_t stride = uint64_t(1) << first;
    const double scale = 1.0 / std::sqrt(double(m));
    const int sign = inverse ? -1 : +1;
    for_each_slice_group(state, first, count, ctrl, [&](uint64_t base) {
        fft_pow2_strided(state.amps.data() + base, m, stride, sign);
        for (uint64_t k = 0; k < m; ++k) state.amps[base + k * stride] *= scale;
    });
}

void permute_slice(StateVector& state, int first, int count, const Controls& ctrl,
                   uint64_t shift) {
    // |k> -> |(k + shift) mod 2^count> on the slice
    const uint64_t m = uint64_t(1) << count;
    const uint64_t stride = uint64_t(1) << first;
    static thread_local std::vector<cplx> scratch;
    scratch.resize(m);
    for_each_slice_group(state, first, count, ctrl, [&](uint64_t base) {
        for (uint64_t k = 0; k < m; ++k)
            scratch[(k + shift) & (m - 1)] = state.amps[base + k * stride];
        for (uint64_t k = 0; k < m; ++k) state.amps[base + k * stride] = scratch[k];
    });
}

}  // namespace

void qft(StateVector& state, int first, int count, bool inverse, Backend backend,
         const Controls& ctrl) {
    check_slice(state, first, count);
    check_ctrl_disjoint(ctrl, first, count);
    if (backend == Backend::GateLevel)
        qft_gate_level(state, first, count, inverse, ctrl);
    else
        qft_fast(state, first, count, inverse, ctrl);
}

void modular_add(StateVector& state, int first, int count, uint64_t addend, bool inverse,
                 Backend backend, const Controls& ctrl) {
    check_slice(state, first, count);
    check_ctrl_disjoint(ctrl, first, count);
    const uint64_t m = uint64_t(1) << count;
    require(addend < m, "modular_add: addend out of range");
    if (backend == Backend::FastPath) {
        permute_slice(state, first, count, ctrl, inverse ? m - addend : addend);
        return;
    }
    // Draper adder: QFT, per-qubit phases diag(exp(2*pi*i*j*k/N)), inverse QFT.
    qft(state, first, count, false, Backend::GateLevel, ctrl);
    const double sgn = inverse ? -1.0 : 1.0;
    for (int b = 0; b < count; ++b) {
        const double angle =
            sgn * 2.0 * kPi * double(addend) * double(uint64_t(1) << b) / double(m);
        apply_gate(state, Gate::p(first + b, angle, ctrl));
    }
    qft(state, first, count, true, Backend::GateLevel, ctrl);
}

void incrementer(StateVector& state, int first, int count, Backend backend,
                 const Controls& ctrl, bool inverse) {
    check_slice(state, first, count);
    check_ctrl_disjoint(ctrl, first, count);
    if (backend == Backend::FastPath) {
        const uint64_t m = uint64_t(1) << count;
        permute_slice(state, first, count, ctrl, inverse ? m - 1 : 1);
        return;
    }
    const auto mcx = [&](int b) {
        Controls c = ctrl;
        for (int low = 0; low < b; ++low) c.add(first + low, true);
        apply_gate(state, Gate::x(first + b, c));
    };
    if (!inverse) {
        for (int b = count - 1; b >= 1; --b) mcx(b);
        apply_gate(state, Gate::x(first, ctrl));
    } else {
        apply_gate(state, Gate::x(first, ctrl));
        for (int b = 1; b <= count - 1; ++b) mcx(b);
    }
}

void even_extension(StateVector& state, int first, int count, int ancilla, Backend backend,
                    const Controls& ctrl, bool inverse, bool enforce_zero_ancilla) {
    check_slice(state, first, count);
    require(ancilla == first + count, "even_extension: ancilla must sit just above the slice");
    check_ctrl_disjoint(ctrl, first, count + 1);
    const uint64_t anc_bit = uint64_t(1) << ancilla;
    if (!inverse && enforce_zero_ancilla) {
        for (uint64_t i = 0; i < state.amps.size(); ++i)
            if ((i & anc_bit) && ctrl.pass(i) && std::norm(state.amps[i]) > 1e-24)
                throw std::invalid_argument("even_extension: ancilla not in |0>");
    }

    Controls on_anc = ctrl;
    on_anc.add(ancilla, true);
    const auto mirror = [&] {
        if (backend == Backend::GateLevel) {
            for (int b = 0; b < count; ++b) apply_gate(state, Gate::x(first + b, on_anc));
        } else {
            // X on every slice bit when the ancilla is set: index XOR with the mask
            const uint64_t slice_mask = ((uint64_t(1) << count) - 1) << first;
            auto& a = state.amps;
            for (uint64_t i = 0; i < a.size(); ++i) {
                if (!(i & anc_bit) || !ctrl.pass(i)) continue;
                const uint64_t j = i ^ slice_mask;
                if (j > i) std::swap(a[i], a[j]);
            }
        }
    };
    if (!inverse) {
        apply_gate(state, Gate::h(ancilla, ctrl));
        mirror();
        incrementer(state, first, count, backend, on_anc);
    } else {
        incrementer(state, first, count, backend, on_anc, /*inverse=*/true);
        mirror();
        apply_gate(state, Gate::h(ancilla, ctrl));
    }
}

void negate_registers(StateVector& state, Backend backend, const Controls& ctrl, bool inverse) {
    const auto flip_all = [&](int first, int count) {
        for (int b = 0; b < count; ++b) apply_gate(state, Gate::x(first + b, ctrl));
    };
    if (!inverse) {
        for (size_t l = 0; l < state.layout.dims.size(); ++l) {
            const int first = state.layout.dim_offset(int(l));
            flip_all(first, state.layout.dims[l]);
            incrementer(state, first, state.layout.dims[l], backend, ctrl);
        }
    } else {
        for (size_t li = state.layout.dims.size(); li-- > 0;) {
            const int first = state.layout.dim_offset(int(li));
            incrementer(state, first, state.layout.dims[li], backend, ctrl, /*inverse=*/true);
            flip_all(first, state.layout.dims[li]);
        }
    }
}

void apply_state_prep(StateVector& state, const std::vector<double>& target_amps, int first,
                      int count, const Controls& ctrl) {
    check_slice(state, first, count);
    check_ctrl_disjoint(ctrl, first, count);
    const uint64_t m = uint64_t(1) << count;
    require(target_amps.size() == m, "state_prep: amplitude count mismatch");
    double nrm = 0.0;
    for (double v : target_amps) nrm += v * v;
    require(std::abs(nrm - 1.0) < 1e-9, "state_prep: target not unit norm");

    // Householder vector w = e0 - psi; U = I - 2 w w^T / (w.w) maps |0> -> |psi>.
    std::vector<double> w(target_amps.size());
    for (size_t k = 0; k < w.size(); ++k) w[k] = (k == 0 ? 1.0 : 0.0) - target_amps[k];
    double ww = 0.0;
    for (double v : w) ww += v * v;
    if (ww < 1e-24) return;  // psi == |0>, U is the identity
    const double coef = 2.0 / ww;

    const uint64_t stride = uint64_t(1) << first;
    for_each_slice_group(state, first, count, ctrl, [&](uint64_t base) {
        cplx dot(0.0, 0.0);
        for (uint64_t k = 0; k < m; ++k) dot += w[k] * state.amps[base + k * stride];
        dot *= coef;
        for (uint64_t k = 0; k < m; ++k) state.amps[base + k * stride] -= dot * w[k];
    });
}

uint64_t MeasurementHistogram::count_of(uint64_t outcome) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), outcome,
                               [](const auto& p, uint64_t v) { return p.first < v; });
    return (it != counts.end() && it->first == outcome) ? it->second : 0;
}

void MeasurementHistogram::merge(const MeasurementHistogram& other) {
    if (qubits != other.qubits)
        throw std::invalid_argument("histogram merge: mismatched qubit sets");
    std::vector<std::pair<uint64_t, uint64_t>> merged;
    merged.reserve(counts.size() + other.counts.size());
    size_t i = 0, j = 0;
    while (i < counts.size() || j < other.counts.size()) {
        if (j == other.counts.size() ||
            (i < counts.size() && counts[i].first < other.counts[j].first)) {
            merged.push_back(counts[i++]);
        } else if (i == counts.size() || other.counts[j].first < counts[i].first) {
            merged.push_back(other.counts[j++]);
        } else {
            merged.emplace_back(counts[i].first, counts[i].second + other.counts[j].second);
            ++i;
            ++j;
        }
    }
    counts = std::move(merged);
    total_shots += other.total_shots;
}

std::vector<double> marginal_probabilities(const StateVector& state,
                                           const std::vector<int>& qubits) {
    std::vector<int> qs = qubits;
    std::sort(qs.begin(), qs.end());
    require(!qs.empty(), "no measured qubits");
    require(std::adjacent_find(qs.begin(), qs.end()) == qs.end(), "duplicate measured qubit");
    require(qs.front() >= 0 && qs.back() < state.layout.total(), "measured qubit out of range");

    std::vector<double> probs(uint64_t(1) << qs.size(), 0.0);
    for (uint64_t i = 0; i < state.amps.size(); ++i) {
        const double p = std::norm(state.amps[i]);
        if (p == 0.0) continue;
        uint64_t out = 0;
        for (size_t r = 0; r < qs.size(); ++r) out |= ((i >> qs[r]) & 1u) << r;
        probs[out] += p;
    }
    return probs;
}

MeasurementHistogram sample(const StateVector& state, const std::vector<int>& qubits,
                            uint64_t shots, uint64_t seed) {
    require(shots >= 1, "sample: shots must be >= 1");
    std::vector<int> qs = qubits;
    std::sort(qs.begin(), qs.end());
    std::vector<double> probs = marginal_probabilities(state, qs);
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("sample: state not normalized over the full register");

    AliasTable alias(probs);
    Rng rng(seed);
    MeasurementHistogram hist;
    hist.qubits = qs;
    hist.total_shots = shots;
    std::vector<uint64_t> flat(probs.size(), 0);
    for (uint64_t s = 0; s < shots; ++s) flat[alias.draw(rng)]++;
    for (uint64_t o = 0; o < flat.size(); ++o)
        if (flat[o]) hist.counts.emplace_back(o, flat[o]);
    return hist;
}

PostSelection post_select(const StateVector& state, const std::vector<int>& qubits,
                          uint64_t outcome) {
    std::vector<int> qs = qubits;
    std::sort(qs.begin(), qs.end());
    require(!qs.empty(), "post_select: no qubits");
    require(qs.back() < state.layout.total(), "post_select: qubit out of range");
    require(outcome < (uint64_t(1) << qs.size()), "post_select: outcome out of range");

    uint64_t mask = 0, value = 0;
    for (size_t r = 0; r < qs.size(); ++r) {
        mask |= uint64_t(1) << qs[r];
        if ((outcome >> r) & 1u) value |= uint64_t(1) << qs[r];
    }
    double p = 0.0;
    for (uint64_t i = 0; i < state.amps.size(); ++i)
        if ((i & mask) == value) p += std::norm(state.amps[i]);
    if (p <= 0.0) throw std::runtime_error("post_select: zero-probability outcome");

    PostSelection result{state, p};
    const double scale = 1.0 / std::sqrt(p);
    for (uint64_t i = 0; i < result.state.amps.size(); ++i) {
        if ((i & mask) == value)
            result.state.amps[i] *= scale;
        else
            result.state.amps[i] = 0.0;
    }
    return result;
}

}  // namespace qread
