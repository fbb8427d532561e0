#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qread/rng.hpp"
#include "qread/statevec.hpp"

using namespace qread;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector make_state(std::vector<int> dims, int ancillas, const std::vector<cplx>& amps) {
    StateVector sv(RegisterLayout{std::move(dims), ancillas});
    REQUIRE(amps.size() == sv.amps.size());
    sv.amps = amps;
    return sv;
}

std::vector<double> random_real_state(int n, Rng& rng) {
    std::vector<double> psi(size_t(1) << n);
    double nrm = 0.0;
    for (double& v : psi) {
        v = 2.0 * rng.uniform01() - 1.0;
        nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    for (double& v : psi) v /= nrm;
    return psi;
}

std::vector<cplx> random_complex_state(int n, Rng& rng) {
    std::vector<cplx> psi(size_t(1) << n);
    double nrm = 0.0;
    for (cplx& v : psi) {
        v = cplx(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0);
        nrm += std::norm(v);
    }
    nrm = std::sqrt(nrm);
    for (cplx& v : psi) v /= nrm;
    return psi;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("elementary gates") {
    StateVector sv(RegisterLayout{{1}, 0});
    apply_gate(sv, Gate::h(0));
    CHECK(sv.amps[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(sv.amps[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    StateVector sx(RegisterLayout{{1}, 0});
    apply_gate(sx, Gate::x(0));
    CHECK(std::abs(sx.amps[1] - cplx(1.0, 0.0)) < 1e-15);

    // Ry(2*arccos(1)) = Ry(0) = identity
    StateVector sr(RegisterLayout{{2}, 0});
    apply_gate(sr, Gate::h(0));
    const auto before = sr.amps;
    apply_gate(sr, Gate::ry(1, 2.0 * std::acos(1.0)));
    CHECK(max_diff(before, sr.amps) < 1e-15);
}

TEST_CASE("gate errors") {
    StateVector sv(RegisterLayout{{2}, 0});
    CHECK_THROWS(apply_gate(sv, Gate::x(5)));
    Controls c;
    c.add(1, true);
    CHECK_THROWS(apply_gate(sv, Gate::x(1, c)));  // control overlaps target
}

TEST_CASE("qft inverse on uniform state gives |0>") {
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        StateVector sv(RegisterLayout{{3}, 0});
        for (int q = 0; q < 3; ++q) apply_gate(sv, Gate::h(q));
        qft(sv, 0, 3, /*inverse=*/true, bk);
        CHECK(std::abs(sv.amps[0] - cplx(1.0, 0.0)) < 1e-12);
        for (size_t i = 1; i < sv.amps.size(); ++i) CHECK(std::abs(sv.amps[i]) < 1e-12);
    }
}

TEST_CASE("qft then inverse is the identity") {
    Rng rng(11);
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        StateVector sv = make_state({4}, 0, random_complex_state(4, rng));
        const auto before = sv.amps;
        qft(sv, 0, 4, false, bk);
        CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-12));
        qft(sv, 0, 4, true, bk);
        CHECK(max_diff(before, sv.amps) < 1e-12);
    }
}

TEST_CASE("inverse qft equals the classical DFT") {
    Rng rng(7);
    const int n = 3;
    const uint64_t N = 8;
    const std::vector<double> psi = random_real_state(n, rng);
    std::vector<cplx> expect(N, 0.0);
    for (uint64_t k = 0; k < N; ++k)
        for (uint64_t j = 0; j < N; ++j)
            expect[k] += psi[j] *
                         cplx(std::cos(-2.0 * kPi * double(j * k) / double(N)),
                              std::sin(-2.0 * kPi * double(j * k) / double(N))) /
                         std::sqrt(double(N));
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        StateVector sv(RegisterLayout{{n}, 0});
        for (uint64_t j = 0; j < N; ++j) sv.amps[j] = psi[j];
        qft(sv, 0, n, true, bk);
        CHECK(max_diff(expect, sv.amps) < 1e-12);
    }
}

TEST_CASE("modular adder examples and exhaustive check") {
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        StateVector sv(RegisterLayout{{3}, 0});
        sv.amps[0] = 0.0;
        sv.amps[5] = 1.0;
        modular_add(sv, 0, 3, 2, false, bk);
        CHECK(std::abs(sv.amps[7] - cplx(1.0, 0.0)) < 1e-12);
        modular_add(sv, 0, 3, 2, true, bk);
        modular_add(sv, 0, 3, 2, true, bk);
        CHECK(std::abs(sv.amps[3] - cplx(1.0, 0.0)) < 1e-12);
    }
    // all (j, k) pairs for n <= 6 against (k +/- j) mod N
    for (int n = 1; n <= 6; ++n) {
        const uint64_t N = uint64_t(1) << n;
        std::vector<cplx> amp(N);
        double nrm = 0.0;
        for (uint64_t k = 0; k < N; ++k) {
            amp[k] = double(k + 1);
            nrm += std::norm(amp[k]);
        }
        for (auto& a : amp) a /= std::sqrt(nrm);
        for (uint64_t j = 0; j < N; ++j) {
            for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
                StateVector sv = make_state({n}, 0, amp);
                modular_add(sv, 0, n, j, false, bk);
                for (uint64_t k = 0; k < N; ++k)
                    CHECK(std::abs(sv.amps[(k + j) % N] - amp[k]) < 1e-10);
                modular_add(sv, 0, n, j, true, bk);
                CHECK(max_diff(sv.amps, amp) < 1e-10);
            }
        }
    }
    StateVector sv(RegisterLayout{{3}, 0});
    CHECK_THROWS(modular_add(sv, 0, 3, 9, false, Backend::FastPath));
}

TEST_CASE("incrementer wraps, respects controls, equals modular_add(1)") {
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        StateVector sv(RegisterLayout{{3}, 0});
        sv.amps[0] = 0.0;
        sv.amps[7] = 1.0;
        incrementer(sv, 0, 3, bk);
        CHECK(std::abs(sv.amps[0] - cplx(1.0, 0.0)) < 1e-12);

        // control qubit in |0>: identity
        StateVector sc(RegisterLayout{{2}, 1});
        sc.amps[0] = 0.0;
        sc.amps[3] = 1.0;
        Controls ctrl;
        ctrl.add(2, true);
        incrementer(sc, 0, 2, bk, ctrl);
        CHECK(std::abs(sc.amps[3] - cplx(1.0, 0.0)) < 1e-12);
    }
    Rng rng(3);
    for (int n = 1; n <= 6; ++n) {
        const std::vector<cplx> amp = random_complex_state(n, rng);
        for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
            StateVector a = make_state({n}, 0, amp);
            StateVector b = make_state({n}, 0, amp);
            incrementer(a, 0, n, bk);
            modular_add(b, 0, n, 1, false, bk);
            CHECK(max_diff(a.amps, b.amps) < 1e-12);
        }
    }
}

TEST_CASE("even extension") {
    for (Backend bk : {Backend::GateLevel, Backend::FastPath}) {
        // delta at 0 maps to itself and to index N
        StateVector sv(RegisterLayout{{2, 1}, 0});  // slice plus its extension bit
        even_extension(sv, 0, 2, 2, bk);
        CHECK(std::abs(sv.amps[0] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
        CHECK(std::abs(sv.amps[4] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
        for (uint64_t i : {1, 2, 3, 5, 6, 7}) CHECK(std::abs(sv.amps[i]) < 1e-12);

        // constant stays constant
        StateVector sc(RegisterLayout{{2, 1}, 0});
        std::fill(sc.amps.begin(), sc.amps.end(), cplx(0.0, 0.0));
        for (uint64_t j = 0; j < 4; ++j) sc.amps[j] = 0.5;
        even_extension(sc, 0, 2, 2, bk);
        for (uint64_t i = 0; i < 8; ++i)
            CHECK(std::abs(sc.amps[i] - cplx(0.5 / std::sqrt(2.0), 0.0)) < 1e-12);
    }

    // extended spectrum is real for random real inputs up to n = 8
    Rng rng(5);
    for (int n = 2; n <= 8; ++n) {
        const std::vector<double> psi = random_real_state(n, rng);
        StateVector sv(RegisterLayout{{n, 1}, 0});
        std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
        for (size_t j = 0; j < psi.size(); ++j) sv.amps[j] = psi[j];
        even_extension(sv, 0, n, n, Backend::FastPath);
        qft(sv, 0, n + 1, true, Backend::FastPath);
        for (const cplx& a : sv.amps) CHECK(std::abs(a.imag()) < 1e-10);
    }

    // ancilla not |0> rejected
    StateVector bad(RegisterLayout{{1, 1}, 0});
    bad.amps[0] = 0.0;
    bad.amps[2] = 1.0;
    CHECK_THROWS(even_extension(bad, 0, 1, 1, Backend::FastPath));
}

TEST_CASE("sampling basics") {
    StateVector zero(RegisterLayout{{3}, 0});
    const MeasurementHistogram h = sample(zero, {0, 1, 2}, 100, 42);
    CHECK(h.total_shots == 100);
    CHECK(h.counts.size() == 1);
    CHECK(h.count_of(0) == 100);

    // uniform two-qubit state at 1e6 shots: each bin within 3 sigma of 0.25
    StateVector uni(RegisterLayout{{2}, 0});
    apply_gate(uni, Gate::h(0));
    apply_gate(uni, Gate::h(1));
    const uint64_t shots = 1000000;
    const MeasurementHistogram hu = sample(uni, {0, 1}, shots, 7);
    const double sigma = std::sqrt(0.25 * 0.75 / double(shots));
    for (uint64_t o = 0; o < 4; ++o) {
        const double p = double(hu.count_of(o)) / double(shots);
        CHECK(std::abs(p - 0.25) <= 3.0 * sigma);
    }
}

TEST_CASE("sampling error bound beta=5 over 1000 trials") {
    // amplitudes proportional to 1..8
    std::vector<cplx> amp(8);
    double nrm = 0.0;
    for (int k = 0; k < 8; ++k) {
        amp[k] = double(k + 1);
        nrm += std::norm(amp[k]);
    }
    for (auto& a : amp) a /= std::sqrt(nrm);
    StateVector sv = make_state({3}, 0, amp);
    std::vector<double> p(8);
    for (int k = 0; k < 8; ++k) p[k] = std::norm(sv.amps[k]);

    const uint64_t shots = 10000;
    int ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const MeasurementHistogram h = sample(sv, {0, 1, 2}, shots, 1000 + trial);
        bool all = true;
        for (int k = 0; k < 8; ++k) {
            const double ptilde = double(h.count_of(k)) / double(shots);
            const double bound = 5.0 * std::sqrt(p[k] * (1.0 - p[k]) / double(shots));
            if (std::abs(ptilde - p[k]) > bound) all = false;
        }
        ok += all;
    }
    CHECK(ok >= 990);
}

TEST_CASE("sampling determinism and histogram merge") {
    Rng rng(9);
    StateVector sv = make_state({3}, 0, random_complex_state(3, rng));
    const MeasurementHistogram a = sample(sv, {0, 1, 2}, 5000, 123);
    const MeasurementHistogram b = sample(sv, {0, 1, 2}, 5000, 123);
    CHECK(a.counts == b.counts);

    MeasurementHistogram m = a;
    m.merge(b);
    CHECK(m.total_shots == 10000);
    uint64_t total = 0;
    for (const auto& [o, c] : m.counts) total += c;
    CHECK(total == 10000);
    for (const auto& [o, c] : m.counts) CHECK(c == 2 * a.count_of(o));
}

TEST_CASE("post selection") {
    // Bell state, select qubit0 = |0>
    StateVector bell(RegisterLayout{{2}, 0});
    apply_gate(bell, Gate::h(0));
    Controls c0;
    c0.add(0, true);
    apply_gate(bell, Gate::x(1, c0));
    const PostSelection ps = post_select(bell, {0}, 0);
    CHECK(ps.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(ps.state.amps[0] - cplx(1.0, 0.0)) < 1e-12);

    // product state |0> tensor psi: selecting the first qubit keeps psi
    Rng rng(21);
    const std::vector<double> psi = random_real_state(2, rng);
    StateVector prod(RegisterLayout{{1, 2}, 0});
    std::fill(prod.amps.begin(), prod.amps.end(), cplx(0.0, 0.0));
    for (int j = 0; j < 4; ++j) prod.amps[uint64_t(j) << 1] = psi[j];
    const PostSelection pp = post_select(prod, {0}, 0);
    CHECK(pp.probability == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(pp.state.amps[uint64_t(j) << 1] - cplx(psi[j], 0.0)) < 1e-12);

    // probabilities over complementary outcomes sum to one; match marginals
    StateVector rnd = make_state({3}, 0, random_complex_state(3, rng));
    const std::vector<double> marg = marginal_probabilities(rnd, {1});
    double total = 0.0;
    for (uint64_t o = 0; o < 2; ++o) {
        const PostSelection p = post_select(rnd, {1}, o);
        CHECK(p.probability == doctest::Approx(marg[o]).epsilon(1e-12));
        total += p.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // zero-probability branch is an explicit failure
    StateVector zero(RegisterLayout{{2}, 0});
    CHECK_THROWS(post_select(zero, {0}, 1));
}

namespace {

// random circuit from the gate set (elementary gates plus QFT, adders,
// incrementers on random slices), applied with the chosen backend
void apply_random_circuit(StateVector& sv, uint64_t seed, Backend bk) {
    Rng rng(seed);
    const int n = sv.layout.total();
    const int ops = 12;
    for (int i = 0; i < ops; ++i) {
        const int pick = int(rng.below(8));
        const int t = int(rng.below(uint64_t(n)));
        Controls ctrl;
        if (pick < 5 && rng.uniform01() < 0.4) {
            const int c = int(rng.below(uint64_t(n)));
            if (c != t) ctrl.add(c, rng.uniform01() < 0.7);
        }
        switch (pick) {
            case 0: apply_gate(sv, Gate::h(t, ctrl)); break;
            case 1: apply_gate(sv, Gate::x(t, ctrl)); break;
            case 2: apply_gate(sv, Gate::z(t, ctrl)); break;
            case 3: apply_gate(sv, Gate::p(t, 2.0 * kPi * rng.uniform01() - kPi, ctrl)); break;
            case 4: apply_gate(sv, Gate::ry(t, 2.0 * kPi * rng.uniform01() - kPi, ctrl)); break;
            case 5: {
                const int count = 1 + int(rng.below(uint64_t(n)));
                const int first = int(rng.below(uint64_t(n - count + 1)));
                qft(sv, first, count, rng.uniform01() < 0.5, bk);
                break;
            }
            case 6: {
                const int count = 1 + int(rng.below(uint64_t(n)));
                const int first = int(rng.below(uint64_t(n - count + 1)));
                const uint64_t j = rng.below(uint64_t(1) << count);
                modular_add(sv, first, count, j, rng.uniform01() < 0.5, bk);
                break;
            }
            default: {
                const int count = 1 + int(rng.below(uint64_t(n)));
                const int first = int(rng.below(uint64_t(n - count + 1)));
                incrementer(sv, first, count, bk, {}, rng.uniform01() < 0.5);
                break;
            }
        }
    }
}

}  // namespace

TEST_CASE("backend equivalence on 100 random circuits, n_tot <= 8") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + int(rng.below(7));  // 2..8 qubits
        const std::vector<cplx> amp = random_complex_state(n, rng);
        StateVector a = make_state({n}, 0, amp);
        StateVector b = make_state({n}, 0, amp);
        const uint64_t seed = rng.next();
        apply_random_circuit(a, seed, Backend::GateLevel);
        apply_random_circuit(b, seed, Backend::FastPath);
        CHECK(max_diff(a.amps, b.amps) < 1e-10);
        // unitarity to 1e-12
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
        CHECK(std::abs(b.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("state preparation unitary") {
    Rng rng(31);
    const std::vector<double> psi = random_real_state(4, rng);
    StateVector sv(RegisterLayout{{4}, 0});
    apply_state_prep(sv, psi, 0, 4);
    for (size_t j = 0; j < psi.size(); ++j)
        CHECK(std::abs(sv.amps[j] - cplx(psi[j], 0.0)) < 1e-12);

    // unitary on arbitrary states, and self-inverse
    StateVector arb = make_state({4}, 0, random_complex_state(4, rng));
    const auto before = arb.amps;
    apply_state_prep(arb, psi, 0, 4);
    CHECK(std::abs(arb.norm() - 1.0) < 1e-12);
    apply_state_prep(arb, psi, 0, 4);
    CHECK(max_diff(before, arb.amps) < 1e-12);
}

TEST_CASE("layout validation") {
    RegisterLayout big{{20, 10}, 0};
    CHECK_THROWS(StateVector{big});  // exceeds the default 24-qubit cap
    RegisterLayout ok{{20, 3}, 1};
    CHECK_NOTHROW(StateVector{ok});
}
