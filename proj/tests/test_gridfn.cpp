#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "qread/gridfn.hpp"
#include "qread/rng.hpp"
#include "qread/statevec.hpp"

using namespace qread;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction sample_function(const GridSpec& spec, double (*f)(double, double)) {
    GridFunction g;
    g.spec = spec;
    g.values.resize(spec.total());
    for (uint64_t j = 0; j < spec.total(); ++j) {
        const auto jv = index_unmap(j, spec);
        const auto x = spec.point(jv);
        g.values[j] = f(x[0], spec.dim() > 1 ? x[1] : 0.0);
    }
    return g;
}

NormalizedState random_state(const GridSpec& spec, uint64_t seed) {
    Rng rng(seed);
    GridFunction g;
    g.spec = spec;
    g.values.resize(spec.total());
    for (double& v : g.values) v = 2.0 * rng.uniform01() - 1.0;
    return encode(g);
}

}  // namespace

TEST_CASE("index map") {
    GridSpec spec{{4, 4}, {1.0, 1.0}};
    CHECK(index_map({1, 2}, spec) == 9);
    CHECK(index_map({0, 0}, spec) == 0);
    CHECK_THROWS(index_map({4, 0}, spec));

    // round trip over every index for assorted specs with N <= 256
    for (const GridSpec& s :
         {GridSpec{{256}, {1.0}}, GridSpec{{16, 16}, {1.0, 2.0}}, GridSpec{{4, 8, 8}, {1, 1, 1}}}) {
        for (uint64_t j = 0; j < s.total(); ++j) CHECK(index_map(index_unmap(j, s), s) == j);
    }
}

TEST_CASE("encode") {
    GridFunction ones{{{4}, {1.0}}, {1.0, 1.0, 1.0, 1.0}};
    const NormalizedState s = encode(ones);
    CHECK(s.a_n == doctest::Approx(2.0));
    for (double a : s.amplitudes) CHECK(a == doctest::Approx(0.5));

    GridFunction delta{{{4}, {1.0}}, {3.0, 0.0, 0.0, 0.0}};
    const NormalizedState d = encode(delta);
    CHECK(d.a_n == doctest::Approx(3.0));
    CHECK(d.amplitudes[0] == doctest::Approx(1.0));

    GridFunction zero{{{4}, {1.0}}, {0.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS(encode(zero));

    const NormalizedState r = random_state({{16, 8}, {1.0, 1.0}}, 5);
    double nrm = 0.0;
    for (double a : r.amplitudes) nrm += a * a;
    CHECK(std::abs(std::sqrt(nrm) - 1.0) < 1e-12);
}

TEST_CASE("dft coefficients") {
    // uniform state: c_0 = 1
    GridFunction ones{{{8}, {1.0}}, std::vector<double>(8, 1.0)};
    const FourierCoefficients cu = dft_coefficients(encode(ones));
    CHECK(std::abs(cu.c[0] - cplx(1.0, 0.0)) < 1e-12);
    for (int k = 1; k < 8; ++k) CHECK(std::abs(cu.c[k]) < 1e-12);

    // delta state: all c_k = 1/sqrt(N)
    GridFunction delta{{{8}, {1.0}}, {1, 0, 0, 0, 0, 0, 0, 0}};
    const FourierCoefficients cd = dft_coefficients(encode(delta));
    for (int k = 0; k < 8; ++k)
        CHECK(std::abs(cd.c[k] - cplx(1.0 / std::sqrt(8.0), 0.0)) < 1e-12);

    // Parseval and Hermitian symmetry on random real states
    for (uint64_t seed : {1u, 2u, 3u}) {
        const NormalizedState s = random_state({{8, 16}, {1.0, 1.0}}, seed);
        const FourierCoefficients c = dft_coefficients(s);
        double sum = 0.0;
        for (const cplx& v : c.c) sum += std::norm(v);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (uint64_t k1 = 0; k1 < 8; ++k1)
            for (uint64_t k2 = 0; k2 < 16; ++k2) {
                const cplx a = c.c[index_map({k1, k2}, s.spec)];
                const cplx b = c.c[index_map({(8 - k1) % 8, (16 - k2) % 16}, s.spec)];
                CHECK(std::abs(a - std::conj(b)) < 1e-12);
            }
    }
}

TEST_CASE("dft matches the circuit-level inverse QFT") {
    for (const GridSpec& spec :
         {GridSpec{{64}, {1.0}}, GridSpec{{32, 32}, {1.0, 1.0}}, GridSpec{{8, 4, 8}, {1, 1, 1}}}) {
        const NormalizedState s = random_state(spec, 17);
        const FourierCoefficients c = dft_coefficients(s);

        StateVector sv(RegisterLayout{spec.qubits(), 0});
        std::fill(sv.amps.begin(), sv.amps.end(), cplx(0, 0));
        for (uint64_t j = 0; j < spec.total(); ++j) sv.amps[j] = s.amplitudes[j];
        for (int l = 0; l < spec.dim(); ++l)
            qft(sv, sv.layout.dim_offset(l), sv.layout.dims[l], true, Backend::FastPath);
        for (uint64_t k = 0; k < spec.total(); ++k) CHECK(std::abs(sv.amps[k] - c.c[k]) < 1e-10);
    }
}

TEST_CASE("negative index lookup") {
    const NormalizedState s = random_state({{16}, {1.0}}, 23);
    const FourierCoefficients c = dft_coefficients(s);
    CHECK(negative_index_lookup(c, {0}) == c.c[0]);
    // for real input, conj(c_1) equals c_{N-1}
    CHECK(std::abs(negative_index_lookup(c, {-1}) - c.c[15]) < 1e-14);
    CHECK(std::abs(negative_index_lookup(c, {-1}) - std::conj(c.c[1])) < 1e-14);
    CHECK_THROWS(negative_index_lookup(c, {17}));

    // 2D: k2 < 0 branch conjugates and mirrors the leading index
    const NormalizedState s2 = random_state({{8, 8}, {1.0, 1.0}}, 29);
    const FourierCoefficients c2 = dft_coefficients(s2);
    const cplx v = negative_index_lookup(c2, {3, -2});
    CHECK(std::abs(v - std::conj(c2.c[index_map({5, 2}, s2.spec)])) < 1e-14);
    // index N_l - 0 folds to 0
    const cplx w = negative_index_lookup(c2, {0, -2});
    CHECK(std::abs(w - std::conj(c2.c[index_map({0, 2}, s2.spec)])) < 1e-14);
}

TEST_CASE("reconstruct") {
    // c_0 only: constant C_N everywhere
    GridFunction ones{{{16}, {1.0}}, std::vector<double>(16, 2.5)};
    const NormalizedState su = encode(ones);
    const FourierCoefficients cu = dft_coefficients(su);
    const GridFunction ru = reconstruct(cu, {1});
    for (double v : ru.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

    // band-limited function is reproduced exactly: sin(2 pi x) + 1, N=64, M=4
    GridSpec spec{{64}, {1.0}};
    GridFunction f;
    f.spec = spec;
    f.values.resize(64);
    for (int j = 0; j < 64; ++j) f.values[j] = std::sin(2.0 * kPi * j / 64.0) + 1.0;
    const NormalizedState sf = encode(f);
    const FourierCoefficients cf = dft_coefficients(sf);
    const GridFunction rf = reconstruct(cf, {4});
    for (int j = 0; j < 64; ++j) CHECK(std::abs(rf.values[j] - f.values[j]) < 1e-9);

    // untruncated reconstruction (M = N/2) where the Nyquist row is empty
    GridSpec spec2{{16, 16}, {1.0, 1.0}};
    GridFunction g = sample_function(spec2, [](double x, double y) {
        return std::sin(2.0 * kPi * x) * std::cos(2.0 * kPi * 3.0 * y) + 2.0;
    });
    const FourierCoefficients cg = dft_coefficients(encode(g));
    CHECK(nyquist_row_mass(cg) < 1e-12);
    const GridFunction rg = reconstruct(cg, {8, 8});
    for (uint64_t j = 0; j < spec2.total(); ++j) CHECK(std::abs(rg.values[j] - g.values[j]) < 1e-9);

    CHECK_THROWS(reconstruct(cg, {16, 8}));  // M > N/2

    // off-grid evaluation agrees with the closed form for a pure mode
    const std::vector<double> at = reconstruct_at(cf, {4}, {{0.13}, {0.57}});
    CHECK(at[0] == doctest::Approx(std::sin(2.0 * kPi * 0.13) + 1.0).epsilon(1e-9));
    CHECK(at[1] == doctest::Approx(std::sin(2.0 * kPi * 0.57) + 1.0).epsilon(1e-9));
}

TEST_CASE("reconstruction with the signed-index rule stays real") {
    const NormalizedState s = random_state({{16, 8}, {1.0, 1.0}}, 31);
    const FourierCoefficients c = dft_coefficients(s);
    CHECK_NOTHROW(reconstruct(c, {4, 2}));  // realness check inside
}

TEST_CASE("l2ns error") {
    GridFunction a{{{4}, {1.0}}, {1, 2, 3, 4}};
    CHECK(l2ns_error(a, a) == doctest::Approx(0.0));

    GridFunction e0{{{4}, {1.0}}, {1, 0, 0, 0}};
    GridFunction e1{{{4}, {1.0}}, {0, 2, 0, 0}};
    CHECK(l2ns_error(e0, e1) == doctest::Approx(std::sqrt(2.0)));

    GridFunction b{{{4}, {1.0}}, {0.5, -1, 2, 0}};
    CHECK(l2ns_error(a, b) == doctest::Approx(l2ns_error(b, a)));

    GridFunction z{{{4}, {1.0}}, {0, 0, 0, 0}};
    CHECK_THROWS(l2ns_error(a, z));
}

TEST_CASE("grid csv round trip is bit-faithful") {
    const NormalizedState s = random_state({{8, 4}, {1.0, 0.5}}, 37);
    const GridFunction f = decode(s);
    const std::string path = "/tmp/qread_test_grid.csv";
    write_grid_csv(path, f);
    const RawGrid g = read_grid_csv(path);
    CHECK(g.power_of_two());
    const GridFunction f2 = g.to_grid_function();
    CHECK(f2.spec == f.spec);
    for (size_t i = 0; i < f.values.size(); ++i) CHECK(f2.values[i] == f.values[i]);
    std::remove(path.c_str());
}
