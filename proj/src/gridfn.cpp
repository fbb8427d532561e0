#include "qread/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qread {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

uint64_t GridSpec::total() const {
    uint64_t t = 1;
    for (uint64_t n : counts) t *= n;
    return t;
}

std::vector<int> GridSpec::qubits() const {
    std::vector<int> q;
    q.reserve(counts.size());
    for (uint64_t n : counts) {
        int b = 0;
        while ((uint64_t(1) << b) < n) ++b;
        q.push_back(b);
    }
    return q;
}

void GridSpec::validate() const {
    require(!counts.empty(), "GridSpec: empty dimension list");
    require(counts.size() == lengths.size(), "GridSpec: counts/lengths mismatch");
    for (uint64_t n : counts) require(is_pow2(n), "GridSpec: grid count not a power of two");
    for (double L : lengths) require(L > 0.0, "GridSpec: non-positive length");
}

std::vector<double> GridSpec::point(const std::vector<uint64_t>& jvec) const {
    std::vector<double> x(counts.size());
    for (size_t l = 0; l < counts.size(); ++l)
        x[l] = double(jvec[l]) * lengths[l] / double(counts[l]);
    return x;
}

uint64_t index_map(const std::vector<uint64_t>& jvec, const GridSpec& spec) {
    require(jvec.size() == spec.counts.size(), "index_map: dimension mismatch");
    uint64_t j = 0, stride = 1;
    for (size_t l = 0; l < jvec.size(); ++l) {
        require(jvec[l] < spec.counts[l], "index_map: index out of range");
        j += jvec[l] * stride;
        stride *= spec.counts[l];
    }
    return j;
}

std::vector<uint64_t> index_unmap(uint64_t j, const GridSpec& spec) {
    require(j < spec.total(), "index_unmap: index out of range");
    std::vector<uint64_t> jvec(spec.counts.size());
    for (size_t l = 0; l < spec.counts.size(); ++l) {
        jvec[l] = j % spec.counts[l];
        j /= spec.counts[l];
    }
    return jvec;
}

NormalizedState encode(const GridFunction& f) {
    f.spec.validate();
    require(f.values.size() == f.spec.total(), "encode: value count mismatch");
    double sq = 0.0;
    for (double v : f.values) {
        require(std::isfinite(v), "encode: non-finite value");
        sq += v * v;
    }
    if (sq <= 0.0) throw std::invalid_argument("encode: all-zero grid function");
    NormalizedState s;
    s.spec = f.spec;
    s.a_n = std::sqrt(sq);
    s.amplitudes.resize(f.values.size());
    for (size_t i = 0; i < f.values.size(); ++i) s.amplitudes[i] = f.values[i] / s.a_n;
    return s;
}

GridFunction decode(const NormalizedState& state) {
    GridFunction f;
    f.spec = state.spec;
    f.values.resize(state.amplitudes.size());
    for (size_t i = 0; i < f.values.size(); ++i) f.values[i] = state.amplitudes[i] * state.a_n;
    return f;
}

FourierCoefficients dft_coefficients(const NormalizedState& state) {
    FourierCoefficients out;
    out.spec = state.spec;
    const uint64_t n = state.spec.total();
    out.c.assign(state.amplitudes.begin(), state.amplitudes.end());
    std::vector<size_t> dims(state.spec.counts.begin(), state.spec.counts.end());
    fft_nd(out.c, dims, -1);
    const double scale = 1.0 / std::sqrt(double(n));
    for (cplx& v : out.c) v *= scale;
    out.c_n = state.a_n * scale;
    return out;
}

cplx negative_index_lookup(const FourierCoefficients& coeffs, const std::vector<int64_t>& k) {
    const GridSpec& spec = coeffs.spec;
    const int d = spec.dim();
    require(static_cast<int>(k.size()) == d, "negative_index_lookup: dimension mismatch");
    for (int l = 0; l < d; ++l)
        require(std::llabs(k[l]) <= int64_t(spec.counts[l]),
                "negative_index_lookup: index out of range");

    const auto wrap = [&](int64_t v, uint64_t n) -> uint64_t {
        int64_t r = v % int64_t(n);
        if (r < 0) r += int64_t(n);
        return uint64_t(r);
    };

    std::vector<uint64_t> idx(d);
    bool conj = k[d - 1] < 0;
    for (int l = 0; l + 1 < d; ++l) {
        const uint64_t kt = wrap(k[l], spec.counts[l]);
        idx[l] = conj ? wrap(int64_t(spec.counts[l]) - int64_t(kt), spec.counts[l]) : kt;
    }
    idx[d - 1] = wrap(conj ? -k[d - 1] : k[d - 1], spec.counts[d - 1]);
    const cplx v = coeffs.c[index_map(idx, spec)];
    return conj ? std::conj(v) : v;
}

namespace {

void check_truncation(const FourierCoefficients& coeffs, const std::vector<uint64_t>& m) {
    const GridSpec& spec = coeffs.spec;
    require(m.size() == spec.counts.size(), "reconstruct: truncation dimension mismatch");
    require(coeffs.c.size() == spec.total(), "reconstruct: coefficient table incomplete");
    for (size_t l = 0; l < m.size(); ++l)
        require(m[l] >= 1 && m[l] <= spec.counts[l] / 2,
                "reconstruct: truncation must satisfy 1 <= M_l <= N_l/2");
}

// Enumerates the signed truncation box and fills a dense N-array using the
// signed-index rule; the result is Hermitian-symmetric by construction.
std::vector<cplx> truncated_dense(const FourierCoefficients& coeffs,
                                  const std::vector<uint64_t>& m) {
    const GridSpec& spec = coeffs.spec;
    const int d = spec.dim();
    std::vector<cplx> dense(spec.total(), cplx(0.0, 0.0));
    std::vector<int64_t> k(d);
    for (int l = 0; l < d; ++l) k[l] = -(int64_t(m[l]) - 1);
    for (;;) {
        std::vector<uint64_t> idx(d);
        for (int l = 0; l < d; ++l) {
            int64_t r = k[l] % int64_t(spec.counts[l]);
            if (r < 0) r += int64_t(spec.counts[l]);
            idx[l] = uint64_t(r);
        }
        dense[index_map(idx, spec)] = negative_index_lookup(coeffs, k);
        int l = 0;
        for (; l < d; ++l) {
            if (++k[l] <= int64_t(m[l]) - 1) break;
            k[l] = -(int64_t(m[l]) - 1);
        }
        if (l == d) break;
    }
    return dense;
}

}  // namespace

GridFunction reconstruct(const FourierCoefficients& coeffs, const std::vector<uint64_t>& m) {
    check_truncation(coeffs, m);
    const GridSpec& spec = coeffs.spec;
    std::vector<cplx> dense = truncated_dense(coeffs, m);
    std::vector<size_t> dims(spec.counts.begin(), spec.counts.end());
    fft_nd(dense, dims, +1);  // unnormalized inverse kernel

    GridFunction out;
    out.spec = spec;
    out.values.resize(dense.size());
    double max_imag = 0.0, max_real = 0.0;
    for (size_t i = 0; i < dense.size(); ++i) {
        const cplx v = coeffs.c_n * dense[i];
        max_imag = std::max(max_imag, std::abs(v.imag()));
        max_real = std::max(max_real, std::abs(v.real()));
        out.values[i] = v.real();
    }
    if (max_imag >= 1e-9 * std::max(1.0, max_real))
        throw std::runtime_error("reconstruct: non-negligible imaginary residue");
    return out;
}

std::vector<double> reconstruct_at(const FourierCoefficients& coeffs,
                                   const std::vector<uint64_t>& m,
                                   const std::vector<std::vector<double>>& points) {
    check_truncation(coeffs, m);
    const GridSpec& spec = coeffs.spec;
    const int d = spec.dim();

    // gather (signed k, coefficient) pairs once
    std::vector<std::pair<std::vector<int64_t>, cplx>> terms;
    std::vector<int64_t> k(d);
    for (int l = 0; l < d; ++l) k[l] = -(int64_t(m[l]) - 1);
    for (;;) {
        terms.emplace_back(k, negative_index_lookup(coeffs, k));
        int l = 0;
        for (; l < d; ++l) {
            if (++k[l] <= int64_t(m[l]) - 1) break;
            k[l] = -(int64_t(m[l]) - 1);
        }
        if (l == d) break;
    }

    std::vector<double> out(points.size());
    for (size_t p = 0; p < points.size(); ++p) {
        require(points[p].size() == size_t(d), "reconstruct_at: point dimension mismatch");
        cplx acc(0.0, 0.0);
        for (const auto& [kv, c] : terms) {
            double phase = 0.0;
            for (int l = 0; l < d; ++l)
                phase += 2.0 * kPi * double(kv[l]) * points[p][l] / spec.lengths[l];
            acc += c * cplx(std::cos(phase), std::sin(phase));
        }
        out[p] = (coeffs.c_n * acc).real();
    }
    return out;
}

double nyquist_row_mass(const FourierCoefficients& coeffs) {
    const GridSpec& spec = coeffs.spec;
    const int d = spec.dim();
    const uint64_t nd = spec.counts[d - 1];
    double mass = 0.0;
    for (uint64_t j = 0; j < spec.total(); ++j) {
        if (index_unmap(j, spec)[d - 1] == nd / 2) mass += std::norm(coeffs.c[j]);
    }
    return std::sqrt(mass);
}

double l2ns_error(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "l2ns_error: size mismatch");
    double na = 0.0, nb = 0.0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("l2ns_error: zero-norm input");
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    double err = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] / na - b[i] / nb;
        err += diff * diff;
    }
    return std::sqrt(err);
}

double l2ns_error(const GridFunction& a, const GridFunction& b) {
    require(a.spec == b.spec, "l2ns_error: grid spec mismatch");
    return l2ns_error(a.values, b.values);
}

bool RawGrid::power_of_two() const {
    for (uint64_t n : counts)
        if (!is_pow2(n)) return false;
    return true;
}

GridFunction RawGrid::to_grid_function() const {
    GridFunction f;
    f.spec.counts = counts;
    f.spec.lengths = lengths;
    f.spec.validate();
    f.values = values;
    require(values.size() == f.spec.total(), "RawGrid: value count mismatch");
    return f;
}

void write_grid_csv(const std::string& path, const GridFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "#qgrid v1 d=" << f.spec.dim() << " n=";
    for (size_t l = 0; l < f.spec.counts.size(); ++l)
        out << (l ? "," : "") << f.spec.counts[l];
    out << " L=";
    char buf[40];
    for (size_t l = 0; l < f.spec.lengths.size(); ++l) {
        std::snprintf(buf, sizeof buf, "%.17g", f.spec.lengths[l]);
        out << (l ? "," : "") << buf;
    }
    out << "\n";
    for (double v : f.values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << "\n";
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
}

}  // namespace

RawGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string header;
    std::getline(in, header);
    std::stringstream hs(header);
    std::string magic, dtok, ntok, ltok;
    hs >> magic >> dtok >> ntok >> ltok;
    if (magic != "#qgrid" || dtok.rfind("v1", 0) != 0) {
        // header layout: "#qgrid v1 d=.. n=.. L=.."
        hs.clear();
    }
    size_t dpos = header.find("d="), npos = header.find("n="), lpos = header.find("L=");
    if (header.rfind("#qgrid v1 ", 0) != 0 || dpos == std::string::npos ||
        npos == std::string::npos || lpos == std::string::npos)
        throw std::runtime_error("malformed grid CSV header: " + path);

    RawGrid g;
    const int d = std::stoi(header.substr(dpos + 2));
    for (const std::string& t :
         split_csv(header.substr(npos + 2, header.find(' ', npos) - npos - 2)))
        g.counts.push_back(std::stoull(t));
    for (const std::string& t : split_csv(header.substr(lpos + 2)))
        g.lengths.push_back(std::stod(t));
    if (int(g.counts.size()) != d || int(g.lengths.size()) != d)
        throw std::runtime_error("grid CSV header dimension mismatch: " + path);

    uint64_t expect = 1;
    for (uint64_t n : g.counts) expect *= n;
    g.values.reserve(expect);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const double v = std::stod(line);
        if (!std::isfinite(v)) throw std::runtime_error("non-finite value in grid CSV: " + path);
        g.values.push_back(v);
    }
    if (g.values.size() != expect)
        throw std::runtime_error("grid CSV value count mismatch: " + path);
    return g;
}

}  // namespace qread
