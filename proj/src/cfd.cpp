#include "qread/cfd.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qread/spline.hpp"

namespace qread {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool is_pow2(uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

VelocityField tabulate_field(int n0, double (*fx)(double, double),
                             double (*fy)(double, double)) {
    GridSpec spec{{uint64_t(1) << n0, uint64_t(1) << n0}, {1.0, 1.0}};
    VelocityField f;
    f.ux.spec = f.uy.spec = spec;
    f.ux.values.resize(spec.total());
    f.uy.values.resize(spec.total());
    for (uint64_t j = 0; j < spec.total(); ++j) {
        const auto x = spec.point(index_unmap(j, spec));
        f.ux.values[j] = fx(x[0], x[1]);
        f.uy.values[j] = fy(x[0], x[1]);
    }
    return f;
}

}  // namespace

bool RawField::power_of_two() const { return is_pow2(nx) && is_pow2(ny); }

LoadedField load_field(const std::string& path, FieldFormat format) {
    LoadedField out;
    if (format == FieldFormat::RawMatrix) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open field file: " + path);
        std::string header;
        std::getline(in, header);
        std::stringstream hs(header);
        RawField& raw = out.raw;
        if (!(hs >> raw.nx >> raw.ny)) throw std::runtime_error("malformed field header: " + path);
        if (!(hs >> raw.lx >> raw.ly)) {
            raw.lx = raw.ly = 1.0;
        }
        raw.ux.reserve(raw.nx * raw.ny);
        raw.uy.reserve(raw.nx * raw.ny);
        double a, b;
        while (in >> a >> b) {
            if (!std::isfinite(a) || !std::isfinite(b))
                throw std::runtime_error("non-finite value in field file: " + path);
            raw.ux.push_back(a);
            raw.uy.push_back(b);
        }
        if (raw.ux.size() != raw.nx * raw.ny)
            throw std::runtime_error("field value count mismatch: " + path);
        out.needs_upsampling = !raw.power_of_two();
        return out;
    }

    // GridCsv: split the file into its two #qgrid blocks
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    std::vector<std::string> blocks;
    std::string line, cur;
    while (std::getline(in, line)) {
        if (line.rfind("#qgrid", 0) == 0 && !cur.empty()) {
            blocks.push_back(cur);
            cur.clear();
        }
        cur += line;
        cur += '\n';
    }
    if (!cur.empty()) blocks.push_back(cur);
    if (blocks.size() != 2)
        throw std::runtime_error("field CSV must contain exactly two grid blocks: " + path);

    const auto parse_block = [&](const std::string& text) {
        const std::string tmp = path + ".block.tmp";
        std::ofstream t(tmp, std::ios::binary);
        t << text;
        t.close();
        RawGrid g = read_grid_csv(tmp);
        std::remove(tmp.c_str());
        return g;
    };
    const RawGrid gx = parse_block(blocks[0]);
    const RawGrid gy = parse_block(blocks[1]);
    if (gx.counts != gy.counts) throw std::runtime_error("component grid mismatch: " + path);
    require(gx.counts.size() == 2, "field CSV must be two-dimensional");

    RawField& raw = out.raw;
    raw.nx = gx.counts[0];
    raw.ny = gx.counts[1];
    raw.lx = gx.lengths[0];
    raw.ly = gx.lengths[1];
    raw.ux = gx.values;
    raw.uy = gy.values;
    if (gx.power_of_two()) {
        VelocityField f;
        f.ux = gx.to_grid_function();
        f.uy = gy.to_grid_function();
        out.field = std::move(f);
    } else {
        out.needs_upsampling = true;
    }
    return out;
}

void write_field_csv(const std::string& path, const VelocityField& field) {
    write_grid_csv(path, field.ux);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.close();
    // append the second block
    const std::string tmp = path + ".uy.tmp";
    write_grid_csv(tmp, field.uy);
    std::ifstream in(tmp, std::ios::binary);
    std::ofstream app(path, std::ios::binary | std::ios::app);
    app << in.rdbuf();
    in.close();
    std::remove(tmp.c_str());
}

namespace {

VelocityField upsample_nodes(const std::vector<double>& nx_nodes,
                             const std::vector<double>& ny_nodes,
                             const std::vector<double>& ux, const std::vector<double>& uy,
                             uint64_t tx, uint64_t ty, double lx, double ly) {
    require(is_pow2(tx) && is_pow2(ty), "upsample target must be a power of two");
    require(tx >= nx_nodes.size() && ty >= ny_nodes.size(),
            "upsample target smaller than the source");
    std::vector<double> gx(tx), gy(ty);
    for (uint64_t i = 0; i < tx; ++i) gx[i] = double(i) * lx / double(tx);
    for (uint64_t i = 0; i < ty; ++i) gy[i] = double(i) * ly / double(ty);

    VelocityField out;
    out.ux.spec = out.uy.spec = GridSpec{{tx, ty}, {lx, ly}};
    out.ux.values = tensor_interpolate({nx_nodes, ny_nodes}, ux, 3, {gx, gy});
    out.uy.values = tensor_interpolate({nx_nodes, ny_nodes}, uy, 3, {gx, gy});
    return out;
}

}  // namespace

VelocityField spline_upsample(const RawField& src, uint64_t target_nx, uint64_t target_ny) {
    require(src.nx >= 2 && src.ny >= 2, "source too small");
    std::vector<double> nx_nodes(src.nx), ny_nodes(src.ny);
    for (uint64_t i = 0; i < src.nx; ++i)
        nx_nodes[i] = double(i) * src.lx / double(src.nx - 1);  // inclusive nodes
    for (uint64_t i = 0; i < src.ny; ++i) ny_nodes[i] = double(i) * src.ly / double(src.ny - 1);
    return upsample_nodes(nx_nodes, ny_nodes, src.ux, src.uy, target_nx, target_ny, src.lx,
                          src.ly);
}

VelocityField spline_upsample(const VelocityField& src, uint64_t target_nx,
                              uint64_t target_ny) {
    const GridSpec& spec = src.spec();
    std::vector<double> nx_nodes(spec.counts[0]), ny_nodes(spec.counts[1]);
    for (uint64_t i = 0; i < spec.counts[0]; ++i)
        nx_nodes[i] = double(i) * spec.lengths[0] / double(spec.counts[0]);
    for (uint64_t i = 0; i < spec.counts[1]; ++i)
        ny_nodes[i] = double(i) * spec.lengths[1] / double(spec.counts[1]);
    return upsample_nodes(nx_nodes, ny_nodes, src.ux.values, src.uy.values, target_nx,
                          target_ny, spec.lengths[0], spec.lengths[1]);
}

namespace {

// fourth-order first derivative along one axis
void derivative4(const GridFunction& g, int axis, bool periodic, std::vector<double>& out) {
    const GridSpec& spec = g.spec;
    const uint64_t nx = spec.counts[0], ny = spec.counts[1];
    const uint64_t n = axis == 0 ? nx : ny;
    require(n >= 5, "curl_9pt: grid too small (< 5 per axis)");
    const double h = spec.lengths[axis] / double(spec.counts[axis]);
    out.assign(g.values.size(), 0.0);

    const auto at = [&](uint64_t i, uint64_t j) -> double { return g.values[i + nx * j]; };
    const auto val = [&](uint64_t i, uint64_t j, int64_t off) -> double {
        int64_t v = int64_t(axis == 0 ? i : j) + off;
        if (periodic) {
            v = ((v % int64_t(n)) + int64_t(n)) % int64_t(n);
        }
        return axis == 0 ? at(uint64_t(v), j) : at(i, uint64_t(v));
    };

    for (uint64_t j = 0; j < ny; ++j)
        for (uint64_t i = 0; i < nx; ++i) {
            const uint64_t c = axis == 0 ? i : j;
            double d;
            if (periodic || (c >= 2 && c + 2 < n)) {
                d = (-val(i, j, 2) + 8.0 * val(i, j, 1) - 8.0 * val(i, j, -1) +
                     val(i, j, -2)) /
                    (12.0 * h);
            } else {
                // one-sided fourth-order stencils at the boundary rows
                const auto v = [&](int64_t p) {
                    return axis == 0 ? at(uint64_t(int64_t(0) + p), j) : at(i, uint64_t(p));
                };
                const auto ve = [&](int64_t p) {  // from the far end
                    const int64_t base = int64_t(n) - 1;
                    return axis == 0 ? at(uint64_t(base - p), j) : at(i, uint64_t(base - p));
                };
                if (c == 0)
                    d = (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4)) /
                        (12.0 * h);
                else if (c == 1)
                    d = (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4)) /
                        (12.0 * h);
                else if (c == n - 2)
                    d = -(-3.0 * ve(0) - 10.0 * ve(1) + 18.0 * ve(2) - 6.0 * ve(3) + ve(4)) /
                        (12.0 * h);
                else
                    d = -(-25.0 * ve(0) + 48.0 * ve(1) - 36.0 * ve(2) + 16.0 * ve(3) -
                          3.0 * ve(4)) /
                        (12.0 * h);
            }
            out[i + nx * j] = d;
        }
}

}  // namespace

GridFunction curl_9pt(const VelocityField& field, bool periodic) {
    require(field.ux.spec == field.uy.spec, "curl_9pt: component spec mismatch");
    require(field.spec().dim() == 2, "curl_9pt: two-dimensional fields only");
    std::vector<double> duy_dx, dux_dy;
    derivative4(field.uy, 0, periodic, duy_dx);
    derivative4(field.ux, 1, periodic, dux_dy);
    GridFunction w;
    w.spec = field.spec();
    w.values.resize(duy_dx.size());
    for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = duy_dx[i] - dux_dy[i];
    return w;
}

GridFunction stream_function(const VelocityField& field) {
    const GridSpec& spec = field.spec();
    require(spec.dim() == 2, "stream_function: two-dimensional fields only");
    const uint64_t nx = spec.counts[0], ny = spec.counts[1];
    const double h = spec.lengths[1] / double(ny);
    GridFunction psi;
    psi.spec = spec;
    psi.values.assign(spec.total(), 0.0);
    for (uint64_t i = 0; i < nx; ++i) {
        double acc = 0.0;
        psi.values[i] = 0.0;  // psi(., 0) = 0
        for (uint64_t j = 1; j < ny; ++j) {
            acc += 0.5 * h * (field.ux.values[i + nx * (j - 1)] + field.ux.values[i + nx * j]);
            psi.values[i + nx * j] = acc;
        }
    }
    return psi;
}

VelocityField shift_field_nonnegative(const VelocityField& field, double min_ux,
                                      double min_uy) {
    VelocityField out = field;
    for (double& v : out.ux.values) {
        v -= min_ux;
        if (v < 0.0) throw std::invalid_argument("shift_field_nonnegative: negative after shift");
    }
    for (double& v : out.uy.values) {
        v -= min_uy;
        if (v < 0.0) throw std::invalid_argument("shift_field_nonnegative: negative after shift");
    }
    out.min_ux = 0.0;
    out.min_uy = 0.0;
    return out;
}

VelocityField make_taylor_green(int n0) {
    return tabulate_field(
        n0, [](double x, double y) { return std::cos(2.0 * kPi * x) * std::sin(2.0 * kPi * y); },
        [](double x, double y) { return -std::sin(2.0 * kPi * x) * std::cos(2.0 * kPi * y); });
}

VelocityField make_cavity_analog(int n0) {
    // boundary values vanish (continuous periodic wrap); normal derivatives
    // do not, which caps the spectral decay at p = 2
    VelocityField f = tabulate_field(
        n0, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
        [](double x, double y) {
            return std::sin(kPi * x) * std::sin(kPi * y) * (0.5 + 0.5 * x);
        });
    f.min_ux = 0.0;
    f.min_uy = 0.0;
    return f;
}

VelocityField make_jet_analog(int n0) {
    return tabulate_field(
        n0,
        [](double x, double y) {
            const double strip =
                std::tanh(18.0 * (y - 0.35)) - std::tanh(18.0 * (y - 0.65)) - 1.0;
            return strip + 0.02 * std::sin(4.0 * kPi * x);
        },
        [](double x, double y) {
            const double env = std::exp(-40.0 * (y - 0.5) * (y - 0.5));
            return 0.08 * std::sin(2.0 * kPi * x) * env;
        });
}

void write_pgm(const std::string& path, const GridFunction& g) {
    require(g.spec.dim() == 2, "write_pgm: two-dimensional grids only");
    double lo = g.values[0], hi = g.values[0];
    for (double v : g.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("write_pgm: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const uint64_t nx = g.spec.counts[0], ny = g.spec.counts[1];
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[96];
    std::snprintf(buf, sizeof buf, "# min=%.17g max=%.17g", lo, hi);
    out << "P2\n" << buf << "\n" << nx << " " << ny << "\n65535\n";
    const bool degenerate = hi <= lo;
    for (uint64_t j = 0; j < ny; ++j) {
        for (uint64_t i = 0; i < nx; ++i) {
            int pixel = 32768;
            if (!degenerate) {
                const double v = g.values[i + nx * j];
                pixel = int(std::lround((v - lo) / (hi - lo) * 65535.0));
            }
            out << pixel << (i + 1 < nx ? ' ' : '\n');
        }
    }
}

}  // namespace qread
