#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qread/gridfn.hpp"

namespace qread {

struct VelocityField {
    GridFunction ux, uy;  // shared spec
    std::optional<double> min_ux, min_uy;  // known minima for nonnegativity shifts

    const GridSpec& spec() const { return ux.spec; }
};

// Raw rectangular field data, possibly not power-of-two; nodes include both
// domain boundaries (x_i = i L / (nx-1)).
struct RawField {
    uint64_t nx = 0, ny = 0;
    double lx = 1.0, ly = 1.0;
    std::vector<double> ux, uy;  // row-major, x fastest

    bool power_of_two() const;
};

enum class FieldFormat { GridCsv, RawMatrix };

struct LoadedField {
    std::optional<VelocityField> field;  // set when dimensions are powers of two
    RawField raw;
    bool needs_upsampling = false;  // flagged for non-power-of-two inputs
};

// GridCsv: two concatenated grid-CSV blocks (ux then uy), exclusive grids.
// RawMatrix: header "nx ny [Lx Ly]" then nx*ny lines "ux uy", inclusive nodes.
LoadedField load_field(const std::string& path, FieldFormat format);
void write_field_csv(const std::string& path, const VelocityField& field);

// Cubic tensor-product spline through the source nodes, evaluated on the
// power-of-two target grid; exact at source nodes.
VelocityField spline_upsample(const RawField& src, uint64_t target_nx, uint64_t target_ny);
VelocityField spline_upsample(const VelocityField& src, uint64_t target_nx, uint64_t target_ny);

// w = dx u_y - dy u_x by fourth-order central differences (the combined
// stencil touches nine points); one-sided fourth-order rows at non-periodic
// boundaries. Requires at least 5 points per axis.
GridFunction curl_9pt(const VelocityField& field, bool periodic = true);

// psi(x, y) = cumulative trapezoid of u_x in y with psi(., 0) = 0.
GridFunction stream_function(const VelocityField& field);

// Componentwise subtraction of the known minima; readouts run on the shifted
// field and undo the shift afterwards.
VelocityField shift_field_nonnegative(const VelocityField& field, double min_ux, double min_uy);

// synthetic benchmark fields on [0,1]^2
VelocityField make_taylor_green(int n0);   // smooth and fully periodic
VelocityField make_cavity_analog(int n0);  // boundary-continuous, derivative kink
VelocityField make_jet_analog(int n0);     // shear strip with a sinusoidal ripple

// ASCII PGM (P2) heatmap, maxval 65535, linear min->0 / max->65535, rows in
// increasing y; min/max recorded in a comment line. Constant grids map to
// mid-gray 32768.
void write_pgm(const std::string& path, const GridFunction& g);

}  // namespace qread
