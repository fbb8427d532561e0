#pragma once

#include <vector>

namespace qread {

// Natural cubic spline through (x_i, y_i), x strictly increasing. Evaluation
// outside [x_front, x_back] falls back to linear extrapolation from the
// boundary slope.
class CubicSpline {
  public:
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;

  private:
    std::vector<double> x_, y_, m_;  // m_ = second derivatives at the nodes
};

// Piecewise-linear interpolation with the same boundary fallback.
double linear_interp(const std::vector<double>& x, const std::vector<double>& y, double t);

// Tensor-product interpolation on a rectangular node grid. `values` is
// row-major with dimension 0 fastest; `order` is 1 (multilinear) or 3
// (cubic per axis, d <= 2 for order 3). Returns values on the tensor grid of
// `targets`, same layout.
std::vector<double> tensor_interpolate(const std::vector<std::vector<double>>& nodes,
                                       const std::vector<double>& values, int order,
                                       const std::vector<std::vector<double>>& targets);

}  // namespace qread
