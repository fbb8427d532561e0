#include "qread/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qread {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

size_t find_interval(const std::vector<double>& x, double t) {
    // largest i with x[i] <= t, clamped to [0, n-2]
    if (t <= x.front()) return 0;
    if (t >= x[x.size() - 2]) return x.size() - 2;
    return size_t(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    require(x_.size() == y_.size(), "CubicSpline: size mismatch");
    require(x_.size() >= 2, "CubicSpline: need at least two nodes");
    for (size_t i = 1; i < x_.size(); ++i)
        require(x_[i] > x_[i - 1], "CubicSpline: nodes not strictly increasing");

    const size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n == 2) return;  // degenerates to the linear segment

    // tridiagonal solve for natural boundary conditions
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), scratch(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (size_t i = 2; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double w = h0 / diag[i - 1];
        diag[i] -= w * h0;
        rhs[i] -= w * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
        const double h1 = x_[i + 1] - x_[i];
        m_[i] = (rhs[i] - (i + 2 < n ? h1 * m_[i + 1] : 0.0)) / diag[i];
        if (i == 1) break;
    }
}

double CubicSpline::operator()(double t) const {
    const size_t n = x_.size();
    // linear fallback outside the node hull
    if (t < x_.front() || t > x_.back()) {
        size_t i = (t < x_.front()) ? 0 : n - 2;
        const double h = x_[i + 1] - x_[i];
        // boundary slope of the cubic piece
        const double slope = (y_[i + 1] - y_[i]) / h -
                             (t < x_.front() ? (h / 6.0) * (2.0 * m_[i] + m_[i + 1])
                                             : -(h / 6.0) * (m_[i] + 2.0 * m_[i + 1]));
        const double x0 = (t < x_.front()) ? x_.front() : x_.back();
        const double y0 = (t < x_.front()) ? y_.front() : y_.back();
        return y0 + slope * (t - x0);
    }
    const size_t i = find_interval(x_, t);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double linear_interp(const std::vector<double>& x, const std::vector<double>& y, double t) {
    require(x.size() == y.size() && x.size() >= 2, "linear_interp: bad inputs");
    const size_t i = find_interval(x, t);
    const double w = (t - x[i]) / (x[i + 1] - x[i]);
    return y[i] + w * (y[i + 1] - y[i]);
}

std::vector<double> tensor_interpolate(const std::vector<std::vector<double>>& nodes,
                                       const std::vector<double>& values, int order,
                                       const std::vector<std::vector<double>>& targets) {
    require(order == 1 || order == 3, "tensor_interpolate: order must be 1 or 3");
    const size_t d = nodes.size();
    require(targets.size() == d, "tensor_interpolate: target dimension mismatch");
    require(order == 1 || d <= 2, "tensor_interpolate: cubic supported for d <= 2");

    size_t total = 1;
    for (const auto& nd : nodes) total *= nd.size();
    require(values.size() == total, "tensor_interpolate: value count mismatch");

    // Sweep one dimension at a time; the processed axis moves to size t_l.
    std::vector<double> cur = values;
    std::vector<size_t> shape(d);
    for (size_t l = 0; l < d; ++l) shape[l] = nodes[l].size();

    for (size_t l = 0; l < d; ++l) {
        const size_t nl = shape[l], tl = targets[l].size();
        size_t inner = 1, outer = 1;
        for (size_t i = 0; i < l; ++i) inner *= shape[i];
        for (size_t i = l + 1; i < d; ++i) outer *= shape[i];

        std::vector<double> next(inner * tl * outer);
        std::vector<double> line(nl);
        for (size_t o = 0; o < outer; ++o) {
            for (size_t in = 0; in < inner; ++in) {
                for (size_t i = 0; i < nl; ++i) line[i] = cur[in + inner * (i + nl * o)];
                if (order == 3 && nl >= 3) {
                    CubicSpline sp(nodes[l], line);
                    for (size_t t = 0; t < tl; ++t)
                        next[in + inner * (t + tl * o)] = sp(targets[l][t]);
                } else {
                    for (size_t t = 0; t < tl; ++t)
                        next[in + inner * (t + tl * o)] =
                            linear_interp(nodes[l], line, targets[l][t]);
                }
            }
        }
        cur = std::move(next);
        shape[l] = tl;
    }
    return cur;
}

}  // namespace qread
