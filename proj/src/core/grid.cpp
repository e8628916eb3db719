#include "segwave/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segwave/error.hpp"

namespace segwave {

Grid1D::Grid1D(double left, double right, std::size_t n_points)
    : left_(left), right_(right), n_points_(n_points), spacing_(0.0) {
    require(std::isfinite(left) && std::isfinite(right) && left < right, ErrorKind::InvalidArgument,
            "grid requires finite left < right");
    require(n_points >= 3, ErrorKind::InvalidArgument, "grid requires at least 3 points");
    spacing_ = (right - left) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) out[i] = at(i);
    return out;
}

Grid1D Grid1D::shifted(double shift) const {
    Grid1D g = *this;
    g.left_ += shift;
    g.right_ += shift;
    return g;
}

Profile::Profile(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    require(values_.size() == grid_.size(), ErrorKind::InvalidArgument,
            "profile length " + std::to_string(values_.size()) + " does not match grid size " +
                std::to_string(grid_.size()));
    for (double v : values_)
        require(std::isfinite(v), ErrorKind::InvalidArgument, "profile values must be finite");
}

double Profile::interpolate(double x) const {
    const std::size_t n = values_.size();
    if (x <= grid_.left()) return values_.front();
    if (x >= grid_.right()) return values_.back();
    const double h = grid_.spacing();
    auto i = static_cast<std::size_t>((x - grid_.left()) / h);
    i = std::min(i, n - 2);
    std::size_t start = i == 0 ? 0 : i - 1;
    start = std::min(start, n - 4);
    double result = 0.0;
    for (std::size_t a = start; a < start + 4; ++a) {
        double w = 1.0;
        const double xa = grid_.at(a);
        for (std::size_t b = start; b < start + 4; ++b)
            if (b != a) w *= (x - grid_.at(b)) / (xa - grid_.at(b));
        result += w * values_[a];
    }
    return result;
}

double interpolate_cubic(std::span<const double> nodes, std::span<const double> values, double x) {
    const std::size_t n = nodes.size();
    if (x <= nodes.front()) return values.front();
    if (x >= nodes.back()) return values.back();
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (n < 4) {
        const double t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
        return values[i] + t * (values[i + 1] - values[i]);
    }
    std::size_t start = i == 0 ? 0 : i - 1;
    start = std::min(start, n - 4);
    double result = 0.0;
    for (std::size_t a = start; a < start + 4; ++a) {
        double w = 1.0;
        for (std::size_t b = start; b < start + 4; ++b)
            if (b != a) w *= (x - nodes[b]) / (nodes[a] - nodes[b]);
        result += w * values[a];
    }
    return result;
}

double derivative_left_end(std::span<const double> f, double h) {
    return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

double derivative_right_end(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) /
           (12.0 * h);
}

bool find_crossing(std::span<const double> nodes, std::span<const double> values, double level,
                   double& position) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i] - level;
        const double b = values[i + 1] - level;
        if (a == 0.0) {
            position = nodes[i];
            return true;
        }
        if ((a < 0.0) != (b < 0.0) && b != 0.0) {
            const double t = a / (a - b);
            position = nodes[i] + t * (nodes[i + 1] - nodes[i]);
            return true;
        }
        if (b == 0.0) {
            position = nodes[i + 1];
            return true;
        }
    }
    return false;
}

}  // namespace segwave
