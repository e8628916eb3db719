#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace segwave {

/// Uniform grid on [left, right] with n_points nodes. The spacing is computed
/// once at construction and every node coordinate is derived from it.
class Grid1D {
public:
    Grid1D(double left, double right, std::size_t n_points);

    double left() const noexcept { return left_; }
    double right() const noexcept { return right_; }
    std::size_t size() const noexcept { return n_points_; }
    double spacing() const noexcept { return spacing_; }

    /// Node i; the last node is pinned to `right` exactly.
    double at(std::size_t i) const noexcept {
        return i + 1 == n_points_ ? right_ : left_ + static_cast<double>(i) * spacing_;
    }

    std::vector<double> nodes() const;

    /// Same spacing and node count, translated by `shift`.
    Grid1D shifted(double shift) const;

private:
    double left_;
    double right_;
    std::size_t n_points_;
    double spacing_;
};

/// A real function sampled on a uniform grid.
class Profile {
public:
    Profile(Grid1D grid, std::vector<double> values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }

    /// Four-point Lagrange interpolation; constant extension outside the grid.
    double interpolate(double x) const;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

/// Cubic Lagrange interpolation on an arbitrary increasing node set, constant
/// extension outside [nodes.front(), nodes.back()].
double interpolate_cubic(std::span<const double> nodes, std::span<const double> values, double x);

/// First derivative at the left end from a 4th-order one-sided stencil.
double derivative_left_end(std::span<const double> values, double h);
/// First derivative at the right end from a 4th-order one-sided stencil.
double derivative_right_end(std::span<const double> values, double h);

/// Level crossing of a sampled function, by linear interpolation between the
/// first bracketing pair of nodes. Returns false when no crossing exists.
bool find_crossing(std::span<const double> nodes, std::span<const double> values, double level,
                   double& position);

}  // namespace segwave
