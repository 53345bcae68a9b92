#pragma once

#include <cstddef>
#include <vector>

namespace rough {

/// Strictly increasing time points on [0, T] with t_0 = 0.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> points);

    static TimeGrid uniform(double horizon, std::size_t n_intervals);
    /// Uniform grid with 2^depth intervals.
    static TimeGrid dyadic(double horizon, int depth);

    std::size_t size() const { return points_.size(); }
    std::size_t intervals() const { return points_.size() - 1; }
    double operator[](std::size_t i) const { return points_[i]; }
    double horizon() const { return points_.back(); }
    const std::vector<double>& points() const { return points_; }

    /// Largest consecutive spacing.
    double mesh() const;

    /// Grid with `factor` equal subdivisions per interval.
    TimeGrid refined(int factor) const;

    /// True if every point of this grid appears in `fine` (within tol).
    bool refines(const TimeGrid& fine, double tol = 1e-12) const;

    /// Index of the fine-grid point matching points_[i]; throws if grids not nested.
    std::vector<std::size_t> embedding_into(const TimeGrid& fine, double tol = 1e-12) const;

    /// True if uniform with 2^k intervals for some k >= 0.
    bool is_dyadic(double rel_tol = 1e-9) const;

private:
    std::vector<double> points_;
};

} // namespace rough
