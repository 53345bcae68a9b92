#include "rough/time_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace rough {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2)
        throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (points_.front() != 0.0)
        throw std::invalid_argument("TimeGrid: first point must be 0");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (!(points_[i] > points_[i - 1]))
            throw std::invalid_argument("TimeGrid: points must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_intervals) {
    if (!(horizon > 0.0) || n_intervals < 1)
        throw std::invalid_argument("TimeGrid::uniform: bad horizon or interval count");
    std::vector<double> pts(n_intervals + 1);
    for (std::size_t i = 0; i <= n_intervals; ++i)
        pts[i] = horizon * (double(i) / double(n_intervals));
    pts[0] = 0.0;
    pts[n_intervals] = horizon;
    return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::dyadic(double horizon, int depth) {
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("TimeGrid::dyadic: depth out of range");
    return uniform(horizon, std::size_t(1) << depth);
}

double TimeGrid::mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < points_.size(); ++i)
        m = std::max(m, points_[i] - points_[i - 1]);
    return m;
}

TimeGrid TimeGrid::refined(int factor) const {
    if (factor < 1) throw std::invalid_argument("TimeGrid::refined: factor must be >= 1");
    std::vector<double> pts;
    pts.reserve((points_.size() - 1) * std::size_t(factor) + 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        for (int k = 0; k < factor; ++k)
            pts.push_back(points_[i] + (points_[i + 1] - points_[i]) * (double(k) / factor));
    }
    pts.push_back(points_.back());
    pts[0] = 0.0;
    return TimeGrid(std::move(pts));
}

bool TimeGrid::refines(const TimeGrid& fine, double tol) const {
    std::size_t j = 0;
    const double scale = std::max(1.0, horizon());
    for (double t : points_) {
        while (j < fine.size() && fine[j] < t - tol * scale) ++j;
        if (j >= fine.size() || std::abs(fine[j] - t) > tol * scale) return false;
    }
    return true;
}

std::vector<std::size_t> TimeGrid::embedding_into(const TimeGrid& fine, double tol) const {
    std::vector<std::size_t> map;
    map.reserve(points_.size());
    std::size_t j = 0;
    const double scale = std::max(1.0, horizon());
    for (double t : points_) {
        while (j < fine.size() && fine[j] < t - tol * scale) ++j;
        if (j >= fine.size() || std::abs(fine[j] - t) > tol * scale)
            throw std::invalid_argument("TimeGrid: grids are not nested");
        map.push_back(j);
    }
    return map;
}

bool TimeGrid::is_dyadic(double rel_tol) const {
    const std::size_t n = intervals();
    if ((n & (n - 1)) != 0) return false;
    const double step = horizon() / double(n);
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (std::abs((points_[i] - points_[i - 1]) - step) > rel_tol * step) return false;
    return true;
}

} // namespace rough
