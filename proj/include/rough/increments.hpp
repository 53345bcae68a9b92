#pragma once

#include "rough/time_grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rough {

// ============================================================================
// Increment containers over a time grid.
//
// Inc1 holds one vector per grid point. Inc2Grid holds one entry per ordered
// pair i < j (dense upper triangle), Inc3Grid one entry per ordered triple
// i < j < k. Entries are flat arrays of comp_dim doubles, so the same
// containers carry scalars, vectors and row-major matrices. Diagonal entries
// (repeated indices) are identically zero and are not stored.
// ============================================================================

class Inc1 {
public:
    Inc1() = default;
    Inc1(TimeGrid grid, int dim);
    Inc1(TimeGrid grid, int dim, std::vector<double> values);

    /// Sample fn(t, out) at every grid point.
    static Inc1 from_function(TimeGrid grid, int dim,
                              const std::function<void(double, std::span<double>)>& fn);
    static Inc1 from_scalar_function(TimeGrid grid, const std::function<double(double)>& fn);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::size_t points() const { return grid_.size(); }

    std::span<const double> value(std::size_t i) const;
    std::span<double> value(std::size_t i);
    double scalar(std::size_t i) const { return values_[i * dim_]; }

    const std::vector<double>& raw() const { return values_; }
    std::vector<double>& raw() { return values_; }

private:
    TimeGrid grid_;
    int dim_ = 1;
    std::vector<double> values_;
};

class Inc2Grid {
public:
    Inc2Grid() = default;
    Inc2Grid(TimeGrid grid, int comp_dim);

    const TimeGrid& grid() const { return grid_; }
    int comp_dim() const { return comp_dim_; }
    std::size_t pairs() const { return n_pairs_; }

    std::size_t pair_index(std::size_t i, std::size_t j) const;

    /// Entry for pair (i, j), i < j; (i, i) yields the zero entry.
    std::span<const double> at(std::size_t i, std::size_t j) const;
    std::span<double> at(std::size_t i, std::size_t j);
    double scalar(std::size_t i, std::size_t j) const;
    void set_scalar(std::size_t i, std::size_t j, double v);

private:
    TimeGrid grid_;
    int comp_dim_ = 1;
    std::size_t n_pairs_ = 0;
    std::vector<double> data_;
    std::vector<double> zero_;
};

class Inc3Grid {
public:
    Inc3Grid() = default;
    Inc3Grid(TimeGrid grid, int comp_dim);

    const TimeGrid& grid() const { return grid_; }
    int comp_dim() const { return comp_dim_; }
    std::size_t triples() const { return n_triples_; }

    std::size_t triple_index(std::size_t i, std::size_t j, std::size_t k) const;
    std::span<const double> at(std::size_t i, std::size_t j, std::size_t k) const;
    std::span<double> at(std::size_t i, std::size_t j, std::size_t k);
    double scalar(std::size_t i, std::size_t j, std::size_t k) const;

private:
    TimeGrid grid_;
    int comp_dim_ = 1;
    std::size_t n_triples_ = 0;
    std::vector<double> data_;
    std::vector<double> zero_;
    std::vector<std::size_t> base_; // triples with first index < i
};

// ----------------------------------------------------------------------------
// The coboundary delta and Hoelder seminorms.
// ----------------------------------------------------------------------------

/// (delta f)_{st} = f_t - f_s.
Inc2Grid delta1(const Inc1& f);

/// (delta h)_{sut} = h_{st} - h_{su} - h_{ut}.
Inc3Grid delta2(const Inc2Grid& h);

/// sup over pairs of |h_{st}| / (t-s)^mu (Euclidean entry norm). mu > 0.
double holder_norm2(const Inc2Grid& h, double mu);
/// Same restricted to pairs inside [lo, hi].
double holder_norm2(const Inc2Grid& h, double mu, std::size_t lo, std::size_t hi);

/// sup over triples of |h_{sut}| / (t-s)^mu. mu > 0.
double holder_norm3(const Inc3Grid& h, double mu);
double holder_norm3(const Inc3Grid& h, double mu, std::size_t lo, std::size_t hi);

/// sup over index pairs in [lo, hi] of |f_t - f_s| / (t-s)^gamma.
double holder_seminorm1(const Inc1& f, double gamma);
double holder_seminorm1(const Inc1& f, double gamma, std::size_t lo, std::size_t hi);

/// Max over triples of | delta(g h) - (g delta h - delta g h) | for scalar
/// g in C1, h in C2, with (g h)_{st} = g_s h_{st}. Zero up to rounding.
double product_rule_check(const Inc1& g, const Inc2Grid& h);

} // namespace rough
