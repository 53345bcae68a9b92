#include "rough/increments.hpp"

#include <cmath>
#include <stdexcept>

namespace rough {

namespace {

constexpr std::size_t kMaxEntries = 400'000'000; // hard cap on flat storage

double entry_norm(std::span<const double> v) {
    if (v.size() == 1) return std::abs(v[0]);
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void require_positive_mu(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("holder norm: mu must be positive");
}

} // namespace

// ----------------------------------------------------------------------------
// Inc1
// ----------------------------------------------------------------------------

Inc1::Inc1(TimeGrid grid, int dim) : grid_(std::move(grid)), dim_(dim) {
    if (dim_ < 1) throw std::invalid_argument("Inc1: dim must be >= 1");
    values_.assign(grid_.size() * std::size_t(dim_), 0.0);
}

Inc1::Inc1(TimeGrid grid, int dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
    if (dim_ < 1) throw std::invalid_argument("Inc1: dim must be >= 1");
    if (values_.size() != grid_.size() * std::size_t(dim_))
        throw std::invalid_argument("Inc1: values size must be points * dim");
}

Inc1 Inc1::from_function(TimeGrid grid, int dim,
                         const std::function<void(double, std::span<double>)>& fn) {
    Inc1 f(std::move(grid), dim);
    for (std::size_t i = 0; i < f.points(); ++i) fn(f.grid()[i], f.value(i));
    return f;
}

Inc1 Inc1::from_scalar_function(TimeGrid grid, const std::function<double(double)>& fn) {
    Inc1 f(std::move(grid), 1);
    for (std::size_t i = 0; i < f.points(); ++i) f.raw()[i] = fn(f.grid()[i]);
    return f;
}

std::span<const double> Inc1::value(std::size_t i) const {
    return {values_.data() + i * dim_, std::size_t(dim_)};
}

std::span<double> Inc1::value(std::size_t i) {
    return {values_.data() + i * dim_, std::size_t(dim_)};
}

// ----------------------------------------------------------------------------
// Inc2Grid
// ----------------------------------------------------------------------------

Inc2Grid::Inc2Grid(TimeGrid grid, int comp_dim) : grid_(std::move(grid)), comp_dim_(comp_dim) {
    if (comp_dim_ < 1) throw std::invalid_argument("Inc2Grid: comp_dim must be >= 1");
    const std::size_t n = grid_.size();
    n_pairs_ = n * (n - 1) / 2;
    if (n_pairs_ * std::size_t(comp_dim_) > kMaxEntries)
        throw std::invalid_argument("Inc2Grid: grid too large for dense pair storage");
    data_.assign(n_pairs_ * comp_dim_, 0.0);
    zero_.assign(comp_dim_, 0.0);
}

std::size_t Inc2Grid::pair_index(std::size_t i, std::size_t j) const {
    const std::size_t n = grid_.size();
    return i * (n - 1) - i * (i - 1) / 2 + (j - i - 1);
}

std::span<const double> Inc2Grid::at(std::size_t i, std::size_t j) const {
    if (i == j) return {zero_.data(), zero_.size()};
    if (i > j) throw std::out_of_range("Inc2Grid: need i <= j");
    return {data_.data() + pair_index(i, j) * comp_dim_, std::size_t(comp_dim_)};
}

std::span<double> Inc2Grid::at(std::size_t i, std::size_t j) {
    if (i >= j) throw std::out_of_range("Inc2Grid: need i < j for mutable access");
    return {data_.data() + pair_index(i, j) * comp_dim_, std::size_t(comp_dim_)};
}

double Inc2Grid::scalar(std::size_t i, std::size_t j) const { return at(i, j)[0]; }

void Inc2Grid::set_scalar(std::size_t i, std::size_t j, double v) { at(i, j)[0] = v; }

// ----------------------------------------------------------------------------
// Inc3Grid
// ----------------------------------------------------------------------------

Inc3Grid::Inc3Grid(TimeGrid grid, int comp_dim) : grid_(std::move(grid)), comp_dim_(comp_dim) {
    if (comp_dim_ < 1) throw std::invalid_argument("Inc3Grid: comp_dim must be >= 1");
    const std::size_t n = grid_.size();
    base_.assign(n, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        base_[i] = total;
        const std::size_t rest = n - 1 - i; // choose 2 from the tail
        total += rest * (rest >= 1 ? rest - 1 : 0) / 2;
    }
    n_triples_ = total;
    if (n_triples_ * std::size_t(comp_dim_) > kMaxEntries)
        throw std::invalid_argument("Inc3Grid: grid too large for dense triple storage");
    data_.assign(n_triples_ * comp_dim_, 0.0);
    zero_.assign(comp_dim_, 0.0);
}

std::size_t Inc3Grid::triple_index(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t n = grid_.size();
    // pairs (j, k) within (i+1 .. n-1), lexicographic
    const std::size_t m = n - 1 - i;
    const std::size_t jj = j - i - 1, kk = k - i - 1;
    return base_[i] + jj * (m - 1) - jj * (jj - 1) / 2 + (kk - jj - 1);
}

std::span<const double> Inc3Grid::at(std::size_t i, std::size_t j, std::size_t k) const {
    if (i == j || j == k) return {zero_.data(), zero_.size()};
    if (!(i < j && j < k)) throw std::out_of_range("Inc3Grid: need i < j < k");
    return {data_.data() + triple_index(i, j, k) * comp_dim_, std::size_t(comp_dim_)};
}

std::span<double> Inc3Grid::at(std::size_t i, std::size_t j, std::size_t k) {
    if (!(i < j && j < k)) throw std::out_of_range("Inc3Grid: need i < j < k");
    return {data_.data() + triple_index(i, j, k) * comp_dim_, std::size_t(comp_dim_)};
}

double Inc3Grid::scalar(std::size_t i, std::size_t j, std::size_t k) const {
    return at(i, j, k)[0];
}

// ----------------------------------------------------------------------------
// delta and norms
// ----------------------------------------------------------------------------

Inc2Grid delta1(const Inc1& f) {
    Inc2Grid out(f.grid(), f.dim());
    const std::size_t n = f.points();
    for (std::size_t i = 0; i < n; ++i) {
        auto fi = f.value(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto fj = f.value(j);
            auto o = out.at(i, j);
            for (int c = 0; c < f.dim(); ++c) o[c] = fj[c] - fi[c];
        }
    }
    return out;
}

Inc3Grid delta2(const Inc2Grid& h) {
    Inc3Grid out(h.grid(), h.comp_dim());
    const std::size_t n = h.grid().size();
    const int cd = h.comp_dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            auto hij = h.at(i, j);
            for (std::size_t k = j + 1; k < n; ++k) {
                auto hik = h.at(i, k);
                auto hjk = h.at(j, k);
                auto o = out.at(i, j, k);
                for (int c = 0; c < cd; ++c) o[c] = hik[c] - hij[c] - hjk[c];
            }
        }
    return out;
}

double holder_norm2(const Inc2Grid& h, double mu) {
    return holder_norm2(h, mu, 0, h.grid().size() - 1);
}

double holder_norm2(const Inc2Grid& h, double mu, std::size_t lo, std::size_t hi) {
    require_positive_mu(mu);
    const auto& t = h.grid();
    double sup = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = i + 1; j <= hi; ++j) {
            const double v = entry_norm(h.at(i, j));
            if (v == 0.0) continue;
            sup = std::max(sup, v / std::pow(t[j] - t[i], mu));
        }
    return sup;
}

double holder_norm3(const Inc3Grid& h, double mu) {
    return holder_norm3(h, mu, 0, h.grid().size() - 1);
}

double holder_norm3(const Inc3Grid& h, double mu, std::size_t lo, std::size_t hi) {
    require_positive_mu(mu);
    const auto& t = h.grid();
    double sup = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = i + 1; j <= hi; ++j)
            for (std::size_t k = j + 1; k <= hi; ++k) {
                const double v = entry_norm(h.at(i, j, k));
                if (v == 0.0) continue;
                sup = std::max(sup, v / std::pow(t[k] - t[i], mu));
            }
    return sup;
}

double holder_seminorm1(const Inc1& f, double gamma) {
    return holder_seminorm1(f, gamma, 0, f.points() - 1);
}

double holder_seminorm1(const Inc1& f, double gamma, std::size_t lo, std::size_t hi) {
    require_positive_mu(gamma);
    const auto& t = f.grid();
    const int d = f.dim();
    double sup = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        auto fi = f.value(i);
        for (std::size_t j = i + 1; j <= hi; ++j) {
            auto fj = f.value(j);
            double s = 0.0;
            for (int c = 0; c < d; ++c) {
                const double dd = fj[c] - fi[c];
                s += dd * dd;
            }
            if (s == 0.0) continue;
            sup = std::max(sup, std::sqrt(s) / std::pow(t[j] - t[i], gamma));
        }
    }
    return sup;
}

double product_rule_check(const Inc1& g, const Inc2Grid& h) {
    if (g.dim() != 1 || h.comp_dim() != 1)
        throw std::invalid_argument("product_rule_check: scalar inputs required");
    const std::size_t n = g.points();
    double worst = 0.0;
    // (g h)_{st} = g_s h_{st}; check delta(gh) = g delta h - delta g h, i.e.
    // delta(gh)_{sut} = g_s (delta h)_{sut} - (g_u - g_s) h_{ut}.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double lhs = g.scalar(i) * h.scalar(i, k) - g.scalar(i) * h.scalar(i, j) -
                                   g.scalar(j) * h.scalar(j, k);
                const double dh = h.scalar(i, k) - h.scalar(i, j) - h.scalar(j, k);
                const double rhs = g.scalar(i) * dh - (g.scalar(j) - g.scalar(i)) * h.scalar(j, k);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
    return worst;
}

} // namespace rough
