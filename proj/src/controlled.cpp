#include "rough/controlled.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rough {

SmoothMap SmoothMap::scalar(std::function<double(double)> f, std::function<double(double)> df) {
    SmoothMap m;
    m.in_dim = 1;
    m.out_dim = 1;
    m.value = [f = std::move(f)](std::span<const double> x, std::span<double> out) {
        out[0] = f(x[0]);
    };
    m.jacobian = [df = std::move(df)](std::span<const double> x, std::span<double> out) {
        out[0] = df(x[0]);
    };
    return m;
}

SmoothMap SmoothMap::identity(int dim) {
    SmoothMap m;
    m.in_dim = dim;
    m.out_dim = dim;
    m.value = [](std::span<const double> x, std::span<double> out) {
        std::copy(x.begin(), x.end(), out.begin());
    };
    m.jacobian = [dim](std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < dim; ++i) out[i * dim + i] = 1.0;
    };
    return m;
}

ScalarField ScalarField::scalar(std::string name, std::function<double(double)> f,
                                std::function<double(double)> df,
                                std::function<double(double)> d2f) {
    ScalarField g;
    g.dim = 1;
    g.name = std::move(name);
    g.value = [f = std::move(f)](std::span<const double> x) { return f(x[0]); };
    g.grad = [df = std::move(df)](std::span<const double> x, std::span<double> out) {
        out[0] = df(x[0]);
    };
    g.hess = [d2f = std::move(d2f)](std::span<const double> x, std::span<double> out) {
        out[0] = d2f(x[0]);
    };
    return g;
}

std::vector<double> ControlledPath::remainder(std::size_t i, std::size_t j) const {
    const int n = n_dim, d = base->dim;
    std::vector<double> r(n);
    auto zi = z.value(i);
    auto zj = z.value(j);
    auto zt = zeta.value(i);
    auto xi = base->x.value(i);
    auto xj = base->x.value(j);
    for (int c = 0; c < n; ++c) {
        double acc = zj[c] - zi[c];
        for (int b = 0; b < d; ++b) acc -= zt[c * d + b] * (xj[b] - xi[b]);
        r[c] = acc;
    }
    return r;
}

double ControlledPath::remainder_seminorm(double level, std::size_t lo, std::size_t hi) const {
    const auto& t = z.grid();
    double sup = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = i + 1; j <= hi; ++j) {
            auto r = remainder(i, j);
            double s = 0.0;
            for (double v : r) s += v * v;
            if (s == 0.0) continue;
            sup = std::max(sup, std::sqrt(s) / std::pow(t[j] - t[i], level));
        }
    return sup;
}

ControlledPath compose_smooth(const SmoothMap& f, double lambda, const RoughPath& rp) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("compose_smooth: lambda must lie in (0, 1]");
    if (f.in_dim != rp.dim) throw std::invalid_argument("compose_smooth: dimension mismatch");
    ControlledPath cp;
    cp.base = &rp;
    cp.n_dim = f.out_dim;
    cp.eta = rp.gamma * (1.0 + lambda);
    cp.z = Inc1(rp.grid, f.out_dim);
    cp.zeta = Inc1(rp.grid, f.out_dim * rp.dim);
    for (std::size_t i = 0; i < rp.grid.size(); ++i) {
        f.value(rp.x.value(i), cp.z.value(i));
        f.jacobian(rp.x.value(i), cp.zeta.value(i));
    }
    return cp;
}

ControlledPath compose_controlled(const SmoothMap& g, double lambda, const ControlledPath& cp) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("compose_controlled: lambda must lie in (0, 1]");
    if (g.in_dim != cp.n_dim) throw std::invalid_argument("compose_controlled: dimension mismatch");
    const RoughPath& rp = *cp.base;
    ControlledPath out;
    out.base = cp.base;
    out.n_dim = g.out_dim;
    out.eta = std::min(cp.eta, rp.gamma * (1.0 + lambda));
    out.z = Inc1(rp.grid, g.out_dim);
    out.zeta = Inc1(rp.grid, g.out_dim * rp.dim);
    std::vector<double> jac(std::size_t(g.out_dim) * g.in_dim);
    for (std::size_t i = 0; i < rp.grid.size(); ++i) {
        g.value(cp.z.value(i), out.z.value(i));
        g.jacobian(cp.z.value(i), jac);
        auto zt_in = cp.zeta.value(i);
        auto zt_out = out.zeta.value(i);
        // chain rule at first order: zeta_out = Dg(z) * zeta_in
        for (int a = 0; a < g.out_dim; ++a)
            for (int b = 0; b < rp.dim; ++b) {
                double acc = 0.0;
                for (int k = 0; k < g.in_dim; ++k)
                    acc += jac[a * g.in_dim + k] * zt_in[k * rp.dim + b];
                zt_out[a * rp.dim + b] = acc;
            }
    }
    return out;
}

double compensated_sum(const ControlledPath& m, const RoughPath& rp, std::size_t i,
                       std::size_t j, int depth) {
    if (m.n_dim != rp.dim)
        throw std::invalid_argument("compensated_sum: integrand must take values in R^d");
    if (!(i < j)) throw std::invalid_argument("compensated_sum: need i < j");
    const int d = rp.dim;
    const std::size_t cells = std::size_t(1) << depth;
    // partition indices: quantiles of [i, j], deduplicated
    std::vector<std::size_t> part;
    part.reserve(cells + 1);
    part.push_back(i);
    for (std::size_t q = 1; q <= cells; ++q) {
        const std::size_t idx = i + (j - i) * q / cells;
        if (idx > part.back()) part.push_back(idx);
    }
    std::vector<double> blk(std::size_t(d) * d);
    double total = 0.0;
    for (std::size_t q = 0; q + 1 < part.size(); ++q) {
        const std::size_t a = part[q], b = part[q + 1];
        auto mv = m.z.value(a);
        auto mu = m.zeta.value(a);
        auto xa = rp.x.value(a);
        auto xb = rp.x.value(b);
        for (int c = 0; c < d; ++c) total += mv[c] * (xb[c] - xa[c]);
        chen_extend(rp, a, b, blk);
        // mu^{i i1} pairs with x2^{i1 i}: the derivative index rides the inner
        // increment of the second level
        for (int c = 0; c < d; ++c)
            for (int i1 = 0; i1 < d; ++i1) total += mu[c * d + i1] * blk[i1 * d + c];
    }
    return total;
}

IntegralResult rough_integral(const ControlledPath& m, const RoughPath& rp, std::size_t i,
                              std::size_t j, const IntegralOptions& opts) {
    if (!(m.eta + rp.gamma > 1.0))
        throw std::invalid_argument("RegularityBudget: need eta + gamma > 1");
    if (!(i < j)) throw std::invalid_argument("rough_integral: need i < j");

    // scale for the Cauchy tolerance: integrand magnitude times path oscillation
    double m_scale = 0.0, x_osc = 0.0;
    for (int c = 0; c < rp.dim; ++c) {
        double lo = rp.x.value(i)[c], hi = lo;
        for (std::size_t q = i; q <= j; ++q) {
            lo = std::min(lo, rp.x.value(q)[c]);
            hi = std::max(hi, rp.x.value(q)[c]);
        }
        x_osc = std::max(x_osc, hi - lo);
    }
    for (std::size_t q = i; q <= j; ++q) {
        double s = 0.0;
        auto mv = m.z.value(q);
        for (double v : mv) s += v * v;
        m_scale = std::max(m_scale, std::sqrt(s));
    }
    const double tol_abs = opts.tol * std::max(1.0, m_scale * x_osc);

    const int grid_depth = int(std::ceil(std::log2(double(j - i))));
    // error model: increments contract like mesh^(eta + gamma - 1) per depth;
    // an envelope over past increments guards against a lucky small one
    const double rate = m.eta + rp.gamma - 1.0;
    const double rho = std::clamp(std::exp2(-rate), 0.05, 0.95);
    double prev = compensated_sum(m, rp, i, j, 0);
    double envelope = 0.0;
    IntegralResult res;
    for (int depth = 1; depth <= std::max(opts.max_depth, 1); ++depth) {
        const double cur = compensated_sum(m, rp, i, j, depth);
        const double diff = std::abs(cur - prev);
        envelope = std::max(diff, rho * envelope);
        res.value = cur;
        res.depth = depth;
        res.reported_error = envelope * rho / (1.0 - rho);
        if (depth >= grid_depth) {
            res.grid_exact = true; // partition hit every grid point: sum is exact on the grid
            res.reported_error = diff;
            return res;
        }
        if (depth >= opts.min_depth && diff < tol_abs) return res;
        prev = cur;
    }
    throw std::runtime_error("NoConvergence: Cauchy criterion not met at max depth");
}

double ItoStratResidual::residual_at(std::size_t a, std::size_t b) const {
    const std::size_t n = probe.size();
    if (!(a < b && b < n)) throw std::out_of_range("residual_at: bad probe pair");
    return residual[a * (n - 1) - a * (a - 1) / 2 + (b - a - 1)];
}

ItoStratResidual ito_stratonovich_residual(const ScalarField& g, const RoughPath& rp, int depth,
                                           std::size_t max_probe_points) {
    if (g.dim != rp.dim)
        throw std::invalid_argument("ito_stratonovich_residual: dimension mismatch");
    const std::size_t n = rp.grid.size();
    const int d = rp.dim;

    ItoStratResidual out;
    const std::size_t stride = std::max<std::size_t>(1, (n - 1) / (max_probe_points - 1));
    for (std::size_t q = 0; q < n; q += stride) out.probe.push_back(q);
    if (out.probe.back() != n - 1) out.probe.push_back(n - 1);

    // grad g(x) as a controlled path with derivative Hess g(x)
    ControlledPath m;
    m.base = &rp;
    m.n_dim = d;
    m.eta = 2.0 * rp.gamma;
    m.z = Inc1(rp.grid, d);
    m.zeta = Inc1(rp.grid, d * d);
    for (std::size_t q = 0; q < n; ++q) {
        g.grad(rp.x.value(q), m.z.value(q));
        g.hess(rp.x.value(q), m.zeta.value(q));
    }

    const std::size_t np = out.probe.size();
    out.residual.resize(np * (np - 1) / 2);
    out.pair_count = out.residual.size();
    std::size_t idx = 0;
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = a + 1; b < np; ++b) {
            const std::size_t i = out.probe[a], jx = out.probe[b];
            const double dg = g.value(rp.x.value(jx)) - g.value(rp.x.value(i));
            const double integral = compensated_sum(m, rp, i, jx, depth);
            const double r = dg - integral;
            out.residual[idx++] = r;
            out.sup = std::max(out.sup, std::abs(r));
        }
    return out;
}

} // namespace rough
