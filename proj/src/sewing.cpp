#include "rough/sewing.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rough {

namespace {

double entry_norm(std::span<const double> v) {
    if (v.size() == 1) return std::abs(v[0]);
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Worst |delta h| over quadruples (exhaustive when affordable, sampled above).
double closedness_defect(const Inc3Grid& h, std::size_t budget) {
    const std::size_t n = h.grid().size();
    const int cd = h.comp_dim();
    double worst = 0.0;
    auto defect = [&](std::size_t s, std::size_t u, std::size_t v, std::size_t t) {
        auto a = h.at(u, v, t);
        auto b = h.at(s, v, t);
        auto c = h.at(s, u, t);
        auto d = h.at(s, u, v);
        double acc = 0.0;
        for (int q = 0; q < cd; ++q) {
            const double r = a[q] - b[q] + c[q] - d[q];
            acc += r * r;
        }
        return std::sqrt(acc);
    };
    const std::size_t total = n >= 4 ? n * (n - 1) * (n - 2) * (n - 3) / 24 : 0;
    if (total <= budget) {
        for (std::size_t s = 0; s + 3 < n; ++s)
            for (std::size_t u = s + 1; u + 2 < n; ++u)
                for (std::size_t v = u + 1; v + 1 < n; ++v)
                    for (std::size_t t = v + 1; t < n; ++t)
                        worst = std::max(worst, defect(s, u, v, t));
        return worst;
    }
    std::mt19937_64 rng(0x5e317);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t it = 0; it < budget; ++it) {
        std::size_t idx[4] = {pick(rng), pick(rng), pick(rng), pick(rng)};
        std::sort(idx, idx + 4);
        if (idx[0] == idx[1] || idx[1] == idx[2] || idx[2] == idx[3]) continue;
        worst = std::max(worst, defect(idx[0], idx[1], idx[2], idx[3]));
    }
    return worst;
}

} // namespace

SewingResult sew(const Inc3Grid& h, double mu, const SewOptions& opts) {
    if (!(mu > 1.0)) throw std::invalid_argument("MuTooSmall: sewing requires mu > 1");
    if (!h.grid().is_dyadic())
        throw std::invalid_argument("sew: grid must be uniform dyadic");
    if (opts.check_closedness) {
        const double defect = closedness_defect(h, opts.max_closedness_quadruples);
        if (defect > opts.closedness_tol)
            throw std::invalid_argument("NotClosed: delta h exceeds tolerance");
    }

    const std::size_t n = h.grid().size();
    const int cd = h.comp_dim();
    SewingResult res;
    res.lambda_h = Inc2Grid(h.grid(), cd);
    // Midpoint insertion, composed upward from zero on consecutive pairs:
    // g_{st} = g_{sm} + g_{mt} + h_{smt}. Span order makes sub-pairs available.
    for (std::size_t span = 2; span < n; ++span) {
        for (std::size_t i = 0; i + span < n; ++i) {
            const std::size_t j = i + span;
            const std::size_t m = i + span / 2;
            auto out = res.lambda_h.at(i, j);
            auto a = res.lambda_h.at(i, m);
            auto b = res.lambda_h.at(m, j);
            auto c = h.at(i, m, j);
            for (int q = 0; q < cd; ++q) out[q] = a[q] + b[q] + c[q];
        }
    }
    res.mu = mu;
    res.bound_constant = 1.0 / (std::pow(2.0, mu) - 2.0);
    if (opts.compute_norms) {
        res.norm_h = holder_norm3(h, mu);
        res.norm_lambda = holder_norm2(res.lambda_h, mu);
    }
    return res;
}

double sew_pair(const std::function<double(std::size_t, std::size_t, std::size_t)>& h,
                std::size_t i, std::size_t j) {
    if (j <= i + 1) return 0.0;
    // Fan-in over aligned dyadic triples of [i, j], truncated at grid scale.
    double total = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> level = {{i, j}};
    std::vector<std::pair<std::size_t, std::size_t>> next;
    while (!level.empty()) {
        next.clear();
        for (auto [a, b] : level) {
            if (b <= a + 1) continue;
            const std::size_t m = a + (b - a) / 2;
            total += h(a, m, b);
            next.emplace_back(a, m);
            next.emplace_back(m, b);
        }
        level.swap(next);
    }
    return total;
}

DiscreteSewingCheck discrete_sewing_check(const Inc2Grid& R, double mu) {
    if (!(mu > 1.0)) throw std::invalid_argument("MuTooSmall: discrete sewing requires mu > 1");
    const std::size_t n = R.grid().size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (entry_norm(R.at(i, i + 1)) != 0.0)
            throw std::invalid_argument("NotInC2Pi: consecutive entries of R must vanish");

    DiscreteSewingCheck chk;
    chk.k_mu = k_mu(mu);
    chk.lhs = holder_norm2(R, mu);
    chk.rhs = chk.k_mu * holder_norm3(delta2(R), mu);
    chk.pass = chk.lhs <= chk.rhs * (1.0 + 1e-12) + 1e-300;
    return chk;
}

double k_mu(double mu) {
    if (!(mu > 1.0)) throw std::invalid_argument("MuTooSmall: K_mu requires mu > 1");
    // zeta(mu) by partial sum with Euler-Maclaurin tail; relative error far
    // below 1e-8 for N = 1e5 and any mu > 1.
    const std::size_t N = 100'000;
    double s = 0.0;
    for (std::size_t l = N; l >= 1; --l) s += std::pow(double(l), -mu);
    const double Nd = double(N);
    const double tail = std::pow(Nd, 1.0 - mu) / (mu - 1.0) - 0.5 * std::pow(Nd, -mu) +
                        mu / 12.0 * std::pow(Nd, -mu - 1.0);
    return std::pow(2.0, mu) * (s + tail);
}

} // namespace rough
