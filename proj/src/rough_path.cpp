#include "rough/rough_path.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

namespace rough {

namespace {

double frob_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Deterministic standard normals: explicit Box-Muller over mt19937_64 so the
// stream does not depend on the standard library's distribution internals.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}
    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform01() {
        // in (0, 1], 53-bit resolution
        return (double((rng_() >> 11)) + 1.0) * 0x1p-53;
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_ = false;
};

double fgn_autocov(std::size_t k, double H) {
    const double kp = double(k);
    return 0.5 * (std::pow(kp + 1.0, 2 * H) - 2.0 * std::pow(kp, 2 * H) +
                  (k == 0 ? std::pow(1.0, 2 * H) : std::pow(kp - 1.0, 2 * H)));
}

// Two independent unit-spacing fGn samples of length N by circulant embedding.
// Returns false when the embedding has a materially negative eigenvalue.
bool fgn_circulant_pair(std::size_t N, double H, NormalStream& normals,
                        std::vector<double>& out_a, std::vector<double>& out_b) {
    std::size_t M = 1;
    while (M < 2 * N) M <<= 1;
    std::vector<double> c(M);
    for (std::size_t j = 0; j <= M / 2; ++j) c[j] = fgn_autocov(j, H);
    for (std::size_t j = M / 2 + 1; j < M; ++j) c[j] = c[M - j];

    std::vector<fftw_complex> in(M), out(M);
    fftw_plan plan = fftw_plan_dft_1d(int(M), in.data(), out.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    for (std::size_t j = 0; j < M; ++j) {
        in[j][0] = c[j];
        in[j][1] = 0.0;
    }
    fftw_execute(plan);

    std::vector<double> lambda(M);
    double max_l = 0.0, min_l = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        lambda[j] = out[j][0];
        max_l = std::max(max_l, lambda[j]);
        min_l = std::min(min_l, lambda[j]);
    }
    if (min_l < -1e-9 * max_l) {
        fftw_destroy_plan(plan);
        return false;
    }

    for (std::size_t j = 0; j < M; ++j) {
        const double s = std::sqrt(std::max(lambda[j], 0.0));
        in[j][0] = s * normals.next();
        in[j][1] = s * normals.next();
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale = 1.0 / std::sqrt(double(M));
    out_a.resize(N);
    out_b.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
        out_a[j] = out[j][0] * scale;
        out_b[j] = out[j][1] * scale;
    }
    return true;
}

// O(N^3) dense fallback, only sensible for small N.
void fgn_cholesky(std::size_t N, double H, NormalStream& normals, std::vector<double>& out) {
    if (N > 2048)
        throw std::runtime_error("fbm_rough_path: Cholesky fallback capped at 2048 steps");
    std::vector<double> L(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = fgn_autocov(i >= j ? i - j : j - i, H);
            for (std::size_t k = 0; k < j; ++k) s -= L[i * N + k] * L[j * N + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("fbm_rough_path: covariance not SPD");
                L[i * N + i] = std::sqrt(s);
            } else {
                L[i * N + j] = s / L[j * N + j];
            }
        }
    }
    std::vector<double> z(N);
    for (auto& v : z) v = normals.next();
    out.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += L[i * N + k] * z[k];
        out[i] = s;
    }
}

} // namespace

std::vector<double> chen_extend(const RoughPath& rp, std::size_t s_index, std::size_t t_index) {
    std::vector<double> out(std::size_t(rp.dim) * rp.dim);
    chen_extend(rp, s_index, t_index, out);
    return out;
}

void chen_extend(const RoughPath& rp, std::size_t s_index, std::size_t t_index,
                 std::span<double> out) {
    if (s_index > t_index) throw std::invalid_argument("chen_extend: need s_index <= t_index");
    const int d = rp.dim;
    std::fill(out.begin(), out.end(), 0.0);
    if (s_index == t_index) return;

    auto xs = rp.x.value(s_index);
    std::vector<double> acc(d, 0.0); // x_k - x_s
    for (std::size_t k = s_index; k < t_index; ++k) {
        auto blk = rp.block(k);
        auto xk = rp.x.value(k);
        auto xk1 = rp.x.value(k + 1);
        for (int a = 0; a < d; ++a) acc[a] = xk[a] - xs[a];
        for (int a = 0; a < d; ++a) {
            const double da = acc[a];
            for (int b = 0; b < d; ++b)
                out[a * d + b] += blk[a * d + b] + da * (xk1[b] - xk[b]);
        }
    }
}

RoughPath lift_piecewise_linear(const Inc1& fine, const TimeGrid& coarse, double gamma) {
    const auto embed = coarse.embedding_into(fine.grid());
    const int d = fine.dim();
    RoughPath rp;
    rp.grid = coarse;
    rp.gamma = gamma;
    rp.dim = d;
    rp.x = Inc1(coarse, d);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        auto src = fine.value(embed[i]);
        auto dst = rp.x.value(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    rp.x2.assign((coarse.size() - 1) * std::size_t(d) * d, 0.0);
    std::vector<double> prefix(d);
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
        auto blk = rp.block(i);
        std::fill(prefix.begin(), prefix.end(), 0.0);
        for (std::size_t k = embed[i]; k < embed[i + 1]; ++k) {
            auto xk = fine.value(k);
            auto xk1 = fine.value(k + 1);
            for (int a = 0; a < d; ++a) {
                const double ua = xk1[a] - xk[a];
                for (int b = 0; b < d; ++b) {
                    const double ub = xk1[b] - xk[b];
                    blk[a * d + b] += prefix[a] * ub + 0.5 * ua * ub;
                }
            }
            for (int a = 0; a < d; ++a) prefix[a] += xk1[a] - xk[a];
        }
    }
    return rp;
}

RoughPath fbm_rough_path(const FbmSpec& spec) {
    if (!(spec.H > 1.0 / 3.0 && spec.H <= 0.5))
        throw std::invalid_argument("fbm_rough_path: H must lie in (1/3, 1/2]");
    if (spec.refine_factor < 4)
        throw std::invalid_argument("fbm_rough_path: refine_factor must be >= 4");
    if (spec.dim < 1 || spec.n_coarse < 2)
        throw std::invalid_argument("fbm_rough_path: bad dimension or grid size");

    const std::size_t n_fine = spec.n_coarse * std::size_t(spec.refine_factor);
    const double h = spec.horizon / double(n_fine);
    const double scale = std::pow(h, spec.H);

    NormalStream normals(spec.seed);
    std::vector<std::vector<double>> fgn(spec.dim);
    if (spec.force_cholesky) {
        for (int c = 0; c < spec.dim; ++c) fgn_cholesky(n_fine, spec.H, normals, fgn[c]);
    } else {
        std::vector<double> a, b;
        for (int c = 0; c < spec.dim; c += 2) {
            if (!fgn_circulant_pair(n_fine, spec.H, normals, a, b)) {
                fgn_cholesky(n_fine, spec.H, normals, fgn[c]);
                if (c + 1 < spec.dim) fgn_cholesky(n_fine, spec.H, normals, fgn[c + 1]);
                continue;
            }
            fgn[c] = a;
            if (c + 1 < spec.dim) fgn[c + 1] = b;
        }
    }

    TimeGrid fine_grid = TimeGrid::uniform(spec.horizon, n_fine);
    Inc1 path(fine_grid, spec.dim);
    for (int c = 0; c < spec.dim; ++c) {
        double acc = 0.0;
        path.value(0)[c] = 0.0;
        for (std::size_t i = 0; i < n_fine; ++i) {
            acc += fgn[c][i] * scale;
            path.value(i + 1)[c] = acc;
        }
    }

    TimeGrid coarse = TimeGrid::uniform(spec.horizon, spec.n_coarse);
    return lift_piecewise_linear(path, coarse, spec.H - spec.gamma_margin);
}

double rough_norm(const RoughPath& rp, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("rough_norm: gamma must be positive");
    const double part1 = holder_seminorm1(rp.x, gamma);

    const std::size_t n = rp.grid.size();
    const int d = rp.dim;
    double part2 = 0.0;
    std::vector<double> acc(std::size_t(d) * d);
    std::vector<double> dxs(d);
    for (std::size_t s = 0; s + 1 < n; ++s) {
        std::fill(acc.begin(), acc.end(), 0.0);
        std::fill(dxs.begin(), dxs.end(), 0.0);
        auto xs = rp.x.value(s);
        for (std::size_t t = s + 1; t < n; ++t) {
            auto blk = rp.block(t - 1);
            auto xa = rp.x.value(t - 1);
            auto xb = rp.x.value(t);
            for (int a = 0; a < d; ++a) dxs[a] = xa[a] - xs[a];
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    acc[a * d + b] += blk[a * d + b] + dxs[a] * (xb[b] - xa[b]);
            const double v = frob_norm(acc);
            if (v > 0.0)
                part2 = std::max(part2, v / std::pow(rp.grid[t] - rp.grid[s], 2.0 * gamma));
        }
    }
    return part1 + part2;
}

LiftReport validate_rough_path(const RoughPath& rp, std::size_t probe_stride) {
    const std::size_t n = rp.grid.size();
    const int d = rp.dim;
    if (probe_stride == 0) probe_stride = std::max<std::size_t>(1, n / 64);

    LiftReport rep;
    rep.x0_zero = frob_norm(rp.x.value(0)) == 0.0 ||
                  frob_norm(rp.x.value(0)) < 1e-14 * (1.0 + holder_seminorm1(rp.x, rp.gamma, 0, std::min<std::size_t>(n - 1, 8)));

    double sup_dx = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double s = 0.0;
        auto xa = rp.x.value(i);
        auto xb = rp.x.value(i + 1);
        for (int a = 0; a < d; ++a) s += (xb[a] - xa[a]) * (xb[a] - xa[a]);
        sup_dx = std::max(sup_dx, s);
    }

    auto pair_dx = [&](std::size_t i, std::size_t j, std::vector<double>& out) {
        auto xa = rp.x.value(i);
        auto xb = rp.x.value(j);
        for (int a = 0; a < d; ++a) out[a] = xb[a] - xa[a];
    };

    double worst_sym = 0.0, worst_chen = 0.0;
    double sup_dx_any = sup_dx;
    std::vector<double> dx(d), dxa(d), dxb(d);
    std::vector<double> B, Bsu, But;

    // symmetry on consecutive blocks
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto blk = rp.block(i);
        pair_dx(i, i + 1, dx);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                worst_sym = std::max(worst_sym,
                                     std::abs(blk[a * d + b] + blk[b * d + a] - dx[a] * dx[b]));
    }
    // symmetry + Chen on strided extended pairs/triples
    for (std::size_t s = 0; s < n; s += probe_stride) {
        for (std::size_t t = s + probe_stride; t < n; t += probe_stride) {
            B = chen_extend(rp, s, t);
            pair_dx(s, t, dx);
            double nd = 0.0;
            for (int a = 0; a < d; ++a) nd += dx[a] * dx[a];
            sup_dx_any = std::max(sup_dx_any, nd);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    worst_sym = std::max(worst_sym,
                                         std::abs(B[a * d + b] + B[b * d + a] - dx[a] * dx[b]));
            const std::size_t u = (s + t) / 2;
            if (u > s && u < t) {
                Bsu = chen_extend(rp, s, u);
                But = chen_extend(rp, u, t);
                pair_dx(s, u, dxa);
                pair_dx(u, t, dxb);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        worst_chen = std::max(
                            worst_chen, std::abs(B[a * d + b] - Bsu[a * d + b] - But[a * d + b] -
                                                 dxa[a] * dxb[b]));
            }
        }
    }
    const double scale = std::max(sup_dx_any, 1e-300);
    rep.sym_residual_rel = worst_sym / scale;
    rep.chen_residual_rel = worst_chen / scale;
    return rep;
}

RoughnessEstimate roughness_modulus(const RoughPath& rp, double gamma, double eps_hat,
                                    std::span<const double> eps_list,
                                    std::size_t probe_stride) {
    const std::size_t n = rp.grid.size();
    const int d = rp.dim;
    const double T = rp.grid.horizon();
    const auto& tp = rp.grid.points();
    if (probe_stride == 0) probe_stride = 1;

    RoughnessEstimate est;
    est.gamma_hat = gamma + eps_hat;
    est.epsilon_grid.assign(eps_list.begin(), eps_list.end());

    // direction net: single direction for d = 1 (|<phi, dx>| is sign-free),
    // 32 half-circle angles per coordinate 2-plane otherwise
    std::vector<std::vector<double>> net;
    if (d == 1) {
        net.push_back({1.0});
    } else {
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q)
                for (int a = 0; a < 32; ++a) {
                    std::vector<double> phi(d, 0.0);
                    const double th = M_PI * double(a) / 32.0;
                    phi[p] = std::cos(th);
                    phi[q] = std::sin(th);
                    net.push_back(std::move(phi));
                }
    }

    double overall = std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        if (!(eps > 0.0 && eps <= T / 2))
            throw std::invalid_argument("roughness_modulus: eps must lie in (0, T/2]");
        double min_over_probes = std::numeric_limits<double>::infinity();
        for (std::size_t si = 0; si < n; si += probe_stride) {
            const double s = tp[si];
            for (const auto& phi : net) {
                double best = -1.0;
                auto scan = [&](double lo, double hi) {
                    auto it0 = std::lower_bound(tp.begin(), tp.end(), lo);
                    auto it1 = std::upper_bound(tp.begin(), tp.end(), hi);
                    for (auto it = it0; it != it1; ++it) {
                        const std::size_t ti = std::size_t(it - tp.begin());
                        if (ti == si) continue;
                        const double gap = std::abs(tp[ti] - s);
                        if (!(gap > eps / 2 && gap < eps)) continue;
                        auto xa = rp.x.value(std::min(si, ti));
                        auto xb = rp.x.value(std::max(si, ti));
                        double ip = 0.0;
                        for (int c = 0; c < d; ++c) ip += phi[c] * (xb[c] - xa[c]);
                        best = std::max(best, std::abs(ip));
                    }
                };
                scan(s + eps / 2, s + eps);
                scan(s - eps, s - eps / 2);
                if (best < 0.0) {
                    ++est.skipped_windows;
                    continue;
                }
                min_over_probes = std::min(min_over_probes, best / std::pow(eps, est.gamma_hat));
            }
        }
        est.per_epsilon.push_back(std::isfinite(min_over_probes) ? min_over_probes : 0.0);
        overall = std::min(overall, est.per_epsilon.back());
    }
    est.L = std::isfinite(overall) ? overall : 0.0;
    return est;
}

Inc1 lacunary_driver(const TimeGrid& grid, const LacunarySpec& spec) {
    const double T = grid.horizon();
    std::vector<double> phases(spec.levels + 1);
    for (int j = 0; j <= spec.levels; ++j) {
        // low-discrepancy deterministic phases
        const double v = (double(j + 1) + double(spec.phase_salt) * 0.137) * 0.6180339887498949;
        phases[j] = v - std::floor(v);
    }
    auto cascade = [&](double t) {
        double acc = 0.0;
        for (int j = 0; j <= spec.levels; ++j)
            acc += std::exp2(-double(j) * spec.exponent) *
                   std::cos(2.0 * M_PI * (std::exp2(double(j)) * t / T + phases[j]));
        return acc;
    };
    const double w0 = cascade(0.0);
    return Inc1::from_scalar_function(
        grid, [&](double t) { return spec.trend * t + spec.amplitude * (cascade(t) - w0); });
}

RoughPath restrict_rough_path(const RoughPath& rp, std::size_t lo, std::size_t hi, bool recentre) {
    if (!(lo < hi && hi < rp.grid.size()))
        throw std::invalid_argument("restrict_rough_path: bad index range");
    const int d = rp.dim;
    std::vector<double> pts(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) pts[i - lo] = rp.grid[i] - rp.grid[lo];
    pts[0] = 0.0;
    RoughPath out;
    out.grid = TimeGrid(std::move(pts));
    out.gamma = rp.gamma;
    out.dim = d;
    out.x = Inc1(out.grid, d);
    auto x0 = rp.x.value(lo);
    for (std::size_t i = lo; i <= hi; ++i) {
        auto src = rp.x.value(i);
        auto dst = out.x.value(i - lo);
        for (int c = 0; c < d; ++c) dst[c] = recentre ? src[c] - x0[c] : src[c];
    }
    out.x2.assign(rp.x2.begin() + lo * std::size_t(d) * d, rp.x2.begin() + hi * std::size_t(d) * d);
    return out;
}

} // namespace rough
