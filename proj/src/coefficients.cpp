#include "rough/coefficients.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace rough {

namespace {

// Quintic smoothstep and derivatives (C^2 blend for the cap kink).
double ss0(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double ss1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double ss2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

struct Blend {
    double lo, hi; // blend window around the cap radius
};

Blend blend_window(const PowerCoefficient& pc) {
    const double rc = pc.cap_radius();
    const double w = pc.moll_rel_width * rc;
    return {rc - w, rc + w};
}

} // namespace

double PowerCoefficient::cap_radius() const {
    if (!capped()) return std::numeric_limits<double>::infinity();
    return std::pow(c2, 1.0 / kappa);
}

void PowerCoefficient::validate() const {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("PowerCoefficient: kappa must lie in (0,1)");
    if (!(c1 > 0.0)) throw std::invalid_argument("PowerCoefficient: c1 must be positive");
    if (!(c2 > 0.0)) throw std::invalid_argument("PowerCoefficient: c2 must be positive");
    if (directions.empty()) throw std::invalid_argument("PowerCoefficient: no directions");
    const std::size_t m = directions[0].size();
    if (m == 0) throw std::invalid_argument("PowerCoefficient: empty direction vector");
    for (const auto& v : directions) {
        if (v.size() != m)
            throw std::invalid_argument("PowerCoefficient: direction dimensions differ");
        double s = 0.0;
        for (double c : v) s += c * c;
        if (s == 0.0) throw std::invalid_argument("PowerCoefficient: zero direction vector");
    }
    if (smoothing == CapSmoothing::mollified && !capped())
        throw std::invalid_argument("PowerCoefficient: mollified smoothing needs a finite cap");
}

double envelope(const PowerCoefficient& pc, double r) {
    r = std::abs(r);
    const double power = pc.c1 * std::pow(r, pc.kappa);
    if (!pc.capped()) return power;
    const double capped = pc.c1 * pc.c2;
    if (pc.smoothing == CapSmoothing::none) return std::min(power, capped);
    const auto [lo, hi] = blend_window(pc);
    if (r <= lo) return power;
    if (r >= hi) return capped;
    const double u = (r - lo) / (hi - lo);
    return (1.0 - ss0(u)) * power + ss0(u) * capped;
}

double envelope_d1(const PowerCoefficient& pc, double r) {
    r = std::abs(r);
    if (r == 0.0) throw std::domain_error("OriginDerivative: envelope derivative at 0");
    const double dpower = pc.c1 * pc.kappa * std::pow(r, pc.kappa - 1.0);
    if (!pc.capped()) return dpower;
    if (pc.smoothing == CapSmoothing::none)
        return r <= pc.cap_radius() ? dpower : 0.0; // below-cap branch kept at the kink
    const auto [lo, hi] = blend_window(pc);
    if (r <= lo) return dpower;
    if (r >= hi) return 0.0;
    const double u = (r - lo) / (hi - lo);
    const double du = 1.0 / (hi - lo);
    const double power = pc.c1 * std::pow(r, pc.kappa);
    const double capped = pc.c1 * pc.c2;
    return (1.0 - ss0(u)) * dpower + ss1(u) * du * (capped - power);
}

double envelope_d2(const PowerCoefficient& pc, double r) {
    r = std::abs(r);
    if (r == 0.0) throw std::domain_error("OriginDerivative: envelope derivative at 0");
    const double d2power = pc.c1 * pc.kappa * (pc.kappa - 1.0) * std::pow(r, pc.kappa - 2.0);
    if (!pc.capped()) return d2power;
    if (pc.smoothing == CapSmoothing::none) return r <= pc.cap_radius() ? d2power : 0.0;
    const auto [lo, hi] = blend_window(pc);
    if (r <= lo) return d2power;
    if (r >= hi) return 0.0;
    const double u = (r - lo) / (hi - lo);
    const double du = 1.0 / (hi - lo);
    const double power = pc.c1 * std::pow(r, pc.kappa);
    const double dpower = pc.c1 * pc.kappa * std::pow(r, pc.kappa - 1.0);
    const double capped = pc.c1 * pc.c2;
    return (1.0 - ss0(u)) * d2power - 2.0 * ss1(u) * du * dpower +
           ss2(u) * du * du * (capped - power);
}

void sigma_eval(const PowerCoefficient& pc, std::span<const double> xi, std::span<double> out_md) {
    const int m = pc.m(), d = pc.d();
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    const double s = envelope(pc, std::sqrt(r2));
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < m; ++i) out_md[i * d + j] = pc.directions[j][i] * s;
}

void dsigma_eval(const PowerCoefficient& pc, std::span<const double> xi,
                 std::span<double> out_mdm) {
    const int m = pc.m(), d = pc.d();
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    const double r = std::sqrt(r2);
    if (r == 0.0) throw std::domain_error("OriginDerivative: D sigma undefined at 0");
    const double sd = envelope_d1(pc, r);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < m; ++k)
                out_mdm[(i * d + j) * m + k] = pc.directions[j][i] * sd * xi[k] / r;
}

void dsigma_sigma_eval(const PowerCoefficient& pc, std::span<const double> xi,
                       std::span<double> out_mdd) {
    const int m = pc.m(), d = pc.d();
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    const double r = std::sqrt(r2);
    if (r == 0.0) throw std::domain_error("OriginDerivative: D sigma . sigma undefined at 0");
    const double s = envelope(pc, r);
    const double sd = envelope_d1(pc, r);
    // G^{i;(j1 j)} = sum_k d_k sigma^{i j} sigma^{k j1}
    //             = s'(r) s(r) (v_{j1} . xi/r) v_j^i
    for (int j1 = 0; j1 < d; ++j1) {
        double proj = 0.0;
        for (int k = 0; k < m; ++k) proj += pc.directions[j1][k] * xi[k];
        proj /= r;
        const double coef = sd * s * proj;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < d; ++j)
                out_mdd[(i * d + j1) * d + j] = coef * pc.directions[j][i];
    }
}

double sigma1(const PowerCoefficient& pc, double y) { return envelope(pc, std::abs(y)); }

double dsigma1(const PowerCoefficient& pc, double y) {
    const double sgn = y >= 0.0 ? 1.0 : -1.0;
    return sgn * envelope_d1(pc, std::abs(y));
}

double dsigma_sigma1(const PowerCoefficient& pc, double y) {
    return dsigma1(pc, y) * sigma1(pc, y);
}

// ----------------------------------------------------------------------------
// seminorm estimation
// ----------------------------------------------------------------------------

SeminormEstimate seminorm_estimate(
    const std::function<void(std::span<const double>, std::span<double>)>& F,
    int in_dim, int out_dim, double alpha, const SampleSpec& spec) {
    if (spec.n_radii < 2 || !(spec.r_max > spec.r_min) || !(spec.r_min > 0.0))
        throw std::invalid_argument("seminorm_estimate: degenerate radius sampling");
    if (std::log10(spec.r_max / spec.r_min) < 6.0 - 1e-9)
        throw std::invalid_argument("seminorm_estimate: radii must span at least 6 decades");

    std::vector<double> radii(spec.n_radii);
    for (std::size_t i = 0; i < spec.n_radii; ++i)
        radii[i] = spec.r_min *
                   std::pow(spec.r_max / spec.r_min, double(i) / double(spec.n_radii - 1));

    std::mt19937_64 rng(spec.seed);
    auto unit_dir = [&](std::vector<double>& v) {
        std::normal_distribution<double> g(0.0, 1.0);
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (auto& c : v) {
                c = g(rng);
                n2 += c * c;
            }
        } while (n2 < 1e-12);
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& c : v) c *= inv;
    };

    std::size_t n_dirs = in_dim == 1 ? (spec.same_ray_only ? 1 : 2) : spec.n_directions;
    std::vector<std::vector<double>> dirs(n_dirs, std::vector<double>(in_dim));
    if (in_dim == 1) {
        dirs[0][0] = 1.0;
        if (n_dirs == 2) dirs[1][0] = -1.0;
    } else {
        for (auto& v : dirs) unit_dir(v);
    }

    std::vector<double> x1(in_dim), x2(in_dim), f1(out_dim), f2(out_dim);
    double sup = 0.0;
    std::size_t samples = 0;
    auto consider = [&](const std::vector<double>& da, double ra, const std::vector<double>& db,
                        double rb) {
        if (ra == rb) return;
        for (int c = 0; c < in_dim; ++c) {
            x1[c] = da[c] * ra;
            x2[c] = db[c] * rb;
        }
        F(x1, f1);
        F(x2, f2);
        double num = 0.0;
        for (int c = 0; c < out_dim; ++c) num += (f2[c] - f1[c]) * (f2[c] - f1[c]);
        const double den = std::abs(std::pow(rb, alpha) - std::pow(ra, alpha));
        if (den == 0.0) return;
        sup = std::max(sup, std::sqrt(num) / den);
        ++samples;
    };

    const std::size_t stride = std::max<std::size_t>(1, spec.n_radii / 64);
    for (const auto& dir : dirs)
        for (std::size_t i = 0; i < spec.n_radii; ++i)
            for (std::size_t j = i + 1; j < spec.n_radii; j += stride)
                consider(dir, radii[i], dir, radii[j]);

    if (!spec.same_ray_only && n_dirs > 1) {
        std::uniform_int_distribution<std::size_t> pick_dir(0, n_dirs - 1);
        std::uniform_int_distribution<std::size_t> pick_r(0, spec.n_radii - 1);
        for (std::size_t it = 0; it < 4 * spec.n_radii; ++it) {
            const std::size_t i = pick_r(rng), j = pick_r(rng);
            consider(dirs[pick_dir(rng)], radii[i], dirs[pick_dir(rng)], radii[j]);
        }
    }

    return {alpha, sup, samples};
}

// ----------------------------------------------------------------------------
// hypothesis verification
// ----------------------------------------------------------------------------

bool HypothesisReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

// ratio sup over same-ray sampled pairs for a scalar radial profile
double ray_ratio_sup(const std::function<double(double)>& f, double alpha, double r_min,
                     double r_max, std::size_t n) {
    double sup = 0.0;
    std::vector<double> radii(n);
    for (std::size_t i = 0; i < n; ++i)
        radii[i] = r_min * std::pow(r_max / r_min, double(i) / double(n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; j += 3) {
            const double den = std::abs(std::pow(radii[j], alpha) - std::pow(radii[i], alpha));
            if (den == 0.0) continue;
            sup = std::max(sup, std::abs(f(radii[j]) - f(radii[i])) / den);
        }
    return sup;
}

} // namespace

HypothesisReport verify_hypotheses(const PowerCoefficient& pc, double gamma) {
    pc.validate();
    HypothesisReport rep;
    auto add = [&](std::string name, bool pass, double worst, std::string detail) {
        rep.checks.push_back({std::move(name), pass, worst, std::move(detail)});
    };

    add("kappa_plus_gamma", pc.kappa + gamma > 1.0, pc.kappa + gamma,
        "requires kappa + gamma > 1");

    std::vector<double> zero(pc.m(), 0.0), s0(std::size_t(pc.m()) * pc.d());
    sigma_eval(pc, zero, s0);
    double s0n = 0.0;
    for (double v : s0) s0n += v * v;
    add("sigma_at_zero", s0n == 0.0, std::sqrt(s0n), "sigma(0) = 0");

    const double rmin = 1e-4, rmax = 1e2;
    // difference bound for sigma at alpha = kappa (ratio identically c1 below
    // the cap, smaller across it)
    {
        const double sup = ray_ratio_sup([&](double r) { return envelope(pc, r); }, pc.kappa,
                                         rmin, rmax, 200);
        const double sup_half = ray_ratio_sup([&](double r) { return envelope(pc, r); }, pc.kappa,
                                              rmin, rmax, 100);
        const bool stable = sup <= pc.c1 * (1.0 + 1e-9) && sup_half <= sup * (1.0 + 1e-9);
        add("alpha_bound_sigma", stable, sup, "sup ratio vs |r2^k - r1^k|, bound c1");
    }
    // difference bound for Dsigma.sigma at alpha = 2*kappa - 1, same-ray pairs
    {
        const double alpha = 2.0 * pc.kappa - 1.0;
        double sup = 0.0;
        bool pass = true;
        if (std::abs(alpha) < 1e-12) {
            // profile is ray-constant below the cap in this edge case
            sup = std::abs(dsigma_sigma1(pc, std::min(rmax, pc.cap_radius() * 0.5)) -
                           dsigma_sigma1(pc, rmin));
            pass = sup < 1e-9;
        } else {
            sup = ray_ratio_sup([&](double r) { return dsigma_sigma1(pc, r); }, alpha, rmin,
                                rmax, 200);
            const double expected = pc.c1 * pc.c1 * pc.kappa;
            pass = std::isfinite(sup) && sup <= expected * (1.0 + 1e-6) + 1e-12;
        }
        add("alpha_bound_dss", pass, sup, "same-ray sup ratio at alpha = 2k-1");
    }
    // interpolated difference bound at eta in {0, (1-a)/2, 1-a}
    for (std::pair<const char*, double> fa :
         {std::pair<const char*, double>{"interp_sigma", pc.kappa},
          std::pair<const char*, double>{"interp_dss", 2.0 * pc.kappa - 1.0}}) {
        const double alpha = fa.second;
        if (alpha <= 0.0) {
            add(std::string(fa.first), true, 0.0, "alpha <= 0: not applicable");
            continue;
        }
        std::function<double(double)> prof;
        if (std::string(fa.first) == "interp_sigma")
            prof = [&](double r) { return envelope(pc, r); };
        else
            prof = [&](double r) { return dsigma_sigma1(pc, r); };
        const double N = ray_ratio_sup(prof, alpha, rmin, rmax, 200) * (1.0 + 1e-9);
        double worst = 0.0;
        bool pass = true;
        for (double eta : {0.0, (1.0 - alpha) / 2.0, 1.0 - alpha}) {
            for (std::size_t i = 0; i < 60 && pass; ++i) {
                const double r1 = rmin * std::pow(rmax / rmin, double(i) / 59.0);
                for (std::size_t j = i + 1; j < 60; ++j) {
                    const double r2 = rmin * std::pow(rmax / rmin, double(j) / 59.0);
                    const double lhs = std::abs(prof(r2) - prof(r1));
                    const double rhs = alpha / (alpha + eta) * N *
                                       (std::pow(r2, -eta) + std::pow(r1, -eta)) *
                                       std::pow(std::abs(r2 - r1), alpha + eta);
                    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
                    if (lhs > rhs * (1.0 + 1e-6)) {
                        pass = false;
                        break;
                    }
                }
            }
        }
        add(std::string(fa.first), pass, worst, "interpolated difference bound, worst lhs/rhs");
    }
    // derivative envelopes |D sigma| ~ r^{k-1}, |D^2 sigma| ~ r^{k-2} below cap
    {
        double lo1 = std::numeric_limits<double>::infinity(), hi1 = 0.0;
        double lo2 = std::numeric_limits<double>::infinity(), hi2 = 0.0;
        const double top = std::min(rmax, pc.capped() ? 0.9 * pc.cap_radius() : rmax);
        for (std::size_t i = 0; i < 64; ++i) {
            const double r = rmin * std::pow(top / rmin, double(i) / 63.0);
            const double e1 = std::abs(envelope_d1(pc, r)) * std::pow(r, 1.0 - pc.kappa);
            const double e2 = std::abs(envelope_d2(pc, r)) * std::pow(r, 2.0 - pc.kappa);
            lo1 = std::min(lo1, e1);
            hi1 = std::max(hi1, e1);
            lo2 = std::min(lo2, e2);
            hi2 = std::max(hi2, e2);
        }
        const bool pass = hi1 / lo1 < 1.0 + 1e-9 && hi2 / lo2 < 1.0 + 1e-9;
        add("derivative_envelope", pass, hi1 / lo1, "r^{1-k}|Ds| and r^{2-k}|D2s| flat below cap");
    }
    // 1-d transform composition bound
    if (pc.m() == 1 && pc.d() == 1) {
        const double beta = std::min((2.0 * pc.kappa - 1.0) / (1.0 - pc.kappa), 1.0);
        if (beta <= 0.0) {
            add("transform_composition", true, 0.0, "exponent <= 0: not applicable");
        } else {
            const double u_max = lamperti_phi(pc, std::min(rmax, 10.0));
            double sup = 0.0;
            for (std::size_t i = 0; i < 80; ++i) {
                const double u1 = u_max * (double(i) + 1.0) / 81.0;
                for (std::size_t j = i + 1; j < 80; ++j) {
                    const double u2 = u_max * (double(j) + 1.0) / 81.0;
                    const double den = std::abs(std::pow(u2, beta) - std::pow(u1, beta));
                    if (den == 0.0) continue;
                    const double lhs = std::abs(dsigma_sigma1(pc, lamperti_phi_inverse(pc, u2)) -
                                                dsigma_sigma1(pc, lamperti_phi_inverse(pc, u1)));
                    sup = std::max(sup, lhs / den);
                }
            }
            add("transform_composition", std::isfinite(sup), sup,
                "(Ds.s) o phi^{-1} difference ratio, exponent min((2k-1)/(1-k), 1)");
        }
    }
    // lower envelope when uncapped: sigma(r) >= c r^k with c = c1
    if (!pc.capped()) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < 64; ++i) {
            const double r = rmin * std::pow(rmax / rmin, double(i) / 63.0);
            worst = std::min(worst, envelope(pc, r) / std::pow(r, pc.kappa));
        }
        add("positive_envelope", worst >= pc.c1 * (1.0 - 1e-12), worst,
            "sigma(r) / r^k lower bound");
    } else {
        add("cap_regularity", true, pc.c1 * pc.c2,
            "sigma bounded above the cap; smooth off the origin");
    }
    return rep;
}

// ----------------------------------------------------------------------------
// integrating-factor transform
// ----------------------------------------------------------------------------

double lamperti_phi(const PowerCoefficient& pc, double xi) {
    if (pc.m() != 1 || pc.d() != 1)
        throw std::invalid_argument("lamperti_phi: one-dimensional coefficients only");
    const double sgn = xi >= 0.0 ? 1.0 : -1.0;
    const double r = std::abs(xi);
    const double one_m_k = 1.0 - pc.kappa;
    const double rc = pc.cap_radius();
    double val;
    if (r <= rc) {
        val = std::pow(r, one_m_k) / (pc.c1 * one_m_k);
    } else {
        val = std::pow(rc, one_m_k) / (pc.c1 * one_m_k) + (r - rc) / (pc.c1 * pc.c2);
    }
    return sgn * val;
}

double lamperti_phi_inverse(const PowerCoefficient& pc, double u) {
    if (pc.m() != 1 || pc.d() != 1)
        throw std::invalid_argument("lamperti_phi_inverse: one-dimensional coefficients only");
    const double sgn = u >= 0.0 ? 1.0 : -1.0;
    const double a = std::abs(u);
    const double one_m_k = 1.0 - pc.kappa;
    const double rc = pc.cap_radius();
    const double u_cap = pc.capped() ? std::pow(rc, one_m_k) / (pc.c1 * one_m_k)
                                     : std::numeric_limits<double>::infinity();
    double r;
    if (a <= u_cap) {
        r = std::pow(pc.c1 * one_m_k * a, 1.0 / one_m_k);
    } else {
        r = rc + (a - u_cap) * pc.c1 * pc.c2;
    }
    return sgn * r;
}

} // namespace rough
