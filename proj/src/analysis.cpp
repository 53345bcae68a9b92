#include "rough/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rough {

OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("ols_fit: need matching samples, at least 2");
    const double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("ols_fit: degenerate abscissae");
    OlsFit fit;
    fit.n = xs.size();
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    if (xs.size() > 2)
        fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));
    return fit;
}

namespace {

double check_eps_knobs(double kappa, double gamma, double alpha, double eps1, double eps2) {
    const double limit = std::min(kappa / (1.0 - gamma), eps1 * alpha / (gamma + eps1));
    if (!(eps1 > 0.0)) throw std::invalid_argument("scaling_study: eps1 must be positive");
    if (!(eps2 > 0.0 && eps2 < limit))
        throw std::invalid_argument(
            "scaling_study: eps2 must satisfy eps2 < min(kappa/(1-gamma), eps1*alpha/(gamma+eps1))");
    return limit;
}

} // namespace

RegularityReport scaling_study(const SolutionPath& sp, const RoughPath& rp,
                               const PowerCoefficient& pc, double gamma,
                               const StudyOptions& opts) {
    const double kappa = pc.kappa;
    const double alpha = (1.0 - kappa) / gamma;
    const double eps1 = opts.eps1;
    const double eps2 =
        opts.eps2 ? *opts.eps2
                  : 0.9 * std::min(kappa / (1.0 - gamma), eps1 * alpha / (gamma + eps1));
    check_eps_knobs(kappa, gamma, alpha, eps1, eps2);

    RegularityReport rep;
    rep.eps1 = eps1;
    rep.eps2 = eps2;
    rep.target_y = -kappa;
    rep.target_R = 2.0 - 3.0 * kappa;
    rep.target_r = -(kappa + 2.0 * eps1 * alpha);

    const auto& entries = sp.shells.entries;
    const double c0 = sp.c0_used > 0.0 ? sp.c0_used : 0.5;
    const int m = pc.m(), d = pc.d();

    for (std::size_t k = 0; k < entries.size(); ++k) {
        const int q = entries[k].q;
        if (q < opts.q_min || q > opts.q_max) continue;
        const double lam = entries[k].lambda;
        const double lam_next = k + 1 < entries.size() ? entries[k + 1].lambda
                                                       : sp.grid.horizon();
        const double span = std::min(c0 * std::exp2(-alpha * q), lam_next - lam);
        if (!(span > 0.0)) continue;

        // window indices in the solution grid
        const auto& tp = sp.grid.points();
        const auto lo_it = std::lower_bound(tp.begin(), tp.end(), lam - 1e-15);
        std::size_t lo = std::size_t(lo_it - tp.begin());
        std::size_t hi = lo;
        while (hi + 1 < tp.size() && tp[hi + 1] <= lam + span + 1e-15) ++hi;
        if (hi <= lo + 2) continue;
        if (sp.tau && tp[hi] >= *sp.tau) continue;

        // subsample to keep pair scans bounded
        std::vector<std::size_t> window;
        const std::size_t count = hi - lo + 1;
        const std::size_t stride = std::max<std::size_t>(1, count / opts.max_window_points);
        for (std::size_t i = lo; i <= hi; i += stride) window.push_back(i);
        if (window.back() != hi) window.push_back(hi);
        if (window.size() < 3) continue;

        ShellWindowRecord rec;
        rec.k = k;
        rec.q = q;
        rec.window_lo = tp[lo];
        rec.window_hi = tp[hi];
        rec.points = window.size();

        std::vector<double> G(std::size_t(m) * d * d), x2(std::size_t(d) * d);
        double ny = 0, nR = 0, nr = 0, nr_levy = 0, nr_rem = 0;
        std::vector<double> sig(std::size_t(m) * d);
        for (std::size_t a = 0; a < window.size(); ++a) {
            const std::size_t u = window[a];
            auto yu = sp.y.value(u);
            sigma_eval(pc, yu, sig);
            dsigma_sigma_eval(pc, yu, G);
            auto xu = rp.x.value(sp.base_indices[u]);
            for (std::size_t b = a + 1; b < window.size(); ++b) {
                const std::size_t v = window[b];
                auto yv = sp.y.value(v);
                auto xv = rp.x.value(sp.base_indices[v]);
                const double dt = tp[v] - tp[u];
                chen_extend(rp, sp.base_indices[u], sp.base_indices[v], x2);
                double dy2 = 0, rem2 = 0, levy2 = 0, r2 = 0;
                for (int i = 0; i < m; ++i) {
                    const double dy = yv[i] - yu[i];
                    double first = 0.0;
                    for (int c = 0; c < d; ++c) first += sig[i * d + c] * (xv[c] - xu[c]);
                    double levy = 0.0;
                    for (int j1 = 0; j1 < d; ++j1)
                        for (int j2 = 0; j2 < d; ++j2)
                            levy += G[(i * d + j1) * d + j2] * x2[j1 * d + j2];
                    const double R = dy - first - levy;
                    const double r = levy + R; // dy - sigma(y_u) dx
                    dy2 += dy * dy;
                    rem2 += R * R;
                    levy2 += levy * levy;
                    r2 += r * r;
                }
                ny = std::max(ny, std::sqrt(dy2) / std::pow(dt, gamma));
                nR = std::max(nR, std::sqrt(rem2) / std::pow(dt, 3.0 * gamma));
                nr = std::max(nr, std::sqrt(r2) / std::pow(dt, gamma));
                nr_levy = std::max(nr_levy, std::sqrt(levy2) / std::pow(dt, gamma));
                nr_rem = std::max(nr_rem, std::sqrt(rem2) / std::pow(dt, gamma));
            }
        }
        rec.n_y = ny;
        rec.n_R = nR;
        rec.n_r = nr;
        rec.n_r_levy = nr_levy;
        rec.n_r_rem = nr_rem;
        rep.records.push_back(rec);
    }

    if (rep.records.size() < opts.min_shells)
        throw std::runtime_error("InsufficientShells: need at least " +
                                 std::to_string(opts.min_shells) + " qualifying shells");

    std::vector<double> qs, ly, lR, lr;
    for (const auto& r : rep.records) {
        if (!(r.n_y > 0.0 && r.n_R > 0.0 && r.n_r > 0.0)) continue;
        qs.push_back(double(r.q));
        ly.push_back(std::log2(r.n_y));
        lR.push_back(std::log2(r.n_R));
        lr.push_back(std::log2(r.n_r));
    }
    if (qs.size() < opts.min_shells)
        throw std::runtime_error("InsufficientShells: too few nonzero shell records");
    rep.y_fit = ols_fit(qs, ly);
    rep.R_fit = ols_fit(qs, lR);
    rep.r_fit = ols_fit(qs, lr);
    rep.fitted_c1 = std::exp2(rep.y_fit.intercept);
    rep.fitted_c2 = std::exp2(rep.R_fit.intercept);
    rep.fitted_c3 = std::exp2(rep.r_fit.intercept);
    return rep;
}

GapReport gap_study(const ShellTrace& shells, const SolverParams& params, double eps2,
                    int q_min, std::size_t min_gaps) {
    GapReport rep;
    rep.alpha = params.alpha();
    rep.eps2 = eps2;
    const auto& es = shells.entries;
    for (std::size_t k = 0; k + 1 < es.size(); ++k) {
        if (es[k].q < q_min) continue;
        const double gap = es[k + 1].lambda - es[k].lambda;
        if (!(gap > 0.0)) continue;
        rep.qs.push_back(es[k].q);
        rep.gaps.push_back(gap);
    }
    if (rep.gaps.size() < min_gaps)
        throw std::runtime_error("InsufficientShells: need at least " + std::to_string(min_gaps) +
                                 " gaps with q >= " + std::to_string(q_min));
    std::vector<double> xs(rep.qs.begin(), rep.qs.end()), ys;
    ys.reserve(rep.gaps.size());
    for (double g : rep.gaps) ys.push_back(std::log2(g));
    rep.fit = ols_fit(xs, ys);
    return rep;
}

double global_holder_seminorm(const SolutionPath& sp, double gamma, std::size_t max_points) {
    const std::size_t n = sp.y.points();
    const std::size_t stride = std::max<std::size_t>(1, n / max_points);
    const auto& tp = sp.grid.points();
    const int m = sp.y.dim();
    double sup = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
        auto yi = sp.y.value(i);
        for (std::size_t j = i + stride; j < n; j += stride) {
            auto yj = sp.y.value(j);
            double s = 0.0;
            for (int c = 0; c < m; ++c) s += (yj[c] - yi[c]) * (yj[c] - yi[c]);
            if (s == 0.0) continue;
            sup = std::max(sup, std::sqrt(s) / std::pow(tp[j] - tp[i], gamma));
        }
    }
    // consecutive pairs always included (the finest scales matter most)
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto yi = sp.y.value(i);
        auto yj = sp.y.value(i + 1);
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += (yj[c] - yi[c]) * (yj[c] - yi[c]);
        if (s == 0.0) continue;
        sup = std::max(sup, std::sqrt(s) / std::pow(tp[i + 1] - tp[i], gamma));
    }
    return sup;
}

GlobalHolderReport global_holder_refinement(double seminorm_coarse, double seminorm_fine) {
    GlobalHolderReport rep;
    rep.seminorm_coarse = seminorm_coarse;
    rep.seminorm_fine = seminorm_fine;
    rep.growth = seminorm_coarse > 0.0 ? seminorm_fine / seminorm_coarse : 1.0;
    rep.pass = std::isfinite(seminorm_fine) && rep.growth < 2.0;
    return rep;
}

ItoStudy ito_stratonovich_study(const RoughPath& rp, std::span<const ScalarField> fields,
                                std::span<const int> depths, std::size_t max_probe_points) {
    ItoStudy study;
    for (const auto& g : fields) {
        std::vector<double> xs, ys;
        for (int depth : depths) {
            const auto res = ito_stratonovich_residual(g, rp, depth, max_probe_points);
            study.rows.push_back({g.name, depth, res.sup});
            if (res.sup > 0.0) {
                xs.push_back(double(depth));
                ys.push_back(std::log2(res.sup));
            }
        }
        if (xs.size() >= 2) {
            auto fit = ols_fit(xs, ys);
            // decay order = -slope of log2(residual) vs depth
            fit.slope = -fit.slope;
            study.orders.emplace_back(g.name, fit);
        } else {
            study.orders.emplace_back(g.name, OlsFit{});
        }
    }
    return study;
}

ConvergenceReport self_convergence_study(const PowerCoefficient& pc, std::span<const double> a,
                                         const Inc1& fine_path, double gamma,
                                         std::span<const std::size_t> coarse_levels,
                                         std::size_t reference_level,
                                         const SolverParams& params) {
    const double T = fine_path.grid().horizon();
    // the scheme mesh is what converges: pin the step cap to the level mesh
    // (away from the origin the shell index stays at 0 and the scheme then
    // marches cell by cell on the level grid)
    auto solve_at = [&](std::size_t n_coarse) {
        TimeGrid coarse = TimeGrid::uniform(T, n_coarse);
        RoughPath rp = lift_piecewise_linear(fine_path, coarse, gamma);
        SolverParams p = params;
        p.step_frac = 1.0;
        p.c0 = T / double(n_coarse) * (1.0 + 1e-12);
        return solve_md_davie(pc, a, rp, p);
    };

    SolutionPath ref = solve_at(reference_level);
    ConvergenceReport rep;
    const int m = pc.m();
    for (std::size_t level : coarse_levels) {
        SolutionPath sol = solve_at(level);
        // compare at the coarse solution's sample times against the reference
        double err = 0.0;
        std::size_t ri = 0;
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            const double t = sol.grid[i];
            while (ri + 1 < ref.grid.size() && ref.grid[ri] < t - 1e-12 * T) ++ri;
            if (std::abs(ref.grid[ri] - t) > 1e-9 * T) continue;
            double s = 0.0;
            for (int c = 0; c < m; ++c) {
                const double d = sol.y.value(i)[c] - ref.y.value(ri)[c];
                s += d * d;
            }
            err = std::max(err, std::sqrt(s));
        }
        rep.levels.push_back(level);
        rep.errors.push_back(err);
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        if (!(rep.errors[i] > 0.0)) continue;
        xs.push_back(std::log2(T / double(rep.levels[i])));
        ys.push_back(std::log2(rep.errors[i]));
    }
    if (xs.size() >= 2) rep.order = ols_fit(xs, ys);
    return rep;
}

} // namespace rough
