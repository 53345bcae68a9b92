#include "rough/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rough {

namespace {

double radius(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// J-interval index: r in [b1, b2) * 2^{-q}; -1 for r >= b2.
int j_index(double r, double b1, double b2) {
    if (r >= b2) return -1;
    return int(std::ceil(-std::log2(r / b1) - 1e-12));
}

bool in_I(double r, int q) {
    if (q == -1) return r >= 1.0;
    return r >= std::ldexp(1.0, -(q + 1)) && r < std::ldexp(1.0, -q);
}

bool in_J(double r, int q, double b1, double b2) {
    if (q == -1) return r >= b2;
    return r >= b1 * std::ldexp(1.0, -q) && r < b2 * std::ldexp(1.0, -q);
}

} // namespace

void SolverParams::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("SolverParams: gamma must lie in (0, 1]");
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("SolverParams: kappa must lie in (0, 1)");
    if (!(kappa + gamma > 1.0))
        throw std::invalid_argument("SolverParams: kappa + gamma must exceed 1");
    if (!(c0 > 0.0)) throw std::invalid_argument("SolverParams: c0 must be positive");
    if (!(step_frac > 0.0 && step_frac <= 1.0))
        throw std::invalid_argument("SolverParams: step_frac must lie in (0, 1]");
    if (!(zero_threshold > 0.0))
        throw std::invalid_argument("SolverParams: zero_threshold must be positive");
}

int shell_index(double r) {
    if (r >= 1.0) return -1;
    if (!(r > 0.0)) throw std::domain_error("shell_index: radius must be positive");
    return int(std::ceil(-std::log2(r) - 1e-12)) - 1;
}

ShellTrace track_shells(std::span<const double> times, std::span<const double> radii,
                        double zero_threshold) {
    if (times.size() != radii.size() || times.size() < 2)
        throw std::invalid_argument("track_shells: need matching times/radii, length >= 2");
    ShellTrace tr;
    const double b1 = tr.b1, b2 = tr.b2;
    tr.coverage_end = times.back();

    auto is_zero = [&](double r) { return r == 0.0 || r <= zero_threshold; };

    if (is_zero(radii[0])) {
        tr.zero_hit = times[0];
        tr.coverage_end = times[0];
        return tr;
    }

    ShellEntry cur;
    cur.lambda = times[0];
    cur.q = shell_index(radii[0]);
    bool phase_I = true;

    for (std::size_t i = 1; i < times.size(); ++i) {
        const double r = radii[i];
        if (is_zero(r)) {
            tr.zero_hit = times[i];
            tr.coverage_end = times[i];
            tr.entries.push_back(cur);
            return tr;
        }
        if (phase_I) {
            if (!in_I(r, cur.q)) {
                cur.tau = times[i];
                cur.q_hat = j_index(r, b1, b2);
                if (cur.q_hat != cur.q && cur.q_hat != cur.q - 1) ++tr.shell_jumps;
                phase_I = false;
            }
        } else {
            if (!in_J(r, cur.q_hat, b1, b2)) {
                const int q_next = shell_index(r);
                if (std::abs(q_next - cur.q) >= 2) ++tr.shell_jumps;
                tr.entries.push_back(cur);
                cur = ShellEntry{};
                cur.lambda = times[i];
                cur.q = q_next;
                phase_I = true;
            }
        }
    }
    tr.entries.push_back(cur);
    return tr;
}

ShellTrace track_shells(const Inc1& y, double zero_threshold) {
    std::vector<double> r(y.points());
    for (std::size_t i = 0; i < y.points(); ++i) r[i] = radius(y.value(i));
    return track_shells(y.grid().points(), r, zero_threshold);
}

ShellInvariantReport check_shell_invariants(const ShellTrace& trace,
                                            std::span<const double> times,
                                            std::span<const double> radii) {
    ShellInvariantReport rep;
    const double b1 = trace.b1, b2 = trace.b2;
    const auto& es = trace.entries;
    for (std::size_t k = 0; k < es.size(); ++k) {
        const bool has_tau = !std::isnan(es[k].tau);
        if (has_tau && !(es[k].lambda < es[k].tau)) rep.lambda_tau_ordered = false;
        if (k + 1 < es.size()) {
            if (!has_tau || !(es[k].tau <= es[k + 1].lambda)) rep.lambda_tau_ordered = false;
            if (std::abs(es[k + 1].q - es[k].q) > 1) rep.q_steps_unit = false;
        }
        // phase membership on the sampled points, up to the tracked region end
        const double phase_end =
            std::min(k + 1 < es.size() ? es[k + 1].lambda : times.back(), trace.coverage_end);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            if (t < es[k].lambda || t >= phase_end) continue;
            if (has_tau && t >= es[k].tau) {
                if (!in_J(radii[i], es[k].q_hat, b1, b2)) rep.phase_membership = false;
            } else if (!has_tau || t < es[k].tau) {
                if (!in_I(radii[i], es[k].q)) rep.phase_membership = false;
            }
        }
    }
    return rep;
}

std::vector<double> SolutionPath::radii() const {
    std::vector<double> r(y.points());
    for (std::size_t i = 0; i < y.points(); ++i) r[i] = radius(y.value(i));
    return r;
}

SolutionPath solve_1d_lamperti(const PowerCoefficient& pc, double a, const Inc1& x,
                               LampertiZeroMode mode, double zero_threshold) {
    pc.validate();
    if (pc.m() != 1 || pc.d() != 1)
        throw std::invalid_argument("solve_1d_lamperti: one-dimensional coefficients only");
    if (x.dim() != 1) throw std::invalid_argument("solve_1d_lamperti: scalar driver required");
    if (a < 0.0) throw std::invalid_argument("solve_1d_lamperti: a must be nonnegative");

    const double phi_a = lamperti_phi(pc, a);
    const std::size_t n = x.points();
    SolutionPath sp;
    sp.grid = x.grid();
    sp.y = Inc1(x.grid(), 1);
    sp.base_indices.resize(n);
    for (std::size_t i = 0; i < n; ++i) sp.base_indices[i] = i;
    sp.zero_companion = (a == 0.0);
    sp.c0_used = 0.0;

    bool absorbed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = x.scalar(i) + phi_a;
        if (absorbed) {
            sp.y.raw()[i] = 0.0;
            continue;
        }
        // absorption starts at the first later time the argument reaches 0;
        // at i = 0 the transform starts at a (possibly 0) and moves freely
        if (mode == LampertiZeroMode::absorb && u <= 0.0 && i > 0) {
            absorbed = true;
            sp.tau = x.grid()[i];
            sp.y.raw()[i] = 0.0;
            continue;
        }
        sp.y.raw()[i] = lamperti_phi_inverse(pc, u);
    }
    sp.case_label = absorbed ? 'B' : 'A';
    sp.shells = track_shells(sp.y, zero_threshold);
    return sp;
}

namespace {

struct DavieAttempt {
    SolutionPath sp;
    bool shell_jump = false;
};

DavieAttempt run_davie(const PowerCoefficient& pc, std::span<const double> a,
                       const RoughPath& rp, const SolverParams& params, double c0_eff) {
    const int m = pc.m(), d = pc.d();
    const std::size_t n = rp.grid.size();
    const auto& t = rp.grid.points();
    const double alpha = params.alpha();

    std::vector<double> y(a.begin(), a.end());
    std::vector<std::size_t> indices = {0};
    std::vector<double> samples(a.begin(), a.end());

    std::vector<double> sig(std::size_t(m) * d), G(std::size_t(m) * d * d);
    std::vector<double> dx(d), x2(std::size_t(d) * d), ynew(m);

    DavieAttempt at;
    std::optional<std::size_t> hit;
    std::size_t idx = 0, steps = 0;

    double r = radius(y);
    if (r <= params.zero_threshold) hit = 0;

    while (!hit && idx + 1 < n) {
        if (++steps > params.max_steps) throw std::runtime_error("MaxSteps: step budget exhausted");
        const int q_before = shell_index(r);
        const double cap = c0_eff * params.step_frac * std::exp2(-alpha * std::max(q_before, 0));
        if (t[idx + 1] - t[idx] > cap)
            throw std::runtime_error("StepUnderflow: grid too coarse at shell q=" +
                                     std::to_string(std::max(q_before, 0)));
        std::size_t j = idx + 1;
        while (j + 1 < n && t[j + 1] - t[idx] <= cap) ++j;

        auto xa = rp.x.value(idx);
        auto xb = rp.x.value(j);
        for (int c = 0; c < d; ++c) dx[c] = xb[c] - xa[c];
        chen_extend(rp, idx, j, x2);
        sigma_eval(pc, y, sig);
        dsigma_sigma_eval(pc, y, G);
        for (int i = 0; i < m; ++i) {
            double acc = y[i];
            for (int c = 0; c < d; ++c) acc += sig[i * d + c] * dx[c];
            for (int j1 = 0; j1 < d; ++j1)
                for (int j2 = 0; j2 < d; ++j2)
                    acc += G[(i * d + j1) * d + j2] * x2[j1 * d + j2];
            ynew[i] = acc;
        }
        y = ynew;
        idx = j;
        indices.push_back(idx);
        samples.insert(samples.end(), y.begin(), y.end());

        r = radius(y);
        if (r == 0.0 || r <= params.zero_threshold) {
            hit = idx;
            break;
        }
        const int q_after = shell_index(r);
        if (std::abs(q_after - q_before) >= 2 && q_before >= 0) {
            at.shell_jump = true;
            if (params.auto_halve_c0) break;
        }
    }

    if (hit && *hit < n - 1) {
        // absorbed: continue with y = 0 on a thinned tail of the driver grid
        for (int c = 0; c < m; ++c) samples[samples.size() - m + c] = 0.0;
        const std::size_t start = *hit;
        const std::size_t stride = std::max<std::size_t>(1, (n - 1 - start) / 256);
        for (std::size_t k = start + stride; k < n - 1; k += stride) {
            indices.push_back(k);
            samples.insert(samples.end(), std::size_t(m), 0.0);
        }
        indices.push_back(n - 1);
        samples.insert(samples.end(), std::size_t(m), 0.0);
    }

    std::vector<double> pts(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) pts[i] = t[indices[i]];
    auto& sp = at.sp;
    sp.grid = TimeGrid(std::move(pts));
    sp.y = Inc1(sp.grid, m, std::move(samples));
    sp.base_indices = std::move(indices);
    sp.case_label = hit ? 'B' : 'A';
    if (hit) sp.tau = t[*hit];
    sp.c0_used = c0_eff;
    sp.shells = track_shells(sp.y, params.zero_threshold);
    return at;
}

} // namespace

SolutionPath solve_md_davie(const PowerCoefficient& pc, std::span<const double> a,
                            const RoughPath& rp, const SolverParams& params) {
    pc.validate();
    params.validate();
    if (int(a.size()) != pc.m()) throw std::invalid_argument("solve_md_davie: a has wrong dimension");
    if (pc.d() != rp.dim) throw std::invalid_argument("solve_md_davie: driver dimension mismatch");
    if (radius(a) == 0.0) throw std::invalid_argument("solve_md_davie: a must be nonzero");

    double c0_eff = params.c0;
    for (int attempt = 0;; ++attempt) {
        DavieAttempt at = run_davie(pc, a, rp, params, c0_eff);
        if (!at.shell_jump || !params.auto_halve_c0 || attempt >= params.max_halvings)
            return std::move(at.sp);
        c0_eff *= 0.5;
    }
}

Inc2Grid remainder_grid(const SolutionPath& sp, const RoughPath& rp, const PowerCoefficient& pc,
                        std::size_t lo, std::size_t hi) {
    if (!(lo < hi && hi < sp.grid.size()))
        throw std::invalid_argument("remainder_grid: bad window");
    const int m = pc.m(), d = pc.d();
    if (sp.tau && sp.grid[hi] >= *sp.tau)
        throw std::invalid_argument("remainder_grid: window overlaps the zero region");
    for (std::size_t i = lo; i <= hi; ++i)
        if (radius(sp.y.value(i)) == 0.0)
            throw std::invalid_argument("remainder_grid: window overlaps the zero region");

    // window sub-grid shifted to start at 0
    std::vector<double> pts(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) pts[i - lo] = sp.grid[i] - sp.grid[lo];
    pts[0] = 0.0;
    Inc2Grid R(TimeGrid(std::move(pts)), m);

    std::vector<double> sig(std::size_t(m) * d), G(std::size_t(m) * d * d);
    std::vector<double> x2(std::size_t(d) * d);
    for (std::size_t u = lo; u < hi; ++u) {
        sigma_eval(pc, sp.y.value(u), sig);
        dsigma_sigma_eval(pc, sp.y.value(u), G);
        auto xu = rp.x.value(sp.base_indices[u]);
        auto yu = sp.y.value(u);
        for (std::size_t v = u + 1; v <= hi; ++v) {
            auto xv = rp.x.value(sp.base_indices[v]);
            auto yv = sp.y.value(v);
            chen_extend(rp, sp.base_indices[u], sp.base_indices[v], x2);
            auto out = R.at(u - lo, v - lo);
            for (int i = 0; i < m; ++i) {
                double acc = yv[i] - yu[i];
                for (int c = 0; c < d; ++c) acc -= sig[i * d + c] * (xv[c] - xu[c]);
                for (int j1 = 0; j1 < d; ++j1)
                    for (int j2 = 0; j2 < d; ++j2)
                        acc -= G[(i * d + j1) * d + j2] * x2[j1 * d + j2];
                out[i] = acc;
            }
        }
    }
    return R;
}

} // namespace rough
