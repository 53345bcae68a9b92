#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rough/controlled.hpp"

#include <cmath>

using namespace rough;

namespace {

RoughPath smooth_lift(std::size_t n, int refine, double gamma,
                      const std::function<double(double)>& f) {
    TimeGrid coarse = TimeGrid::uniform(1.0, n);
    Inc1 path = Inc1::from_scalar_function(coarse.refined(refine), f);
    return lift_piecewise_linear(path, coarse, gamma);
}

RoughPath fbm_driver(double H = 0.4, std::size_t n = 1024, std::uint64_t seed = 13) {
    FbmSpec spec;
    spec.H = H;
    spec.n_coarse = n;
    spec.refine_factor = 4;
    spec.seed = seed;
    return fbm_rough_path(spec);
}

SmoothMap sin_map() {
    return SmoothMap::scalar([](double x) { return std::sin(x); },
                             [](double x) { return std::cos(x); });
}

double trapezoid(const std::function<double(double)>& f, double s, double t, std::size_t n) {
    double acc = 0.5 * (f(s) + f(t));
    const double h = (t - s) / double(n);
    for (std::size_t k = 1; k < n; ++k) acc += f(s + h * double(k));
    return acc * h;
}

} // namespace

TEST_CASE("identity composition has unit derivative and zero remainder") {
    RoughPath rp = fbm_driver();
    auto cp = compose_smooth(SmoothMap::identity(1), 1.0, rp);
    CHECK(cp.eta == doctest::Approx(2.0 * rp.gamma));
    for (std::size_t i = 0; i < rp.grid.size(); i += 97) CHECK(cp.zeta.scalar(i) == 1.0);
    CHECK(cp.remainder_seminorm(2.0 * rp.gamma, 0, rp.grid.size() - 1) == 0.0);
}

TEST_CASE("squaring a one-dimensional path gives remainder (dx)^2") {
    RoughPath rp = fbm_driver(0.4, 256, 5);
    auto cp = compose_smooth(SmoothMap::scalar([](double x) { return x * x; },
                                               [](double x) { return 2.0 * x; }),
                             1.0, rp);
    // exact algebra: z_t - z_s - 2 x_s (x_t - x_s) = (x_t - x_s)^2
    for (std::size_t i = 0; i < rp.grid.size(); i += 17)
        for (std::size_t j = i + 1; j < rp.grid.size(); j += 31) {
            const double dx = rp.x.scalar(j) - rp.x.scalar(i);
            CHECK(cp.remainder(i, j)[0] == doctest::Approx(dx * dx).epsilon(1e-10));
        }
    // remainder seminorm at level 2 gamma equals the squared gamma-seminorm profile
    const double sem = cp.remainder_seminorm(2.0 * rp.gamma, 0, 128);
    double brute = 0.0;
    for (std::size_t i = 0; i < 128; ++i)
        for (std::size_t j = i + 1; j <= 128; ++j) {
            const double dx = rp.x.scalar(j) - rp.x.scalar(i);
            brute = std::max(brute,
                             dx * dx / std::pow(rp.grid[j] - rp.grid[i], 2.0 * rp.gamma));
        }
    CHECK(sem == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("sine of an fbm path has a stable second-order remainder") {
    FbmSpec spec;
    spec.H = 0.4;
    spec.n_coarse = 2048;
    spec.refine_factor = 4;
    spec.seed = 29;
    RoughPath fine = fbm_rough_path(spec);
    RoughPath lo = lift_piecewise_linear(fine.x, TimeGrid::uniform(1.0, 512), 0.38);
    RoughPath hi = lift_piecewise_linear(fine.x, TimeGrid::uniform(1.0, 2048), 0.38);
    auto cp_lo = compose_smooth(sin_map(), 1.0, lo);
    auto cp_hi = compose_smooth(sin_map(), 1.0, hi);
    const double sem_lo = cp_lo.remainder_seminorm(2.0 * 0.38, 0, 256);
    const double sem_hi = cp_hi.remainder_seminorm(2.0 * 0.38, 0, 1024);
    CHECK(std::isfinite(sem_hi));
    CHECK(sem_hi < 2.5 * sem_lo + 0.1);
}

TEST_CASE("controlled-path composition closed forms") {
    RoughPath rp = fbm_driver(0.4, 256, 8);
    auto cp = compose_smooth(sin_map(), 1.0, rp);

    SUBCASE("identity leaves the pair unchanged") {
        auto out = compose_controlled(SmoothMap::identity(1), 1.0, cp);
        CHECK(out.z.raw() == cp.z.raw());
        CHECK(out.zeta.raw() == cp.zeta.raw());
    }
    SUBCASE("linear maps act exactly") {
        auto out = compose_controlled(SmoothMap::scalar([](double x) { return 3.0 * x; },
                                                        [](double) { return 3.0; }),
                                      1.0, cp);
        for (std::size_t i = 0; i < rp.grid.size(); i += 13) {
            CHECK(out.z.scalar(i) == doctest::Approx(3.0 * cp.z.scalar(i)).epsilon(1e-15));
            CHECK(out.zeta.scalar(i) == doctest::Approx(3.0 * cp.zeta.scalar(i)).epsilon(1e-15));
        }
    }
    SUBCASE("square of sine follows the chain rule with second-order remainder") {
        auto out = compose_controlled(SmoothMap::scalar([](double x) { return x * x; },
                                                        [](double x) { return 2.0 * x; }),
                                      1.0, cp);
        for (std::size_t i = 0; i < rp.grid.size(); i += 19) {
            const double x = rp.x.scalar(i);
            CHECK(out.z.scalar(i) == doctest::Approx(std::sin(x) * std::sin(x)));
            CHECK(out.zeta.scalar(i) ==
                  doctest::Approx(2.0 * std::sin(x) * std::cos(x)).epsilon(1e-13));
        }
        CHECK(std::isfinite(out.remainder_seminorm(2.0 * rp.gamma, 0, 128)));
    }
}

TEST_CASE("constant integrands integrate exactly at every depth") {
    RoughPath rp = fbm_driver(0.4, 512, 3);
    ControlledPath m;
    m.base = &rp;
    m.n_dim = 1;
    m.eta = 2.0 * rp.gamma;
    m.z = Inc1(rp.grid, 1, std::vector<double>(rp.grid.size(), 2.5));
    m.zeta = Inc1(rp.grid, 1); // zero derivative
    for (int depth : {0, 3, 6}) {
        const double v = compensated_sum(m, rp, 16, 400, depth);
        CHECK(v == doctest::Approx(2.5 * (rp.x.scalar(400) - rp.x.scalar(16))).epsilon(1e-13));
    }
}

TEST_CASE("smooth integrands match Riemann-Stieltjes quadrature") {
    // second-order sums converge like mesh^2 on smooth data, so a fine grid
    // is needed to reach the 1e-8 comparison level
    const std::size_t n = 1 << 16;
    RoughPath rp = smooth_lift(n, 4, 0.9, [](double t) { return std::cos(3.0 * t) - 1.0; });
    auto m = compose_smooth(sin_map(), 1.0, rp);
    auto res = rough_integral(m, rp, 0, n);
    // oracle: int sin(x(u)) x'(u) du = -cos(x(t)) + cos(x(s)) for any path;
    // use the antiderivative for an exact reference
    auto x = [](double t) { return std::cos(3.0 * t) - 1.0; };
    const double exact = -std::cos(x(1.0)) + std::cos(x(0.0));
    CHECK(res.value == doctest::Approx(exact).epsilon(1e-8));
    // trapezoid quadrature agrees as an independent oracle
    const double quad = trapezoid([&](double t) { return std::sin(x(t)) * -3.0 * std::sin(3.0 * t); },
                                  0.0, 1.0, 1 << 16);
    CHECK(res.value == doctest::Approx(quad).epsilon(1e-7));
}

TEST_CASE("integral of x against itself telescopes to the half square") {
    RoughPath rp = fbm_driver(0.4, 2048, 44);
    auto m = compose_smooth(SmoothMap::identity(1), 1.0, rp);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 2048}, {128, 1500}}) {
        auto res = rough_integral(m, rp, i, j);
        const double xs = rp.x.scalar(i), xt = rp.x.scalar(j);
        CHECK(std::abs(res.value - (xt * xt - xs * xs) / 2.0) < 1e-9);
    }
}

TEST_CASE("integral additivity over subintervals") {
    RoughPath rp = fbm_driver(0.38, 2048, 51);
    auto m = compose_smooth(sin_map(), 1.0, rp);
    const std::size_t s = 0, u = 768, t = 2048;
    auto full = rough_integral(m, rp, s, t);
    auto left = rough_integral(m, rp, s, u);
    auto right = rough_integral(m, rp, u, t);
    const double defect = std::abs(full.value - left.value - right.value);
    CHECK(defect <= 2.0 * (full.reported_error + left.reported_error + right.reported_error) +
                        1e-12);
}

TEST_CASE("integral error contracts") {
    CHECK_THROWS_WITH_AS(
        [] {
            RoughPath rp = fbm_driver(0.4, 128, 1);
            ControlledPath m = compose_smooth(SmoothMap::identity(1), 1.0, rp);
            m.eta = 0.5; // eta + gamma <= 1
            rough_integral(m, rp, 0, 128);
        }(),
        doctest::Contains("RegularityBudget"), std::invalid_argument);

    CHECK_THROWS_WITH_AS(
        [] {
            RoughPath rp = fbm_driver(0.4, 4096, 6);
            auto m = compose_smooth(sin_map(), 1.0, rp);
            IntegralOptions opts;
            opts.max_depth = 3; // grid still refinable, Cauchy out of reach
            opts.tol = 1e-14;
            rough_integral(m, rp, 0, 4096, opts);
        }(),
        doctest::Contains("NoConvergence"), std::runtime_error);
}

TEST_CASE("change-of-variable residuals") {
    SUBCASE("linear fields are exact") {
        RoughPath rp = fbm_driver(0.4, 1024, 19);
        auto g = ScalarField::scalar("linear", [](double x) { return 2.0 * x - 1.0; },
                                     [](double) { return 2.0; }, [](double) { return 0.0; });
        auto res = ito_stratonovich_residual(g, rp, 6);
        CHECK(res.sup < 1e-12);
    }
    SUBCASE("the half square is exact for geometric lifts at every depth") {
        RoughPath rp = fbm_driver(0.4, 1024, 23);
        auto g = ScalarField::scalar("quadratic", [](double x) { return 0.5 * x * x; },
                                     [](double x) { return x; }, [](double) { return 1.0; });
        for (int depth : {4, 7, 10}) {
            auto res = ito_stratonovich_residual(g, rp, depth);
            CHECK(res.sup < 1e-11);
        }
    }
    SUBCASE("sine residuals shrink with depth on a rough driver") {
        RoughPath rp = fbm_driver(0.4, 16384, 31);
        auto g = ScalarField::scalar("sin", [](double x) { return std::sin(x); },
                                     [](double x) { return std::cos(x); },
                                     [](double x) { return -std::sin(x); });
        const double sup8 = ito_stratonovich_residual(g, rp, 8).sup;
        const double sup12 = ito_stratonovich_residual(g, rp, 12).sup;
        CHECK(sup12 < sup8);
    }
}

TEST_CASE("integral defect matches the controlled-path data on triples") {
    // delta(I - m dx - mu x2)_{sut} = r_{su} dx_{ut} + (delta mu)_{su} x2_{ut}
    RoughPath rp = smooth_lift(256, 8, 0.9, [](double t) { return std::sin(2.0 * t); });
    auto m = compose_smooth(sin_map(), 1.0, rp);
    const std::size_t probe[4] = {0, 64, 160, 256};
    auto I = [&](std::size_t i, std::size_t j) {
        return compensated_sum(m, rp, i, j, 12); // grid-exact on spans <= 2^12 cells
    };
    for (int a = 0; a < 2; ++a)
        for (int b = a + 1; b < 3; ++b)
            for (int c = b + 1; c < 4; ++c) {
                const std::size_t s = probe[a], u = probe[b], t = probe[c];
                auto D = [&](std::size_t i, std::size_t j) {
                    return I(i, j) - m.z.scalar(i) * (rp.x.scalar(j) - rp.x.scalar(i)) -
                           m.zeta.scalar(i) * chen_extend(rp, i, j)[0];
                };
                const double lhs = D(s, t) - D(s, u) - D(u, t);
                const double r_su = m.remainder(s, u)[0];
                const double dmu = m.zeta.scalar(u) - m.zeta.scalar(s);
                const double rhs = r_su * (rp.x.scalar(t) - rp.x.scalar(u)) +
                                   dmu * chen_extend(rp, u, t)[0];
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
}

TEST_CASE("composition norm bound is stable across instances") {
    // remainder seminorm / (1 + ||x||^{1+lambda}) stays within a fixed factor
    double worst = 0.0, best = 1e300;
    for (std::uint64_t seed : {3u, 14u, 25u}) {
        RoughPath rp = fbm_driver(0.4, 512, seed);
        auto cp = compose_smooth(sin_map(), 1.0, rp);
        const double sem = cp.remainder_seminorm(2.0 * rp.gamma, 0, 256);
        const double xn = holder_seminorm1(rp.x, rp.gamma);
        const double ratio = sem / (1.0 + xn * xn);
        worst = std::max(worst, ratio);
        best = std::min(best, ratio);
    }
    CHECK(worst < 10.0 * best + 1.0);
}
