#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rough/coefficients.hpp"

#include <cmath>
#include <random>

using namespace rough;

namespace {

PowerCoefficient pure_power(double kappa, double c1 = 1.0) {
    PowerCoefficient pc;
    pc.kappa = kappa;
    pc.c1 = c1;
    return pc;
}

} // namespace

TEST_CASE("validation guards") {
    CHECK_THROWS(pure_power(0.0).validate());
    CHECK_THROWS(pure_power(1.0).validate());
    PowerCoefficient bad = pure_power(0.5);
    bad.directions = {{0.0}};
    CHECK_THROWS(bad.validate());
    PowerCoefficient moll = pure_power(0.5);
    moll.smoothing = CapSmoothing::mollified; // needs a finite cap
    CHECK_THROWS(moll.validate());
}

TEST_CASE("hand-calculus values at kappa = 1/2") {
    PowerCoefficient pc = pure_power(0.5);
    CHECK(sigma1(pc, 4.0) == doctest::Approx(2.0));
    CHECK(dsigma1(pc, 4.0) == doctest::Approx(0.25));
    CHECK(dsigma_sigma1(pc, 4.0) == doctest::Approx(0.5));

    std::vector<double> xi = {4.0}, s(1), ds(1), dss(1);
    sigma_eval(pc, xi, s);
    CHECK(s[0] == doctest::Approx(2.0));
    dsigma_eval(pc, xi, ds);
    CHECK(ds[0] == doctest::Approx(0.25));
    dsigma_sigma_eval(pc, xi, dss);
    CHECK(dss[0] == doctest::Approx(0.5));
}

TEST_CASE("sigma vanishes at the origin, derivatives are rejected there") {
    PowerCoefficient pc = pure_power(0.7);
    std::vector<double> zero = {0.0}, out(1);
    sigma_eval(pc, zero, out);
    CHECK(out[0] == 0.0);
    CHECK_THROWS_WITH_AS(dsigma_eval(pc, zero, out), doctest::Contains("OriginDerivative"),
                         std::domain_error);
    CHECK_THROWS_WITH_AS(dsigma_sigma_eval(pc, zero, out), doctest::Contains("OriginDerivative"),
                         std::domain_error);
}

TEST_CASE("power envelope is exact: |Ds| r^{1-k} constant below the cap") {
    PowerCoefficient pc = pure_power(0.8, 2.0);
    pc.c2 = 3.0;
    const double rc = pc.cap_radius();
    double ref = -1.0;
    for (double r = 1e-5; r < 0.9 * rc; r *= 3.7) {
        const double v = std::abs(dsigma1(pc, r)) * std::pow(r, 1.0 - pc.kappa);
        if (ref < 0) ref = v;
        CHECK(v == doctest::Approx(ref).epsilon(1e-12));
    }
    // above the cap the field is constant
    CHECK(sigma1(pc, 2.0 * rc) == doctest::Approx(pc.c1 * pc.c2));
    CHECK(dsigma1(pc, 2.0 * rc) == 0.0);
}

TEST_CASE("mollified cap is C^2 across the kink") {
    PowerCoefficient pc = pure_power(0.6);
    pc.c2 = 1.0;
    pc.smoothing = CapSmoothing::mollified;
    const double rc = pc.cap_radius();
    const double w = pc.moll_rel_width * rc;
    const double lo = rc - w, hi = rc + w;

    // derivative checks strictly inside the blend zone (the finite-difference
    // stencil must not straddle the C^2 seams)
    const double h1 = 1e-7, h2 = 1e-6;
    for (int k = 1; k < 8; ++k) {
        const double r = lo + (hi - lo) * double(k) / 8.0;
        const double fd1 = (envelope(pc, r + h1) - envelope(pc, r - h1)) / (2.0 * h1);
        CHECK(envelope_d1(pc, r) == doctest::Approx(fd1).epsilon(1e-5));
        const double fd2 =
            (envelope(pc, r + h2) - 2.0 * envelope(pc, r) + envelope(pc, r - h2)) / (h2 * h2);
        CHECK(envelope_d2(pc, r) == doctest::Approx(fd2).epsilon(2e-3));
    }
    // the blend meets the outer branches with matching value and derivatives
    const double eps = 1e-12;
    CHECK(envelope(pc, lo + eps) == doctest::Approx(pc.c1 * std::pow(lo, pc.kappa)).epsilon(1e-10));
    CHECK(envelope(pc, hi - eps) == doctest::Approx(pc.c1 * pc.c2).epsilon(1e-10));
    CHECK(envelope_d1(pc, lo + eps) ==
          doctest::Approx(pc.c1 * pc.kappa * std::pow(lo, pc.kappa - 1.0)).epsilon(1e-6));
    CHECK(envelope_d1(pc, hi - eps) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(envelope_d2(pc, lo + eps) ==
          doctest::Approx(pc.c1 * pc.kappa * (pc.kappa - 1.0) * std::pow(lo, pc.kappa - 2.0))
              .epsilon(1e-4));
    CHECK(std::abs(envelope_d2(pc, hi - eps)) < 1e-4);
}

TEST_CASE("difference-quotient seminorm closed cases") {
    SampleSpec spec;
    SUBCASE("F = |xi|^alpha has unit seminorm") {
        const double alpha = 0.45;
        auto F = [alpha](std::span<const double> xi, std::span<double> out) {
            out[0] = std::pow(std::abs(xi[0]), alpha);
        };
        auto est = seminorm_estimate(F, 1, 1, alpha, spec);
        CHECK(est.value == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("sigma with c1 = 2 has seminorm 2 at alpha = kappa") {
        PowerCoefficient pc = pure_power(0.65, 2.0);
        auto F = [&](std::span<const double> xi, std::span<double> out) {
            sigma_eval(pc, xi, out);
        };
        auto est = seminorm_estimate(F, 1, 1, pc.kappa, spec);
        CHECK(est.value == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("Dsigma.sigma on rays at alpha = 2k-1 is c1^2 kappa, stable") {
        PowerCoefficient pc = pure_power(0.8);
        auto F = [&](std::span<const double> xi, std::span<double> out) {
            out[0] = dsigma_sigma1(pc, xi[0]);
        };
        SampleSpec ray = spec;
        ray.same_ray_only = true;
        auto est = seminorm_estimate(F, 1, 1, 2.0 * pc.kappa - 1.0, ray);
        CHECK(est.value == doctest::Approx(pc.kappa).epsilon(1e-9));
        ray.n_radii = 200;
        auto est2 = seminorm_estimate(F, 1, 1, 2.0 * pc.kappa - 1.0, ray);
        CHECK(est2.value == doctest::Approx(est.value).epsilon(1e-8));
    }
    SUBCASE("degenerate sampling is rejected") {
        auto F = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
        SampleSpec bad = spec;
        bad.n_radii = 1;
        CHECK_THROWS(seminorm_estimate(F, 1, 1, 0.5, bad));
        SampleSpec narrow = spec;
        narrow.r_min = 0.1;
        narrow.r_max = 1.0; // far less than six decades
        CHECK_THROWS(seminorm_estimate(F, 1, 1, 0.5, narrow));
    }
}

TEST_CASE("hypothesis report for the canonical configuration") {
    PowerCoefficient pc = pure_power(0.8);
    auto rep = verify_hypotheses(pc, 0.4);
    CHECK(rep.all_pass());
    CHECK(rep.find("kappa_plus_gamma") != nullptr);
    CHECK(rep.find("alpha_bound_sigma")->pass);
    CHECK(rep.find("positive_envelope")->pass);
}

TEST_CASE("kappa + gamma failure is flagged by name") {
    PowerCoefficient pc = pure_power(0.3);
    auto rep = verify_hypotheses(pc, 0.4);
    CHECK_FALSE(rep.all_pass());
    const auto* chk = rep.find("kappa_plus_gamma");
    REQUIRE(chk != nullptr);
    CHECK_FALSE(chk->pass);
    // every other sampled bound still holds for a pure power
    for (const auto& c : rep.checks)
        if (c.name != "kappa_plus_gamma") CHECK(c.pass);
}

TEST_CASE("interpolated bound at eta = 0 matches the base bound verdict") {
    PowerCoefficient pc = pure_power(0.8);
    auto rep = verify_hypotheses(pc, 0.4);
    CHECK(rep.find("alpha_bound_sigma")->pass == rep.find("interp_sigma")->pass);
    CHECK(rep.find("alpha_bound_dss")->pass == rep.find("interp_dss")->pass);
}

TEST_CASE("integrating-factor transform closed forms at kappa = 1/2") {
    PowerCoefficient pc = pure_power(0.5);
    CHECK(lamperti_phi(pc, 4.0) == doctest::Approx(4.0));
    CHECK(lamperti_phi(pc, 0.0) == 0.0);
    CHECK(lamperti_phi_inverse(pc, 4.0) == doctest::Approx(4.0));
    for (double xi = 1e-6; xi < 1e6; xi *= 9.7) {
        CHECK(lamperti_phi(pc, xi) == doctest::Approx(2.0 * std::sqrt(xi)).epsilon(1e-13));
        const double round = lamperti_phi(pc, lamperti_phi_inverse(pc, xi));
        CHECK(std::abs(round - xi) <= 1e-12 * std::max(1.0, xi));
    }
    // odd extension
    CHECK(lamperti_phi(pc, -4.0) == doctest::Approx(-4.0));
    CHECK(lamperti_phi_inverse(pc, -4.0) == doctest::Approx(-4.0));
}

TEST_CASE("transform round-trip with a finite cap") {
    PowerCoefficient pc = pure_power(0.7, 1.4);
    pc.c2 = 2.0;
    for (double xi = 1e-5; xi < 1e4; xi *= 7.3) {
        const double round = lamperti_phi_inverse(pc, lamperti_phi(pc, xi));
        CHECK(std::abs(round - xi) <= 1e-12 * std::max(1.0, xi));
    }
    // continuity across the cap radius
    const double rc = pc.cap_radius();
    CHECK(lamperti_phi(pc, rc * (1.0 + 1e-12)) ==
          doctest::Approx(lamperti_phi(pc, rc * (1.0 - 1e-12))).epsilon(1e-9));
}

TEST_CASE("translated transform solves the autonomous flow") {
    // psi(u) = phi^{-1}(u + phi(a)) must satisfy psi' = sigma(psi) and
    // psi'' = (Dsigma.sigma)(psi)
    for (double kappa : {0.5, 0.8}) {
        PowerCoefficient pc = pure_power(kappa);
        const double a = 0.7;
        const double phi_a = lamperti_phi(pc, a);
        auto psi = [&](double u) { return lamperti_phi_inverse(pc, u + phi_a); };
        for (double u : {-0.3, 0.0, 0.4, 1.1, 2.5}) {
            const double h1 = 1e-6;
            const double d1 = (psi(u + h1) - psi(u - h1)) / (2.0 * h1);
            CHECK(std::abs(d1 - sigma1(pc, psi(u))) <= 1e-8 * std::max(1.0, std::abs(d1)));
            const double h2 = 1e-4;
            const double d2 = (psi(u + h2) - 2.0 * psi(u) + psi(u - h2)) / (h2 * h2);
            CHECK(std::abs(d2 - dsigma_sigma1(pc, psi(u))) <=
                  1e-6 * std::max(1.0, std::abs(d2)));
        }
    }
}

TEST_CASE("difference bound holds over 1e5 random pairs") {
    PowerCoefficient pc = pure_power(0.8, 1.3);
    std::mt19937_64 rng(555);
    auto rad = [&] {
        return std::exp(std::uniform_real_distribution<double>(std::log(1e-4), std::log(1e3))(rng));
    };
    double worst_sigma = 0.0, worst_dss = 0.0;
    for (int k = 0; k < 100'000; ++k) {
        const double r1 = rad(), r2 = rad();
        if (r1 == r2) continue;
        const double den_s = std::abs(std::pow(r2, pc.kappa) - std::pow(r1, pc.kappa));
        if (den_s > 0.0)
            worst_sigma = std::max(
                worst_sigma, std::abs(sigma1(pc, r2) - sigma1(pc, r1)) / den_s);
        const double a2 = 2.0 * pc.kappa - 1.0;
        const double den_d = std::abs(std::pow(r2, a2) - std::pow(r1, a2));
        if (den_d > 0.0)
            worst_dss = std::max(
                worst_dss, std::abs(dsigma_sigma1(pc, r2) - dsigma_sigma1(pc, r1)) / den_d);
    }
    CHECK(worst_sigma <= pc.c1 * (1.0 + 1e-9));
    CHECK(worst_dss <= pc.c1 * pc.c1 * pc.kappa * (1.0 + 1e-9));
}

TEST_CASE("radial fields in two dimensions") {
    PowerCoefficient pc;
    pc.kappa = 0.8;
    pc.c1 = 1.0;
    pc.directions = {{1.0, 0.0}, {0.0, 1.0}}; // m = 2, d = 2
    pc.validate();
    std::vector<double> xi = {0.6, -0.8}; // radius 1
    std::vector<double> s(4), dss(8);
    sigma_eval(pc, xi, s);
    CHECK(s[0] == doctest::Approx(1.0)); // sigma^{11} = v_1^1 * s(1)
    CHECK(s[1] == doctest::Approx(0.0));
    CHECK(s[2] == doctest::Approx(0.0));
    CHECK(s[3] == doctest::Approx(1.0));
    dsigma_sigma_eval(pc, xi, dss);
    // G^{i;(j1 j)} = s' s (v_{j1} . xi/r) v_j^i at r = 1
    const double sp = pc.kappa; // s'(1) = kappa, s(1) = 1
    CHECK(dss[(0 * 2 + 0) * 2 + 0] == doctest::Approx(sp * 0.6));
    CHECK(dss[(0 * 2 + 1) * 2 + 0] == doctest::Approx(sp * -0.8));
    CHECK(dss[(1 * 2 + 0) * 2 + 1] == doctest::Approx(sp * 0.6));
    CHECK(dss[(1 * 2 + 1) * 2 + 1] == doctest::Approx(sp * -0.8));
}
