#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rough {

// ============================================================================
// Power-type coefficient fields. The j-th field is sigma^j(xi) = v_j * s(|xi|)
// with the radial envelope s(r) = c1 * (r^kappa ^ cap), optionally C^2
// mollified at the cap kink. Radial fields with constant directions satisfy
// the power-growth and difference bounds by one-variable calculus, which is
// exactly the regime the solvers need.
// ============================================================================

enum class CapSmoothing { none, mollified };

struct PowerCoefficient {
    double kappa = 0.5;                       ///< exponent in (0,1)
    double c1 = 1.0;                          ///< scale > 0
    double c2 = std::numeric_limits<double>::infinity(); ///< cap on r^kappa (inf = pure power)
    std::vector<std::vector<double>> directions = {{1.0}}; ///< d vectors in R^m
    CapSmoothing smoothing = CapSmoothing::none;
    double moll_rel_width = 1e-3;

    int m() const { return directions.empty() ? 0 : int(directions[0].size()); }
    int d() const { return int(directions.size()); }
    bool capped() const { return std::isfinite(c2); }
    /// Radius where the cap takes over (c2^{1/kappa}), inf when uncapped.
    double cap_radius() const;

    void validate() const;
};

// Radial envelope and its derivatives (one-sided below-cap branch at the
// kink unless mollified).
double envelope(const PowerCoefficient& pc, double r);
double envelope_d1(const PowerCoefficient& pc, double r);
double envelope_d2(const PowerCoefficient& pc, double r);

/// sigma(xi) as m x d matrix (column j = v_j * s(|xi|)).
void sigma_eval(const PowerCoefficient& pc, std::span<const double> xi, std::span<double> out_md);

/// D sigma: out[k + m*(i + m*j)] = d sigma^{i j} / d xi_k, i.e. an m x d x m
/// tensor, row-major over (i, j, k). Throws "OriginDerivative" at xi = 0.
void dsigma_eval(const PowerCoefficient& pc, std::span<const double> xi, std::span<double> out_mdm);

/// Second-order scheme coefficient G^{i;(j1 j)} = sum_k d_k sigma^{i j} sigma^{k j1},
/// contracted against x2^{j1 j}; m x d x d row-major over (i, j1, j).
/// Collapses to the familiar sigma' * sigma when m = d = 1.
void dsigma_sigma_eval(const PowerCoefficient& pc, std::span<const double> xi,
                       std::span<double> out_mdd);

// Scalar fast paths for m = d = 1 (signed argument).
double sigma1(const PowerCoefficient& pc, double y);
double dsigma1(const PowerCoefficient& pc, double y);
double dsigma_sigma1(const PowerCoefficient& pc, double y);

// ----------------------------------------------------------------------------
// Difference-quotient seminorm sup |F(xi2) - F(xi1)| / | |xi2|^a - |xi1|^a |.
// ----------------------------------------------------------------------------

struct SeminormEstimate {
    double alpha = 0.0;
    double value = 0.0;
    std::size_t samples = 0;
};

struct SampleSpec {
    double r_min = 1e-4;
    double r_max = 1e2;      ///< must span >= 6 decades with r_min
    std::size_t n_radii = 400;
    std::size_t n_directions = 16; ///< per radius (ignored for dim 1)
    bool same_ray_only = false;    ///< restrict pairs to a common ray (odd fields)
    std::uint64_t seed = 42;
};

SeminormEstimate seminorm_estimate(
    const std::function<void(std::span<const double>, std::span<double>)>& F,
    int in_dim, int out_dim, double alpha, const SampleSpec& spec);

// ----------------------------------------------------------------------------
// Hypothesis verification report.
// ----------------------------------------------------------------------------

struct HypothesisCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;     ///< worst sampled ratio / residual
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    bool all_pass() const;
    const HypothesisCheck* find(const std::string& name) const;
};

/// Samples the power-growth and difference bounds the solvers rely on:
/// kappa+gamma > 1, sigma(0) = 0, the alpha-difference bound for sigma
/// (alpha = kappa) and for Dsigma.sigma on rays (alpha = 2*kappa - 1), the
/// interpolated difference bound at eta in {0, (1-alpha)/2, 1-alpha}, the
/// derivative envelopes |Dsigma| ~ r^{kappa-1}, |D2sigma| ~ r^{kappa-2},
/// the 1-d transform-composition bound, and the lower envelope when uncapped.
HypothesisReport verify_hypotheses(const PowerCoefficient& pc, double gamma);

// ----------------------------------------------------------------------------
// 1-d integrating-factor transform phi(xi) = int_0^xi ds / sigma(s), extended
// oddly to xi < 0, with exact piecewise closed forms and inverse.
// ----------------------------------------------------------------------------

double lamperti_phi(const PowerCoefficient& pc, double xi);
double lamperti_phi_inverse(const PowerCoefficient& pc, double u);

} // namespace rough
