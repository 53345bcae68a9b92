#pragma once

#include "rough/increments.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rough {

// ============================================================================
// Geometric rough paths: a path x together with the second-level iterated
// integrals over consecutive grid intervals. Arbitrary-pair second levels are
// assembled on demand through Chen's relation, so storage stays O(n d^2).
// ============================================================================

struct RoughPath {
    TimeGrid grid;
    Inc1 x;                      ///< d components, x_0 = 0
    std::vector<double> x2;      ///< (n-1) consecutive blocks, row-major d x d
    double gamma = 0.0;          ///< declared Hoelder exponent
    int dim = 1;

    std::span<const double> block(std::size_t i) const {
        return {x2.data() + i * std::size_t(dim) * dim, std::size_t(dim) * dim};
    }
    std::span<double> block(std::size_t i) {
        return {x2.data() + i * std::size_t(dim) * dim, std::size_t(dim) * dim};
    }
};

/// Second level over (s_index, t_index) assembled left-to-right via
/// x2_{st} = x2_{su} + x2_{ut} + dx_{su} (x) dx_{ut}.
std::vector<double> chen_extend(const RoughPath& rp, std::size_t s_index, std::size_t t_index);

/// In-place variant writing into out (d*d).
void chen_extend(const RoughPath& rp, std::size_t s_index, std::size_t t_index,
                 std::span<double> out);

/// Exact geometric lift of the piecewise-linear interpolant of `fine`,
/// sampled on `coarse` (which the fine grid must refine).
RoughPath lift_piecewise_linear(const Inc1& fine, const TimeGrid& coarse, double gamma);

struct FbmSpec {
    double H = 0.4;          ///< Hurst index in (1/3, 1/2]
    int dim = 1;
    std::size_t n_coarse = 1024;
    int refine_factor = 8;   ///< >= 4
    std::uint64_t seed = 1;
    double horizon = 1.0;
    double gamma_margin = 0.02; ///< declared gamma = H - margin
    bool force_cholesky = false;
};

/// Exact-in-law fractional Brownian motion on the refined grid (circulant
/// embedding of fractional Gaussian noise, Cholesky fallback), lifted by
/// lift_piecewise_linear. Deterministic in (seed, H, dim, n, refine).
RoughPath fbm_rough_path(const FbmSpec& spec);

/// ||x||_gamma = grid seminorm of x at gamma + grid seminorm of the
/// Chen-extended second level at 2*gamma, over all pairs.
double rough_norm(const RoughPath& rp, double gamma);

struct LiftReport {
    double chen_residual_rel = 0.0; ///< worst Chen defect relative to sup|dx|^2
    double sym_residual_rel = 0.0;  ///< worst symmetry defect relative to sup|dx|^2
    bool x0_zero = true;
    bool pass(double tol = 1e-10) const {
        return x0_zero && chen_residual_rel < tol && sym_residual_rel < tol;
    }
};

/// Chen and geometric-symmetry checks on consecutive blocks plus extended
/// pairs and triples (probe_stride controls the scan density; 0 = auto).
LiftReport validate_rough_path(const RoughPath& rp, std::size_t probe_stride = 0);

struct RoughnessEstimate {
    double gamma_hat = 0.0;            ///< gamma + eps_hat
    double L = 0.0;                    ///< modulus estimate (min over probes)
    std::vector<double> epsilon_grid;
    std::vector<double> per_epsilon;   ///< min over (s, phi) at each epsilon
    std::size_t skipped_windows = 0;   ///< probe windows with no grid point
};

/// Directional small-scale oscillation floor: for each probe s, direction phi
/// and scale eps, the max over eps/2 < |t-s| < eps of |<phi, dx_{st}>| / eps^{gamma_hat};
/// L is the min over probes. d = 1 uses phi = +-1, d >= 2 a 32-point net per
/// coordinate 2-plane.
RoughnessEstimate roughness_modulus(const RoughPath& rp, double gamma, double eps_hat,
                                    std::span<const double> eps_list,
                                    std::size_t probe_stride = 1);

/// Restriction to index range [lo, hi], times shifted to start at 0. By
/// default the path is recentred so x_0 = 0; recentre = false keeps the raw
/// values (bit-identical increments for restart comparisons).
RoughPath restrict_rough_path(const RoughPath& rp, std::size_t lo, std::size_t hi,
                              bool recentre = true);

struct LacunarySpec {
    double exponent = 0.42; ///< Hoelder exponent of the oscillation cascade
    int levels = 16;        ///< finest scale ~ horizon * 2^{-levels}
    double amplitude = 1.0;
    double trend = 0.0;     ///< linear drift rate (negative values descend)
    std::uint32_t phase_salt = 0; ///< deterministic phase table selector
};

/// Deterministic self-similar test driver: a linear trend plus a lacunary
/// cosine cascade sum_j 2^{-j*exponent} cos(2 pi (2^j t / T + theta_j)),
/// recentred so x_0 = 0. Same (grid, spec) always yields the same bytes.
Inc1 lacunary_driver(const TimeGrid& grid, const LacunarySpec& spec);

} // namespace rough
