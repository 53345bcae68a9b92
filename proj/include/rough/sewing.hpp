#pragma once

#include "rough/increments.hpp"

#include <functional>
#include <vector>

namespace rough {

struct SewingResult {
    Inc2Grid lambda_h;     ///< g with delta g = h on the grid, zero on consecutive pairs
    double mu = 0.0;
    double bound_constant = 0.0; ///< 1 / (2^mu - 2)
    double norm_h = 0.0;         ///< grid seminorm of h at level mu
    double norm_lambda = 0.0;    ///< grid seminorm of lambda_h at level mu

    bool bound_satisfied(double slack = 0.05) const {
        return norm_lambda <= bound_constant * norm_h * (1.0 + slack);
    }
};

struct SewOptions {
    double closedness_tol = 1e-10; ///< absolute tolerance on delta h over quadruples
    bool check_closedness = true;
    bool compute_norms = true; ///< fill norm_h / norm_lambda (O(n^3) on large grids)
    std::size_t max_closedness_quadruples = 30'000'000; // exhaustive below, sampled above
};

/// Inverse of delta on closed three-index increments, mu > 1. The unique g
/// with delta g = h that vanishes on consecutive pairs, built by midpoint
/// insertion from the finest level upward. Throws "MuTooSmall" for mu <= 1
/// and "NotClosed" when delta h exceeds the tolerance. Requires a uniform
/// dyadic grid.
SewingResult sew(const Inc3Grid& h, double mu, const SewOptions& opts = {});

/// Per-pair dyadic fan-in evaluation of the sewing map for a callable
/// h(i, u, j) on index triples of `grid`: sums h over the aligned dyadic
/// triples of [i, j] down to grid scale. Equivalent to sew(...).lambda_h on
/// the requested pairs without storing O(n^3) entries.
double sew_pair(const std::function<double(std::size_t, std::size_t, std::size_t)>& h,
                std::size_t i, std::size_t j);

struct DiscreteSewingCheck {
    double lhs = 0.0;  ///< grid norm of R at level mu
    double rhs = 0.0;  ///< K_mu times grid norm of delta R at level mu
    double k_mu = 0.0;
    bool pass = false;
};

/// Discrete sewing inequality ||R||_mu <= K_mu ||delta R||_mu for R vanishing
/// on consecutive pairs. Throws "NotInC2Pi" when a consecutive entry is
/// nonzero and "MuTooSmall" for mu <= 1.
DiscreteSewingCheck discrete_sewing_check(const Inc2Grid& R, double mu);

/// K_mu = 2^mu * zeta(mu), mu > 1, to better than 1e-8 relative.
double k_mu(double mu);

} // namespace rough
