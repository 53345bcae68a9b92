#pragma once

#include "rough/controlled.hpp"
#include "rough/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rough {

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

OlsFit ols_fit(std::span<const double> xs, std::span<const double> ys);

// ----------------------------------------------------------------------------
// Per-shell regularity scaling. For each ladder entry with q in [q_min, q_max]
// take the largest window [lambda_k, lambda_k + c0 * 2^{-alpha q_k}] inside
// [lambda_k, lambda_{k+1}) and record the local seminorms of y (level gamma),
// of the expansion remainder R (level 3*gamma) and of r = (Dsigma.sigma) x2 + R
// (level gamma); then regress log2(seminorm) on q.
// ----------------------------------------------------------------------------

struct ShellWindowRecord {
    std::size_t k = 0;
    int q = 0;
    double window_lo = 0.0, window_hi = 0.0;
    std::size_t points = 0;
    double n_y = 0.0;    ///< gamma-level seminorm of y on the window
    double n_R = 0.0;    ///< 3*gamma-level seminorm of R
    double n_r = 0.0;    ///< gamma-level seminorm of r
    double n_r_levy = 0.0; ///< gamma-level seminorm of the (Dsigma.sigma) x2 part
    double n_r_rem = 0.0;  ///< gamma-level seminorm of the R part
};

struct RegularityReport {
    std::vector<ShellWindowRecord> records;
    OlsFit y_fit, R_fit, r_fit;
    double target_y = 0.0;   ///< -kappa
    double target_R = 0.0;   ///< 2 - 3*kappa
    double target_r = 0.0;   ///< -(kappa + 2*eps1*alpha)
    double eps1 = 0.0, eps2 = 0.0;
    double fitted_c1 = 0.0, fitted_c2 = 0.0, fitted_c3 = 0.0; ///< 2^intercept stand-ins
};

struct StudyOptions {
    double eps1 = 0.05;
    std::optional<double> eps2;   ///< default 0.9 * min(kappa/(1-gamma), eps1*alpha/(gamma+eps1))
    int q_min = 3;
    int q_max = 12;
    std::size_t max_window_points = 64;
    std::size_t min_shells = 5;
};

/// Throws "InsufficientShells" when fewer than min_shells qualifying windows
/// exist, and rejects (eps1, eps2) violating
/// eps2 < min(kappa/(1-gamma), eps1*alpha/(gamma+eps1)).
RegularityReport scaling_study(const SolutionPath& sp, const RoughPath& rp,
                               const PowerCoefficient& pc, double gamma,
                               const StudyOptions& opts = {});

// ----------------------------------------------------------------------------
// Stopping-time gaps: fit log2(lambda_{k+1} - lambda_k) against q_k and
// compare with the reference band [-alpha, -(alpha - eps2)].
// ----------------------------------------------------------------------------

struct GapReport {
    std::vector<int> qs;
    std::vector<double> gaps;
    OlsFit fit;
    double alpha = 0.0;
    double eps2 = 0.0;
    double band_lo(double tol) const { return -alpha - tol; }
    double band_hi(double tol) const { return -(alpha - eps2) + tol; }
    bool in_band(double tol) const {
        return fit.slope >= band_lo(tol) && fit.slope <= band_hi(tol);
    }
};

/// Throws "InsufficientShells" with fewer than min_gaps closed gaps at q >= q_min.
GapReport gap_study(const ShellTrace& shells, const SolverParams& params, double eps2,
                    int q_min = 3, std::size_t min_gaps = 5);

// ----------------------------------------------------------------------------
// Global Hoelder seminorm of a solution across the whole horizon (including
// the absorbed zero region); subsampled to at most max_points.
// ----------------------------------------------------------------------------

double global_holder_seminorm(const SolutionPath& sp, double gamma,
                              std::size_t max_points = 4096);

struct GlobalHolderReport {
    double seminorm_coarse = 0.0;
    double seminorm_fine = 0.0;
    double growth = 0.0;
    bool pass = false; ///< finite and growth < 2
};

GlobalHolderReport global_holder_refinement(double seminorm_coarse, double seminorm_fine);

// ----------------------------------------------------------------------------
// Change-of-variable residual decay across dyadic depths.
// ----------------------------------------------------------------------------

struct ItoStudyRow {
    std::string field;
    int depth = 0;
    double sup_residual = 0.0;
};

struct ItoStudy {
    std::vector<ItoStudyRow> rows;
    std::vector<std::pair<std::string, OlsFit>> orders; ///< fitted decay order per field
};

ItoStudy ito_stratonovich_study(const RoughPath& rp, std::span<const ScalarField> fields,
                                std::span<const int> depths, std::size_t max_probe_points = 64);

// ----------------------------------------------------------------------------
// Scheme self-convergence against a fine reference on a common driver.
// ----------------------------------------------------------------------------

struct ConvergenceReport {
    std::vector<std::size_t> levels;  ///< coarse interval counts
    std::vector<double> errors;       ///< sup distance to the reference at shared times
    OlsFit order;                     ///< slope of log2(error) vs log2(mesh)
};

/// Solves on lifts of the same fine path at each coarse resolution and
/// compares with the reference solution on the finest level.
ConvergenceReport self_convergence_study(const PowerCoefficient& pc,
                                         std::span<const double> a,
                                         const Inc1& fine_path, double gamma,
                                         std::span<const std::size_t> coarse_levels,
                                         std::size_t reference_level,
                                         const SolverParams& params);

} // namespace rough
