#pragma once

#include "rough/coefficients.hpp"
#include "rough/rough_path.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace rough {

// ============================================================================
// Solution constructions for dy = sigma(y) dx with power-type sigma:
//  - 1-d integrating-factor solution y = phi^{-1}(x + phi(a));
//  - multi-d second-order one-step scheme with shell-aware adaptive steps and
//    absorbing zero handling.
// ============================================================================

struct SolverParams {
    double gamma = 0.4;
    double kappa = 0.8;
    double c0 = 0.5;              ///< window constant in mesh <= c0 * 2^{-alpha q}
    double step_frac = 1.0 / 16;  ///< actual step cap = step_frac * c0 * 2^{-alpha q}
    double zero_threshold = std::ldexp(1.0, -20);
    std::size_t max_steps = 20'000'000;
    bool auto_halve_c0 = true;    ///< halve c0 and restart when a step skips a shell
    int max_halvings = 6;

    double alpha() const { return (1.0 - kappa) / gamma; }
    void validate() const; ///< requires kappa + gamma > 1 and sane fields
};

struct ShellEntry {
    double lambda = 0.0;  ///< entry into the I-phase
    double tau = std::numeric_limits<double>::quiet_NaN(); ///< I-exit (NaN if never)
    int q = 0;            ///< I-shell index (|y| in [2^{-(q+1)}, 2^{-q}); -1 for |y| >= 1)
    int q_hat = std::numeric_limits<int>::min(); ///< J-shell index after tau
};

struct ShellTrace {
    std::vector<ShellEntry> entries;
    std::optional<double> zero_hit;
    double b1 = 3.0 / 8.0; ///< J-interval is [b1, b2) * 2^{-q_hat}
    double b2 = 3.0 / 4.0;
    std::size_t shell_jumps = 0; ///< exits that overshot more than one shell (grid bias)
    double coverage_end = 0.0;   ///< last time examined (zero hit or end of samples)
};

/// I-shell index of radius r: -1 for r >= 1, else q with 2^{-(q+1)} <= r < 2^{-q}.
int shell_index(double r);

/// Alternating first-exit ladder of |y| through the dyadic I- and J-intervals,
/// exits detected at the first grid point past the boundary. Tracking stops at
/// the zero threshold; exits that overshoot more than one shell (possible on a
/// coarse grid) are counted in shell_jumps and the ladder restarts from the
/// observed shell.
ShellTrace track_shells(std::span<const double> times, std::span<const double> radii,
                        double zero_threshold = 0.0);
ShellTrace track_shells(const Inc1& y, double zero_threshold = 0.0);

struct ShellInvariantReport {
    bool lambda_tau_ordered = true;
    bool q_steps_unit = true;
    bool phase_membership = true;
    bool ok() const { return lambda_tau_ordered && q_steps_unit && phase_membership; }
};

/// Phase-wise membership and ladder checks against the sampled radii.
ShellInvariantReport check_shell_invariants(const ShellTrace& trace,
                                            std::span<const double> times,
                                            std::span<const double> radii);

struct SolutionPath {
    TimeGrid grid;                     ///< adaptive sub-grid (or the driver grid)
    Inc1 y;                            ///< m components
    char case_label = 'A';             ///< 'A' stays off zero, 'B' absorbed at tau
    ShellTrace shells;
    std::vector<std::size_t> base_indices; ///< map into the driver grid
    std::optional<double> tau;         ///< absorption time for case B
    bool zero_companion = false;       ///< a = 0: y == 0 is also a solution
    double c0_used = 0.0;              ///< step-control constant after auto-halving

    std::vector<double> radii() const;
};

enum class LampertiZeroMode { absorb, continue_through };

/// y_t = phi^{-1}(x_t + phi(a)) on the grid of x. With absorb, y is set to 0
/// from the first time the transformed argument reaches 0 (case B); with
/// continue_through the odd extension of phi^{-1} is followed (case A label).
SolutionPath solve_1d_lamperti(const PowerCoefficient& pc, double a, const Inc1& x,
                               LampertiZeroMode mode = LampertiZeroMode::absorb,
                               double zero_threshold = std::ldexp(1.0, -20));

/// Second-order one-step scheme y <- y + sigma(y) dx + (Dsigma.sigma)(y) x2
/// on an adaptive sub-grid with local mesh <= step_frac * c0 * 2^{-alpha q}.
/// Declares case B and continues with y = 0 once |y| < zero_threshold.
/// Throws "StepUnderflow" (with the shell reached) when the required mesh is
/// finer than the driver grid, "MaxSteps" past the step budget.
SolutionPath solve_md_davie(const PowerCoefficient& pc, std::span<const double> a,
                            const RoughPath& rp, const SolverParams& params);

/// Expansion remainder of a solution over all pairs of [lo, hi] (sub-grid
/// indices): R_{st} = delta y - sigma(y_s) dx - (Dsigma.sigma)(y_s) x2 with
/// the second level Chen-extended. The window must not touch the zero region.
Inc2Grid remainder_grid(const SolutionPath& sp, const RoughPath& rp,
                        const PowerCoefficient& pc, std::size_t lo, std::size_t hi);

} // namespace rough
