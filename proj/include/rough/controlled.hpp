#pragma once

#include "rough/rough_path.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rough {

/// Smooth map R^in -> R^out with first derivative, supplied analytically.
struct SmoothMap {
    int in_dim = 1;
    int out_dim = 1;
    std::function<void(std::span<const double>, std::span<double>)> value;
    /// Row-major Jacobian, out_dim x in_dim.
    std::function<void(std::span<const double>, std::span<double>)> jacobian;

    static SmoothMap scalar(std::function<double(double)> f, std::function<double(double)> df);
    static SmoothMap identity(int dim);
};

/// Scalar field with gradient and Hessian (for change-of-variable checks).
struct ScalarField {
    int dim = 1;
    std::string name;
    std::function<double(std::span<const double>)> value;
    std::function<void(std::span<const double>, std::span<double>)> grad;
    std::function<void(std::span<const double>, std::span<double>)> hess; // row-major dim x dim

    static ScalarField scalar(std::string name, std::function<double(double)> f,
                              std::function<double(double)> df,
                              std::function<double(double)> d2f);
};

// ============================================================================
// Paths weakly controlled by a rough path: delta z = zeta delta x + r with the
// remainder r one level more regular than x. zeta is the first-order
// sensitivity of z to x.
// ============================================================================

struct ControlledPath {
    const RoughPath* base = nullptr;
    Inc1 z;      ///< n components
    Inc1 zeta;   ///< n x d per point, row-major
    double eta = 0.0; ///< remainder order, > gamma of base
    int n_dim = 1;

    /// r_{st} = delta z - zeta_s delta x (component-wise).
    std::vector<double> remainder(std::size_t i, std::size_t j) const;
    /// sup over pairs in [lo, hi] of |r_{st}| / (t-s)^level.
    double remainder_seminorm(double level, std::size_t lo, std::size_t hi) const;
};

/// z = f(x), zeta = Df(x), remainder order gamma*(1+lambda) for f in
/// Lip^{1+lambda}.
ControlledPath compose_smooth(const SmoothMap& f, double lambda, const RoughPath& rp);

/// w = g(z) for a controlled z; derivative by the chain rule Dg(z) * zeta.
ControlledPath compose_controlled(const SmoothMap& g, double lambda, const ControlledPath& cp);

struct IntegralOptions {
    double tol = 1e-9;       ///< Cauchy tolerance, scaled by the data size
    int max_depth = 18;
    int min_depth = 2;
};

struct IntegralResult {
    double value = 0.0;
    double reported_error = 0.0;
    int depth = 0;
    bool grid_exact = false; ///< refinement reached the grid itself
};

/// Compensated Riemann sum of <m, dx> at one dyadic depth over [i, j]:
/// sum of m_{t_q} . dx_{t_q t_{q+1}} + mu_{t_q} : x2_{t_q t_{q+1}} with the
/// second level Chen-extended over each cell.
double compensated_sum(const ControlledPath& m, const RoughPath& rp,
                       std::size_t i, std::size_t j, int depth);

/// The rough integral of a controlled integrand (values in R^d) against its
/// base path: dyadic compensated sums refined until Cauchy at tol, or until
/// the grid is fully resolved (then the sum is grid-exact). Requires
/// eta + gamma > 1 ("RegularityBudget"); throws "NoConvergence" when
/// max_depth is reached with the grid still refinable.
IntegralResult rough_integral(const ControlledPath& m, const RoughPath& rp,
                              std::size_t i, std::size_t j,
                              const IntegralOptions& opts = {});

struct ItoStratResidual {
    std::vector<std::size_t> probe;             ///< probe sub-grid indices
    std::vector<double> residual;               ///< one per probe pair (i<j), row-major over pairs
    double sup = 0.0;
    std::size_t pair_count = 0;
    double residual_at(std::size_t a, std::size_t b) const; // probe-local indices
};

/// residual_{st} = g(x_t) - g(x_s) - I_{st}(grad g(x) dx) at the given dyadic
/// depth, on all pairs of a probe sub-grid (at most max_probe_points points).
ItoStratResidual ito_stratonovich_residual(const ScalarField& g, const RoughPath& rp,
                                           int depth, std::size_t max_probe_points = 64);

} // namespace rough
