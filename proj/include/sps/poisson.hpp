// Radial Newton-potential solver: phi with Laplacian(phi) = rho on R^3 and
// phi -> 0 at infinity, via the explicit Green formula
//   phi(r) = -(1/r) * int_0^r rho(s) s^2 ds  -  int_r^inf rho(s) s ds,
// realized with the grid's cumulative trapezoid panels so the discrete map is
// exactly invertible (see recover_source).
#pragma once

#include "sps/radial.hpp"

namespace sps {

/// Result of a field solve.
struct PoissonSolution {
    RadialFunction phi;     ///< the potential, non-positive for rho >= 0
    double dirichlet = 0.0; ///< full-space int |grad phi|^2 dx, computed as the
                            ///< pairing -int phi rho dx (exact integration by
                            ///< parts; includes the monopole tail beyond r_max)
    double source_l1 = 0.0; ///< int |rho| dx
    double source_lr = 0.0; ///< L^2 norm of rho (reference exponent 2)
};

/// Solve Laplacian(phi) = rho with zero-extension of rho beyond r_max.
/// Throws std::invalid_argument on non-finite source values.
PoissonSolution solve_poisson(const RadialFunction& rho);

/// The coupled field of a wave profile u: solve_poisson(4*pi*u^2).
PoissonSolution self_consistent_phi(const RadialFunction& u);

/// Exact discrete inverse of the Green map: recover_source(solve_poisson(rho).phi)
/// reproduces rho to rounding on any grid spacing.  Note the rounding floor is
/// amplified by ~|phi|/h_local^2 (intrinsic to discrete Laplacians), which
/// matters only at strongly clustered inner nodes of logarithmic grids.
RadialFunction recover_source(const RadialFunction& phi);

/// Empirical constant for the source-to-field energy bound:
/// dirichlet / (source_l1^2 + source_lr^2) with the L^r exponent r_exp.
/// Requires 6/5 < r_exp <= 2; returns 0 for rho identically zero.
double source_ratio(const RadialFunction& rho, double r_exp);

}  // namespace sps
