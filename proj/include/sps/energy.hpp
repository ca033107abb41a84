// The reduced energy functional on radial profiles, its term-by-term
// breakdown, the two-field energy it descends from, the Euler-Lagrange
// residual, and the quadratic/quartic ray decomposition driving the
// coercivity and level estimates.
#pragma once

#include "sps/potentials.hpp"
#include "sps/radial.hpp"

namespace sps {

/// Term-by-term value of the reduced functional
///   J_omega(u) = (1/4)||grad u||^2 + pi ||grad psi||^2
///                - (1/2) int V u^2 - (omega/2) int u^2,
/// where psi solves Laplacian(psi) = u^2 with decay at infinity.
struct EnergyBreakdown {
    double kinetic = 0.0;           ///< (1/4) int |grad u|^2 dx, >= 0
    double self_interaction = 0.0;  ///< pi * int |grad psi|^2 dx, >= 0
    double potential = 0.0;         ///< -(1/2) int V u^2 dx
    double mass = 0.0;              ///< -(omega/2) int u^2 dx, >= 0 for omega < 0
    double total = 0.0;             ///< sum of the four terms
};

/// Coefficients of the exact ray polynomial
///   J_omega(lambda * u) = (a - c + d) lambda^2 + b lambda^4
/// for a unit-H^1 direction u (normalized internally).  For such u the
/// coefficients satisfy a in [0, 1/4], b > 0 (u != 0), c >= 0 for V >= 0,
/// and d in [0, -omega/2] when omega < 0; since b > 0 the energy grows
/// without bound along every ray, which is the coercivity mechanism.
struct RayDecomposition {
    double a = 0.0;  ///< (1/4) int |grad u|^2 dx of the normalized direction
    double b = 0.0;  ///< pi * int |grad psi|^2 dx (quartic self-interaction)
    double c = 0.0;  ///< (1/2) int V u^2 dx
    double d = 0.0;  ///< -(omega/2) int u^2 dx
};

/// Evaluate J_omega(u) term by term.  The kinetic term integrates |grad u|^2
/// as the Dirichlet form of the piecewise-linear interpolant of w = r u with
/// a virtual node w(0) = 0, so that its exact gradient is the classical
/// tridiagonal radial Laplacian.  The self-interaction term is computed from
/// the Poisson solve for psi = inverse-Laplacian(u^2) through the source
/// pairing -int psi u^2 dx, which equals the full-space Dirichlet energy of
/// psi exactly at the discrete level.  With coupling_enabled = false the
/// self-interaction term is skipped (pure linear functional, used for
/// validation against eigenvalue oracles).
EnergyBreakdown j_energy(const RadialFunction& u, double omega, const Potential& V,
                         bool coupling_enabled = true);

/// The two-field energy
///   F_omega(u, phi) = (1/4)||grad u||^2 - (1/2) int phi u^2
///                     - (1/16 pi)||grad phi||^2 - (1/2) int V u^2
///                     - (omega/2) int u^2
/// for an arbitrary potential profile phi on the same grid as u.  The phi
/// Dirichlet term is evaluated by pairing phi against its own recovered
/// source (the discrete Laplacian that inverts solve_poisson), which makes
/// the reduction identity F_omega(u, self_consistent_phi(u)) = J_omega(u)
/// hold to rounding rather than to discretization error.  Throws
/// std::invalid_argument if u and phi live on different grids.
double f_energy(const RadialFunction& u, const RadialFunction& phi, double omega,
                const Potential& V);

/// L^2 representation of the derivative of J_omega at u:
///   g = -(1/2) Laplacian(u) - phi u - V u - omega u,  phi = 4 pi psi,
/// with the radial Laplacian (1/r^2)(r^2 u')' realized as the exact gradient
/// of the kinetic quadratic form (tridiagonal in w = r u).  Directional
/// derivatives inner_product(g, v) therefore match finite differences of
/// j_energy to rounding, and the same vector is a pointwise second-order
/// discretization of the strong form above, boundary nodes included.  A
/// critical point of J_omega has lp_norm(g, 2) ~ 0.
RadialFunction j_gradient(const RadialFunction& u, double omega, const Potential& V,
                          bool coupling_enabled = true);

/// Normalize u to unit H^1 norm (int |grad u|^2 + u^2 dx = 1) and return the
/// ray coefficients.  Throws std::invalid_argument when u is identically 0.
RayDecomposition ray_decomposition(const RadialFunction& u, double omega,
                                   const Potential& V);

}  // namespace sps
