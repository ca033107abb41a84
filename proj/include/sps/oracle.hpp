// Independent ground truth for cross-checks: closed-form hydrogen-like bound
// states, a direct tridiagonal eigensolver for the linear radial operator
// -(1/2)Laplacian - V, and a double-quadrature Newton-potential integrator
// that shares no code path with the cumulative-sum field solver.
#pragma once

#include <utility>
#include <vector>

#include "sps/potentials.hpp"
#include "sps/radial.hpp"

namespace sps {

/// Lowest eigenpairs of the linear radial operator.
struct LinearSpectrum {
    std::vector<double> eigenvalues;            ///< strictly increasing
    std::vector<RadialFunction> eigenfunctions; ///< unit L2 norm, positive near 0
};

/// Closed-form radial s-state of -(1/2)Laplacian - Z/r: returns the energy
/// -Z^2/(2 n^2) and the normalized state sampled on the grid (n = 1: e^{-Zr}).
/// Throws std::invalid_argument for n < 1 or Z <= 0.
std::pair<double, RadialFunction> hydrogen_eigen(int n, double Z, const GridPtr& grid);

/// Lowest `count` eigenpairs of -(1/2)Laplacian - V(r) on radial functions,
/// via the substitution w = r u which reduces the operator to a 1-D Dirichlet
/// problem: piecewise-linear stiffness plus lumped mass, Sturm-bisection
/// eigenvalues, inverse-iteration eigenvectors.  Throws if count < 1 or
/// count >= grid size.
LinearSpectrum linear_eigensolve(const Potential& V, const GridPtr& grid, int count);

/// Newton potential of the coupled field equation by direct double quadrature:
///   phi(r) = -int rho(s) min(1/r, 1/s) s^2 ds,  rho = 4 pi u^2,
/// with composite Simpson weights built independently of the grid's own
/// quadrature weights.  O(n^2); intended as an oracle, not a production path.
RadialFunction brute_force_phi(const RadialFunction& u);

}  // namespace sps
