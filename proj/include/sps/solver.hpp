// Critical-point machinery: preconditioned descent with deflation, the
// disjoint-bump negative subspaces, sampled minimax level bounds, and the
// multi-solution pipeline that strings them together.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sps/energy.hpp"
#include "sps/potentials.hpp"
#include "sps/radial.hpp"

namespace sps {

enum class StepRule { armijo_backtracking };
enum class Preconditioner {
    none,    ///< steepest descent in L^2
    sobolev  ///< descend the H^1 representation: solve (I - Laplacian) g~ = g
};
enum class Termination { converged, iteration_limit, line_search_failure };

struct SolveOptions {
    std::size_t max_iters = 2000;
    double grad_tol = 1e-7;           ///< stop when the raw L^2 residual drops below
    StepRule step_rule = StepRule::armijo_backtracking;
    Preconditioner precondition = Preconditioner::sobolev;
    bool coupling_enabled = true;     ///< false drops the Poisson self-interaction
    double deflation_strength = 1e-3; ///< weight of the repulsion from known solutions
    std::uint64_t seed = 1;           ///< controls randomized seeding in the pipeline
};

struct SolveReport {
    RadialFunction u;
    RadialFunction phi;        ///< self-consistent potential of the terminal u
    double omega = 0.0;
    EnergyBreakdown energy;
    double residual = 0.0;     ///< L^2 norm of the raw gradient (deflation removed)
    std::size_t iters = 0;
    bool converged = false;    ///< residual < grad_tol
    bool below_threshold = false;  ///< energy.total < -omega/2
    bool theorem_regime = true;    ///< omega < 0; other omega are solved but flagged here
    Termination termination = Termination::iteration_limit;
};

/// k-dimensional subspace spanned by dilated annulus bumps with pairwise
/// disjoint supports, on which the quadratic part of the energy is uniformly
/// negative on the unit L^2 sphere:
///   R(v) = int ((1/2)|grad v|^2 - V v^2) dx <= -nu < 0.
struct SubspaceFamily {
    std::vector<RadialFunction> basis;  ///< unit L^2 norm, disjoint supports
    double lambda_bar = 0.0;            ///< common dilation applied to the bumps
    double nu = 0.0;                    ///< uniform negativity margin, > 0
    int k = 0;
};

struct MinimaxEstimate {
    int k = 0;
    double c_k_upper = 0.0;   ///< sampled upper bound for the k-th level
    double threshold = 0.0;   ///< -omega/2
    bool passes = false;      ///< c_k_upper < threshold
    double lambda_used = 0.0; ///< minimizing ray parameter in (0, 1]
    std::size_t samples = 0;
};

/// Thrown when the negativity search cannot succeed on the given grid and
/// potential; carries the potential hypothesis report so callers can tell a
/// decay-hypothesis failure from an undersized grid.
struct SubspaceConstructionError : std::runtime_error {
    SubspaceConstructionError(const std::string& what, HypothesisReport report)
        : std::runtime_error(what), hypotheses(report) {}
    HypothesisReport hypotheses;
};

struct MultiplicityResult {
    std::vector<SolveReport> solutions;     ///< converged, pairwise distinct
    std::vector<std::string> per_k_status;  ///< one status line per subspace level
    bool hypothesis_violated = false;       ///< potential failed (V1)-(V4) checks
    std::string diagnostic;                 ///< human-readable failure summary
};

/// Armijo-backtracking descent on J_omega from u0, optionally preconditioned
/// and optionally repelled from the members of deflation_set by an additive
/// barrier sum_j strength / ||u - u_j||^2 (two phases: barrier-on descent to
/// leave known basins, then a raw polish).  Convergence is certified on the
/// raw residual only; with an empty deflation_set the energy of accepted
/// iterates is non-increasing.  The zero profile is a critical point, so
/// u0 = 0 returns immediately.  Throws std::invalid_argument on non-finite
/// u0 or invalid options.
SolveReport minimize(const RadialFunction& u0, double omega, const Potential& V,
                     const SolveOptions& opts,
                     const std::vector<RadialFunction>& deflation_set = {});

/// Build the k-dimensional disjoint-bump family: bump i lives on the annulus
/// [2^(i-1), 2^i]; each bump is dilated (L^2-preserving, u -> l^{3/2} u(l r))
/// by a halving search until its Rayleigh value R turns negative, then all
/// bumps share the common dilation lambda_bar = safety_factor * min(l_i)
/// (further halved if needed until every R is negative).  nu is the exact
/// negativity margin -max eigenvalue of the k x k Rayleigh matrix.  Throws
/// SubspaceConstructionError when the dilated supports would leave the grid
/// before negativity is reached (undersized grid, or a potential whose
/// r^2 V(r) does not diverge -- the mechanism this construction relies on).
/// omega is carried into error messages only; R does not involve it.
SubspaceFamily build_negative_subspace(int k, const Potential& V, const GridPtr& grid,
                                       double omega, double safety_factor = 0.5);

/// Upper bound for the k-th symmetric minimax level of J_omega: sample the
/// unit L^2 sphere of the family's span, evaluate J_omega(sqrt(lambda) v)
/// through the exact quadratic/quartic ray polynomial, and minimize the
/// sampled supremum over lambda in (0, 1].  The image of the sphere under
/// v -> sqrt(lambda) v is compact, symmetric, avoids 0, and has genus >= k,
/// so the bound is legitimate up to sampling error.  Requires omega < 0 and
/// samples >= 100 k (throws std::invalid_argument otherwise).
MinimaxEstimate estimate_minimax_level(const SubspaceFamily& family, double omega,
                                       const Potential& V, std::size_t samples,
                                       std::uint64_t sample_seed = 202);

/// End-to-end multi-solution search: for k = 1..k_max build the k-bump
/// family, seed descent from its newest ray (scaled to the most negative
/// point of the ray polynomial) plus one random in-span seed per level, and
/// deflate against everything found so far (and the sign-flipped copies --
/// the energy is even, so solutions come in +/- pairs, both reported).
/// Solutions are kept when converged and pairwise L^2-distinct by more than
/// dist_tol.  If the potential fails its hypothesis checks the subspace
/// construction is skipped and plain minimization from a generic bump seed
/// is reported with hypothesis_violated set.  Requires omega < 0.
MultiplicityResult multiplicity_pipeline(int k_max, double omega, const Potential& V,
                                         const GridPtr& grid, const SolveOptions& opts,
                                         double dist_tol = 1e-3);

}  // namespace sps
