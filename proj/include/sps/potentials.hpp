// Catalog of attractive external potentials and executable checkers for the
// structural conditions the solver's guarantees rely on: continuity away from
// the origin, L^{3/2} integrability near 0, decay at infinity, and divergence
// of r^2 V(r).
#pragma once

#include <functional>
#include <string>

#include "sps/radial.hpp"

namespace sps {

/// Qualitative tail behaviour of a potential.
enum class DecayClass { coulomb_like, faster_than_r2, compact_support, other };

/// A radial, non-negative external potential r -> V(r), r > 0.
struct Potential {
    std::function<double(double)> eval;  ///< pointwise values, r > 0
    std::string label;                   ///< human-readable identifier
    double singular_exponent = 0.0;      ///< V ~ r^{-alpha} near 0
    DecayClass decay_class = DecayClass::other;
};

/// Numeric evidence for the four structural conditions, with verdicts.
struct HypothesisReport {
    bool v1_continuous_away_from_0 = false;  ///< sampled finiteness proxy
    double v2_l32_unit_ball = 0.0;           ///< L^{3/2} norm of V on {r <= 1}
    bool v2_finite = false;                  ///< stable under grid doubling
    double v3_tail_sup = 0.0;                ///< sup of V on the far tail
    bool v3_vanishes_at_infinity = false;
    double v4_outer_min_r2v = 0.0;           ///< min of r^2 V on the outer decade
    bool v4_r2v_diverges = false;            ///< grows >= 1.5x when range doubles
};

/// V(r) = Z/r.  Throws std::invalid_argument unless Z > 0.
Potential coulomb(double Z);

/// V(r) = Z r^{-alpha}.  Throws unless Z > 0 and 0 < alpha < 2.
Potential power_law(double Z, double alpha);

/// V(r) = Z e^{-mu r}/r.  Throws unless Z > 0 and mu > 0.  Its r^2 V tail
/// decays, so the divergence condition is expected to fail.
Potential yukawa(double Z, double mu);

/// Evaluate all four condition checkers.  The near-origin integrability value
/// is computed on the supplied grid; the tail checks use internal wide
/// logarithmic grids reaching well beyond grid->r_max, because decay and
/// divergence are asymptotic statements that a bounded computational box
/// cannot witness.
HypothesisReport check_hypotheses(const Potential& V, const GridPtr& grid);

}  // namespace sps
