#include "sps/potentials.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sps {

namespace {

std::string format_label(const char* name, double a, const char* bname = nullptr,
                         double b = 0.0) {
    std::ostringstream os;
    os << name << "(Z=" << a;
    if (bname) os << "," << bname << "=" << b;
    os << ")";
    return os.str();
}

// Sup of V over the outermost 10% of a grid's nodes.
double tail_sup(const Potential& V, const RadialGrid& g) {
    const std::size_t n = g.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 10);
    double sup = 0.0;
    for (std::size_t i = start; i < n; ++i) sup = std::max(sup, V.eval(g.nodes[i]));
    return sup;
}

// Min of r^2 V(r) over the outermost 10% of a grid's nodes.
double outer_min_r2v(const Potential& V, const RadialGrid& g) {
    const std::size_t n = g.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 10);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < n; ++i) {
        const double r = g.nodes[i];
        m = std::min(m, r * r * V.eval(r));
    }
    return m;
}

// L^{3/2} norm of V restricted to the unit ball, on the given grid.
double l32_unit_ball(const Potential& V, const GridPtr& grid) {
    auto f = make_function(grid, [&](double r) { return r <= 1.0 ? V.eval(r) : 0.0; });
    return lp_norm(f, 1.5);
}

}  // namespace

Potential coulomb(double Z) {
    if (!(Z > 0.0)) throw std::invalid_argument("coulomb: Z must be positive");
    Potential V;
    V.eval = [Z](double r) { return Z / r; };
    V.label = format_label("coulomb", Z);
    V.singular_exponent = 1.0;
    V.decay_class = DecayClass::coulomb_like;
    return V;
}

Potential power_law(double Z, double alpha) {
    if (!(Z > 0.0)) throw std::invalid_argument("power_law: Z must be positive");
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("power_law: alpha must lie in (0, 2)");
    }
    Potential V;
    V.eval = [Z, alpha](double r) { return Z * std::pow(r, -alpha); };
    V.label = format_label("power_law", Z, "alpha", alpha);
    V.singular_exponent = alpha;
    V.decay_class = DecayClass::other;
    return V;
}

Potential yukawa(double Z, double mu) {
    if (!(Z > 0.0)) throw std::invalid_argument("yukawa: Z must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("yukawa: mu must be positive");
    Potential V;
    V.eval = [Z, mu](double r) { return Z * std::exp(-mu * r) / r; };
    V.label = format_label("yukawa", Z, "mu", mu);
    V.singular_exponent = 1.0;
    V.decay_class = DecayClass::faster_than_r2;
    return V;
}

HypothesisReport check_hypotheses(const Potential& V, const GridPtr& grid) {
    HypothesisReport rep;

    // (1) continuity away from the origin: sampled-finiteness proxy at every
    // node and panel midpoint of the supplied grid.
    rep.v1_continuous_away_from_0 = true;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->nodes[i];
        if (!std::isfinite(V.eval(r))) { rep.v1_continuous_away_from_0 = false; break; }
        if (i + 1 < grid->size()) {
            const double mid = 0.5 * (r + grid->nodes[i + 1]);
            if (!std::isfinite(V.eval(mid))) {
                rep.v1_continuous_away_from_0 = false;
                break;
            }
        }
    }

    // (2) L^{3/2} integrability near 0: value on the supplied grid, declared
    // finite when refining the grid moves it by less than 25% (a diverging
    // local singularity keeps growing under refinement).
    rep.v2_l32_unit_ball = l32_unit_ball(V, grid);
    const double r_min = grid->kind == GridKind::logarithmic ? grid->r_min : 0.0;
    auto refined = make_grid(grid->kind, 2 * grid->size(), grid->r_max, r_min);
    const double v2_fine = l32_unit_ball(V, refined);
    const double scale = std::max({1e-300, rep.v2_l32_unit_ball, v2_fine});
    rep.v2_finite = std::isfinite(rep.v2_l32_unit_ball) && std::isfinite(v2_fine) &&
                    std::abs(v2_fine - rep.v2_l32_unit_ball) < 0.25 * scale;

    // (3) decay at infinity: sup over the outer 10% of a wide logarithmic
    // probe grid, compared against a small fraction of V(1).
    const double far = std::max(1e4, 10.0 * grid->r_max);
    auto probe = make_grid(GridKind::logarithmic, 2000, far, 1.0);
    rep.v3_tail_sup = tail_sup(V, *probe);
    const double tol_v3 = std::max(1e-3 * std::abs(V.eval(1.0)), 1e-12);
    rep.v3_vanishes_at_infinity = rep.v3_tail_sup <= tol_v3;

    // (4) divergence of r^2 V: the outer-decade minimum must grow by at least
    // 1.5x when the probe range doubles.
    auto probe2 = make_grid(GridKind::logarithmic, 2000, 2.0 * far, 1.0);
    const double m1 = outer_min_r2v(V, *probe);
    const double m2 = outer_min_r2v(V, *probe2);
    rep.v4_outer_min_r2v = m1;
    rep.v4_r2v_diverges = (m1 > 0.0) ? (m2 >= 1.5 * m1) : (m2 > 0.0);

    return rep;
}

}  // namespace sps
