// Radial discretization of R^3: grids, quadrature, norms, derivatives, and the
// scaling / annulus-bump constructions used by the variational machinery.
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace sps {

/// Node placement rule for a radial grid.
enum class GridKind {
    uniform,     ///< equally spaced radii h, 2h, ..., r_max (no node at r = 0)
    logarithmic  ///< log-spaced radii from r_min to r_max
};

/// Nodes and quadrature weights for integrals of radial functions over R^3.
///
/// The weights satisfy  sum_i w_i f(r_i) ~ int_{R^3} f(|x|) dx
///                                       = 4*pi * int_0^{r_max} f(r) r^2 dr,
/// i.e. the 4*pi*r^2 Jacobian is folded into the weights.  Functions are
/// implicitly extended by zero beyond r_max.
///
/// Weight construction: composite trapezoid over the panels, including a
/// virtual node at r = 0 where the integrand vanishes (for logarithmic grids
/// the rule is applied in t = ln r with the exact small-ball remainder for
/// [0, r_min]), plus a three-term Gregory end correction at the outer end.
/// The Gregory correction removes the outer boundary error of the trapezoid
/// rule, which would otherwise dominate for slowly decaying integrands; the
/// inner boundary term vanishes automatically because f(r)*r^2 has zero slope
/// at r = 0 for bounded f.  All weights stay positive.
struct RadialGrid {
    std::vector<double> nodes;    ///< radii r_i > 0, strictly increasing, last = r_max
    std::vector<double> weights;  ///< positive quadrature weights, Jacobian included
    GridKind kind;                ///< node placement rule
    double r_max;                 ///< truncation radius (= last node)
    double r_min;                 ///< first node (r_max/n for uniform grids)

    std::size_t size() const { return nodes.size(); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Sampled radial profile u(r_i) representing u(x) = u(|x|).
/// Values beyond r_max are treated as 0 (decay assumption).
struct RadialFunction {
    GridPtr grid;
    std::vector<double> values;

    RadialFunction() = default;
    explicit RadialFunction(GridPtr g)
        : grid(std::move(g)), values(grid->size(), 0.0) {}
    RadialFunction(GridPtr g, std::vector<double> v)
        : grid(std::move(g)), values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Build a radial grid.
///
/// \param kind   node placement rule
/// \param n      number of nodes (>= 2)
/// \param r_max  truncation radius (> 0)
/// \param r_min  first node for logarithmic grids (0 < r_min < r_max); ignored
///               for uniform grids
/// Throws std::invalid_argument on bad sizes or radii.
GridPtr make_grid(GridKind kind, std::size_t n, double r_max, double r_min = 0.0);

/// Sample f(r) at the grid nodes.
RadialFunction make_function(const GridPtr& grid, const std::function<double(double)>& f);

/// int_{R^3} f dx  via the grid's quadrature weights (compensated summation).
double integrate(const RadialFunction& f);

/// Weighted pairing  int_{R^3} a b dx  (same quadrature as integrate).
double inner_product(const RadialFunction& a, const RadialFunction& b);

/// L^p norm (int |u|^p dx)^(1/p); p = infinity returns max |u|.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const RadialFunction& u, double p);

/// Radial derivative u'(r): fourth-order five-point Lagrange stencils with
/// windows clamped at the boundaries (valid on any node spacing); grids with
/// fewer than 5 nodes fall back to three-point stencils (needs >= 3 nodes).
RadialFunction derivative(const RadialFunction& u);

/// int |grad u|^2 dx = 4*pi * int u'(r)^2 r^2 dr  via derivative().
double dirichlet_energy(const RadialFunction& u);

/// L^2-preserving rescaling  u_lambda(r) = lambda^(3/2) u(lambda r),
/// resampled onto u's grid with linear interpolation (constant extension
/// below the first node, zero beyond r_max).
RadialFunction scale_function(const RadialFunction& u, double lambda);

/// Smooth normalized bump supported in the annulus [i, 2i]:
/// cos^2 profile in r, scaled so that int u^2 dx = 1 under the grid's
/// quadrature.  Throws std::invalid_argument if 2i > r_max.
RadialFunction annulus_bump(int i, const GridPtr& grid);

/// Resample u onto another grid (linear interpolation in r, zero beyond the
/// original r_max, constant extension below the original first node).
RadialFunction resample(const RadialFunction& u, const GridPtr& grid);

}  // namespace sps
