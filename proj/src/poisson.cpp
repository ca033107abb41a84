#include "sps/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace sps {

namespace {

// Compensated sum of -w*phi*rho (the Dirichlet pairing).
double pairing(const RadialFunction& phi, const RadialFunction& rho) {
    const auto& w = phi.grid->weights;
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double term = -w[i] * phi.values[i] * rho.values[i] - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

}  // namespace

PoissonSolution solve_poisson(const RadialFunction& rho) {
    const auto& r = rho.grid->nodes;
    const auto& v = rho.values;
    const std::size_t n = v.size();
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("solve_poisson: non-finite source value");
        }
    }

    // inner cumulative C_i = int_0^{r_i} rho s^2 ds; the integrand vanishes at
    // s = 0, so the first panel is the trapezoid over [0, r_1] with a zero
    // virtual sample.
    std::vector<double> C(n);
    C[0] = 0.5 * r[0] * v[0] * r[0] * r[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = r[i + 1] - r[i];
        C[i + 1] = C[i] + 0.5 * h * (v[i] * r[i] * r[i] + v[i + 1] * r[i + 1] * r[i + 1]);
    }

    // outer cumulative D_i = int_{r_i}^{r_max} rho s ds (zero extension beyond)
    std::vector<double> D(n);
    D[n - 1] = 0.0;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double h = r[i + 1] - r[i];
        D[i] = D[i + 1] + 0.5 * h * (v[i] * r[i] + v[i + 1] * r[i + 1]);
    }

    PoissonSolution out{RadialFunction(rho.grid), 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) out.phi.values[i] = -C[i] / r[i] - D[i];
    out.dirichlet = pairing(out.phi, rho);
    out.source_l1 = lp_norm(rho, 1.0);
    out.source_lr = lp_norm(rho, 2.0);
    return out;
}

PoissonSolution self_consistent_phi(const RadialFunction& u) {
    constexpr double kFourPi = 4.0 * 3.14159265358979323846;
    RadialFunction rho(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        rho.values[i] = kFourPi * u.values[i] * u.values[i];
    }
    return solve_poisson(rho);
}

RadialFunction recover_source(const RadialFunction& phi) {
    const auto& r = phi.grid->nodes;
    const std::size_t n = phi.size();
    if (n < 3) throw std::invalid_argument("recover_source: need at least 3 nodes");

    // psi = r * phi telescopes cleanly through both cumulative sums
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = r[i] * phi.values[i];

    RadialFunction rho(phi.grid);
    {   // first node: eliminate the outer cumulative between nodes 1 and 2
        const double h = r[1] - r[0];
        rho.values[0] = (r[0] * (psi[1] - psi[0]) / h - psi[0]) /
                        (0.5 * r[0] * r[0] * (r[0] + h));
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = r[i] - r[i - 1], hp = r[i + 1] - r[i];
        rho.values[i] = ((psi[i - 1] - psi[i]) / hm + (psi[i + 1] - psi[i]) / hp) /
                        (0.5 * r[i] * (hm + hp));
    }
    {   // last node: the outer cumulative vanishes there
        const double h = r[n - 1] - r[n - 2];
        rho.values[n - 1] = 2.0 * (psi[n - 2] - psi[n - 1]) / (h * h * r[n - 1]);
    }
    return rho;
}

double source_ratio(const RadialFunction& rho, double r_exp) {
    if (!(r_exp > 1.2 && r_exp <= 2.0)) {
        throw std::invalid_argument("source_ratio: exponent must lie in (6/5, 2]");
    }
    bool all_zero = true;
    for (double x : rho.values) {
        if (x != 0.0) { all_zero = false; break; }
    }
    if (all_zero) return 0.0;
    auto sol = solve_poisson(rho);
    const double lr = lp_norm(rho, r_exp);
    return sol.dirichlet / (sol.source_l1 * sol.source_l1 + lr * lr);
}

}  // namespace sps
