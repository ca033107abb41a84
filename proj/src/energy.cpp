#include "sps/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "sps/poisson.hpp"

namespace sps {

namespace {

constexpr double kPi = 3.14159265358979323846;

// compensated sum of w_i * f(i) over the grid
template <typename Term>
double weighted_sum(const GridPtr& grid, Term term) {
    double acc = 0.0, carry = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = grid->weights[i] * term(i) - carry;
        const double next = acc + t;
        carry = (next - acc) - t;
        acc = next;
    }
    return acc;
}

RadialFunction squared(const RadialFunction& u) {
    RadialFunction rho(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        rho.values[i] = u.values[i] * u.values[i];
    }
    return rho;
}

// int |grad u|^2 dx = 4 pi int w'(r)^2 dr for w = r u, evaluated on the
// piecewise-linear interpolant of w with a virtual node w(0) = 0 (exact for
// bounded u).  This quadratic form makes the energy gradient the classical
// tridiagonal radial Laplacian, pointwise consistent up to the boundary.
double grad_quadratic_form(const RadialFunction& u) {
    const auto& r = u.grid->nodes;
    const std::size_t n = u.size();
    double acc = 0.0, carry = 0.0;
    auto add = [&](double t) {
        t -= carry;
        const double next = acc + t;
        carry = (next - acc) - t;
        acc = next;
    };
    const double w0 = r[0] * u.values[0];
    add(w0 * w0 / r[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dw = r[i + 1] * u.values[i + 1] - r[i] * u.values[i];
        add(dw * dw / (r[i + 1] - r[i]));
    }
    return 4.0 * kPi * acc;
}

// exact gradient of grad_quadratic_form in the quadrature-weighted inner
// product: g_k = 8 pi r_k [K w]_k / weight_k with K the P1 stiffness matrix
RadialFunction grad_quadratic_gradient(const RadialFunction& u) {
    const auto& r = u.grid->nodes;
    const auto& wq = u.grid->weights;
    const std::size_t n = u.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = r[i] * u.values[i];

    RadialFunction g(u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        double kw = 0.0;
        if (i == 0) {
            kw = w[0] / r[0];
        } else {
            kw = (w[i] - w[i - 1]) / (r[i] - r[i - 1]);
        }
        if (i + 1 < n) {
            kw += (w[i] - w[i + 1]) / (r[i + 1] - r[i]);
        }
        g.values[i] = 8.0 * kPi * r[i] * kw / wq[i];
    }
    return g;
}

}  // namespace

EnergyBreakdown j_energy(const RadialFunction& u, double omega, const Potential& V,
                         bool coupling_enabled) {
    const auto& grid = u.grid;
    EnergyBreakdown e;
    e.kinetic = 0.25 * grad_quadratic_form(u);
    if (coupling_enabled) {
        e.self_interaction = kPi * solve_poisson(squared(u)).dirichlet;
    }
    e.potential = -0.5 * weighted_sum(grid, [&](std::size_t i) {
        return V.eval(grid->nodes[i]) * u.values[i] * u.values[i];
    });
    e.mass = -0.5 * omega * weighted_sum(grid, [&](std::size_t i) {
        return u.values[i] * u.values[i];
    });
    e.total = e.kinetic + e.self_interaction + e.potential + e.mass;
    return e;
}

double f_energy(const RadialFunction& u, const RadialFunction& phi, double omega,
                const Potential& V) {
    if (u.grid != phi.grid) {
        throw std::invalid_argument("f_energy: u and phi must share a grid");
    }
    const auto& grid = u.grid;
    const double kinetic = 0.25 * grad_quadratic_form(u);
    const double cross = weighted_sum(grid, [&](std::size_t i) {
        return phi.values[i] * u.values[i] * u.values[i];
    });
    // ||grad phi||^2 as the pairing -int phi * (discrete Laplacian phi) dx;
    // recover_source inverts solve_poisson exactly, so this term cancels the
    // cross term algebraically when phi is the self-consistent potential
    const RadialFunction lap = recover_source(phi);
    const double phi_dirichlet = -weighted_sum(grid, [&](std::size_t i) {
        return phi.values[i] * lap.values[i];
    });
    const double pot = -0.5 * weighted_sum(grid, [&](std::size_t i) {
        return V.eval(grid->nodes[i]) * u.values[i] * u.values[i];
    });
    const double mass = -0.5 * omega * weighted_sum(grid, [&](std::size_t i) {
        return u.values[i] * u.values[i];
    });
    return kinetic - 0.5 * cross - phi_dirichlet / (16.0 * kPi) + pot + mass;
}

RadialFunction j_gradient(const RadialFunction& u, double omega, const Potential& V,
                          bool coupling_enabled) {
    const auto& grid = u.grid;
    RadialFunction g = grad_quadratic_gradient(u);
    for (double& v : g.values) v *= 0.25;  // kinetic term carries 1/4
    if (coupling_enabled) {
        const RadialFunction phi = self_consistent_phi(u).phi;
        for (std::size_t i = 0; i < u.size(); ++i) {
            g.values[i] -= phi.values[i] * u.values[i];
        }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        g.values[i] -= (V.eval(grid->nodes[i]) + omega) * u.values[i];
    }
    return g;
}

RayDecomposition ray_decomposition(const RadialFunction& u, double omega,
                                   const Potential& V) {
    const double kin2 = grad_quadratic_form(u);
    const double mass2 = weighted_sum(u.grid, [&](std::size_t i) {
        return u.values[i] * u.values[i];
    });
    const double h1 = kin2 + mass2;
    if (!(h1 > 0.0)) {
        throw std::invalid_argument("ray_decomposition: direction must be nonzero");
    }
    RadialFunction unit(u.grid);
    const double s = 1.0 / std::sqrt(h1);
    for (std::size_t i = 0; i < u.size(); ++i) unit.values[i] = s * u.values[i];

    RayDecomposition rd;
    rd.a = 0.25 * kin2 / h1;
    rd.b = kPi * solve_poisson(squared(unit)).dirichlet;
    rd.c = 0.5 * weighted_sum(u.grid, [&](std::size_t i) {
        return V.eval(u.grid->nodes[i]) * unit.values[i] * unit.values[i];
    });
    rd.d = -0.5 * omega * mass2 / h1;
    return rd;
}

}  // namespace sps
