#pragma once

// Field <-> amplitude maps.
//
// Inside an element the field is u = e^{+ix} P(x) + e^{-ix} Q(x) where x is
// measured from the element centre and P, Q are polynomials of degree at
// most two.  Element centres sit on multiples of 2*pi for the default grid
// (x0 = -h/2), so local and absolute phases coincide there.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "holistic/amplitude_model.hpp"
#include "holistic/core.hpp"

namespace holistic {

/// Coefficients of the wall-element field, e^{+ix} bracket; the e^{-ix}
/// bracket uses the complex conjugates.
namespace wall_table {
inline constexpr Complex alpha_constant{7.0 / 16.0, 5.0 / 16.0};   // (7+5i)/16
inline constexpr Complex alpha_linear{2.0 / 4.0, 3.0 / 4.0};       // (2+3i)/4, enters as -x
inline constexpr Complex quadratic{1.0 / 96.0, -1.0 / 96.0};       // (1-i)/96, times (h^2-12x^2)
inline constexpr Complex beta_constant{3.0 / 16.0, 1.0 / 16.0};    // (3+i)/16
inline constexpr Complex beta_linear{0.0, 1.0 / 4.0};              // i/4, enters as -x
}  // namespace wall_table

/// A polynomial-modulated roll field on one element.
struct SubgridField {
    std::array<Complex, 3> plus{};   // coefficients of 1, x, x^2 multiplying e^{+ix}
    std::array<Complex, 3> minus{};  // same for e^{-ix}
    bool mirrored = false;           // evaluate at -x (right wall element)

    /// d^order u / dx^order at local coordinate x, before taking the real part.
    [[nodiscard]] Complex evaluate(double x, int order = 0) const {
        if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
        const double xe = mirrored ? -x : x;
        const double chain = (mirrored && order % 2 == 1) ? -1.0 : 1.0;
        return chain * (branch(plus, 1.0, xe, order) + branch(minus, -1.0, xe, order));
    }

    [[nodiscard]] double value(double x, int order = 0) const { return evaluate(x, order).real(); }

private:
    // d/dx [e^{isx} P] = e^{isx} (P' + i s P)
    static Complex branch(std::array<Complex, 3> c, double s, double x, int order) {
        const Complex is{0.0, s};
        for (int k = 0; k < order; ++k)
            c = {c[1] + is * c[0], 2.0 * c[2] + is * c[1], is * c[2]};
        return std::exp(is * x) * (c[0] + x * (c[1] + x * c[2]));
    }
};

/// Interior field, first order in the coupling.
inline SubgridField interior_subgrid(const AmplitudeState& state, const ModelParams& params,
                                     std::size_t j, double gamma,
                                     Topology topology = Topology::Bounded) {
    if (state.a.size() != state.b.size())
        throw std::invalid_argument("amplitude lattices a and b differ in length");
    const Complex d2a = second_difference(state.a, j, topology);
    const Complex d2b = second_difference(state.b, j, topology);
    const Complex mda = mean_difference(state.a, j, topology);
    const Complex mdb = mean_difference(state.b, j, topology);
    const double g = gamma / (4.0 * params.h);
    SubgridField f;
    f.plus = {state.a[j] + g * (d2a - 2.0 * I * mdb), g * (4.0 * mda - 2.0 * I * d2b), 0.0};
    f.minus = {state.b[j] + g * (d2b + 2.0 * I * mda), g * (4.0 * mdb + 2.0 * I * d2a), 0.0};
    return f;
}

namespace detail {

// Wall-element field from the element's own amplitudes (a1, b1), its inner
// neighbour (a2, b2) and the wall data.
inline SubgridField wall_field(Complex a1, Complex b1, Complex a2, Complex b2, double h,
                               double gamma, SignChoice sign, double alpha, double beta) {
    using namespace wall_table;
    const double s = sign_value(sign);
    const double g = gamma / (4.0 * h);
    const double w = s * gamma * gamma / h;

    const Complex fc = alpha * alpha_constant + beta * beta_constant + (alpha + beta) * quadratic * h * h;
    const Complex fl = -alpha * alpha_linear - beta * beta_linear;
    const Complex fq = -12.0 * (alpha + beta) * quadratic;

    SubgridField f;
    f.plus = {a1 + g * (-(2.0 + s * I) * a1 + a2 - s * b1 - I * b2) + w * fc,
              2.0 * g * (s * I * a1 + a2 + s * (1.0 + 2.0 * s * I) * b1 - I * b2) + w * fl,
              w * fq};
    f.minus = {b1 + g * (-s * a1 + I * a2 - (2.0 - s * I) * b1 + b2) + w * std::conj(fc),
               2.0 * g * (s * (1.0 - 2.0 * s * I) * a1 + I * a2 - s * I * b1 + b2) +
                   w * std::conj(fl),
               w * std::conj(fq)};
    return f;
}

}  // namespace detail

/// Field in the leftmost element, including the wall forcing profiles.
/// Forcing is evaluated at state.t.
inline SubgridField boundary_subgrid(const AmplitudeState& state, const ModelParams& params,
                                     const BoundaryForcing& forcing, SignChoice sign,
                                     double gamma) {
    detail::check_wall(state, forcing, sign);
    return detail::wall_field(state.a[0], state.b[0], state.a[1], state.b[1], params.h, gamma,
                              sign, forcing.alpha_at(state.t), forcing.beta_at(state.t));
}

/// Field in the rightmost element: the left-wall field of the reflected
/// lattice, evaluated at -x.
inline SubgridField right_boundary_subgrid(const AmplitudeState& state, const ModelParams& params,
                                           const BoundaryForcing& forcing, SignChoice sign,
                                           double gamma) {
    detail::check_wall(state, forcing, sign);
    const std::size_t n = state.size();
    auto f = detail::wall_field(state.b[n - 1], state.a[n - 1], state.b[n - 2], state.a[n - 2],
                                params.h, gamma, sign, forcing.alpha_at(state.t),
                                forcing.beta_at(state.t));
    f.mirrored = true;
    return f;
}

namespace detail {

inline std::vector<double> sample(const SubgridField& f, std::span<const double> xs, double h) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (std::abs(x) > 0.5 * h * (1.0 + 1e-12))
            throw std::invalid_argument("local coordinate outside the element");
        out.push_back(f.value(x));
    }
    return out;
}

}  // namespace detail

/// Real field of interior element j at local coordinates xs (|x| <= h/2).
inline std::vector<double> reconstruct_interior(const AmplitudeState& state,
                                                const ModelParams& params, std::size_t j,
                                                std::span<const double> xs,
                                                Topology topology = Topology::Bounded) {
    return detail::sample(interior_subgrid(state, params, j, params.gamma, topology), xs, params.h);
}

/// Real field of the leftmost element at local coordinates xs.
inline std::vector<double> reconstruct_boundary(const AmplitudeState& state,
                                                const ModelParams& params,
                                                const BoundaryForcing& forcing, SignChoice sign,
                                                std::span<const double> xs) {
    return detail::sample(boundary_subgrid(state, params, forcing, sign, params.gamma), xs,
                          params.h);
}

/// Subgrid field of element j for the given lattice topology.
inline SubgridField element_subgrid(const AmplitudeState& state, const ModelParams& params,
                                    const BoundaryForcing& forcing, std::size_t j, double gamma) {
    if (forcing.is_periodic()) return interior_subgrid(state, params, j, gamma, Topology::Periodic);
    const SignChoice sign = sign_for(forcing.kind);
    if (j == 0) return boundary_subgrid(state, params, forcing, sign, gamma);
    if (j + 1 == state.size()) return right_boundary_subgrid(state, params, forcing, sign, gamma);
    return interior_subgrid(state, params, j, gamma, Topology::Bounded);
}

/// Samples the reconstructed field on the element-aligned grid
/// (periodic for periodic forcing, walls otherwise).
inline FieldGrid reconstruct_field(const AmplitudeState& state, const ModelParams& params,
                                   const BoundaryForcing& forcing, double gamma) {
    if (state.size() != params.n_elements)
        throw std::invalid_argument("state size does not match n_elements");
    FieldGrid grid = element_grid(params, forcing.is_periodic());
    const std::size_t m = params.m_samples;
    std::vector<SubgridField> fields;
    fields.reserve(state.size());
    for (std::size_t j = 0; j < state.size(); ++j)
        fields.push_back(element_subgrid(state, params, forcing, j, gamma));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t j = std::min(i / m, state.size() - 1);
        const double x_local = static_cast<double>(i - j * m) * grid.dx - 0.5 * params.h;
        grid.u[i] = fields[j].value(x_local);
    }
    return grid;
}

struct ElementAverage {
    Complex a;
    Complex b;
};

/// (1/h) int u e^{-ix} and (1/h) int u e^{+ix} over one element from its
/// m + 1 samples (both ends included, local x from -h/2 to h/2), by the
/// trapezoidal rule.
inline ElementAverage element_average(std::span<const double> u, double h) {
    if (u.size() < 3) throw std::invalid_argument("an element needs at least three samples");
    const std::size_t m = u.size() - 1;
    const double dx = h / static_cast<double>(m);
    Complex sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const Complex phase = std::exp(-I * (static_cast<double>(i) * dx - 0.5 * h));
        const double w = (i == 0 || i == m) ? 0.5 : 1.0;
        sa += w * u[i] * phase;
        sb += w * u[i] * std::conj(phase);
    }
    return {sa / static_cast<double>(m), sb / static_cast<double>(m)};
}

/// Element averages a_j = (1/h) int u e^{-ix}, b_j = (1/h) int u e^{+ix},
/// by the trapezoidal rule on each element's samples (shared end samples
/// carry half weight in each element).  A field that jumps between
/// elements is represented on the grid by the right-hand element's value
/// at the shared node.
inline AmplitudeState extract_amplitudes(const FieldGrid& grid, const ModelParams& params,
                                         double t = 0.0) {
    const std::size_t n = params.n_elements, m = params.m_samples;
    const std::size_t expected = n * m + (grid.periodic ? 0 : 1);
    if (grid.size() != expected || std::abs(grid.dx - params.dx()) > 1e-12 * params.dx())
        throw std::invalid_argument("grid is not element aligned: expected " +
                                    std::to_string(expected) + " samples with dx = h/m");
    AmplitudeState state = AmplitudeState::zero(n, t);
    std::vector<double> local(m + 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i <= m; ++i) local[i] = grid.u[(j * m + i) % grid.size()];
        const auto avg = element_average(local, params.h);
        state.a[j] = avg.a;
        state.b[j] = avg.b;
    }
    return state;
}

struct IbcResidual {
    Complex right;  // condition at x_j + h/2
    Complex left;   // condition at x_j - h/2
};

/// Mismatch of the internal boundary conditions on u at both ends of
/// element j, with derivatives taken analytically from the reconstruction.
inline IbcResidual ibc_residual(const AmplitudeState& state, const ModelParams& params,
                                std::size_t j, double gamma,
                                Topology topology = Topology::Periodic) {
    const std::size_t n = state.size();
    if (topology == Topology::Bounded && (j < 2 || j + 2 >= n))
        throw std::out_of_range("ibc_residual needs element " + std::to_string(j) +
                                " and both neighbours to be interior");
    const auto [jl, jr] = detail::neighbours(n, j, topology);
    const auto own = interior_subgrid(state, params, j, gamma, topology);
    const auto left = interior_subgrid(state, params, jl, gamma, topology);
    const auto right = interior_subgrid(state, params, jr, gamma, topology);
    const double e = 0.5 * params.h;
    auto plus = [](const SubgridField& f, double x) { return f.evaluate(x) + f.evaluate(x, 1); };
    auto minus = [](const SubgridField& f, double x) { return f.evaluate(x) - f.evaluate(x, 1); };
    return {plus(own, e) - (1.0 - gamma) * plus(own, -e) - gamma * plus(right, -e),
            minus(own, -e) - (1.0 - gamma) * minus(own, e) - gamma * minus(left, e)};
}

/// Wall-element field with zero amplitudes and unit alpha (or beta), plus
/// the second derivative of each.
struct BoundaryProfiles {
    std::vector<double> x;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> alpha_xx;
    std::vector<double> beta_xx;
};

inline BoundaryProfiles boundary_profiles(const ModelParams& params, SignChoice sign,
                                          std::span<const double> xs, double alpha_scale = 1.0,
                                          double beta_scale = 1.0) {
    const double gamma = params.gamma;
    const auto fa = detail::wall_field(0.0, 0.0, 0.0, 0.0, params.h, gamma, sign, alpha_scale, 0.0);
    const auto fb = detail::wall_field(0.0, 0.0, 0.0, 0.0, params.h, gamma, sign, 0.0, beta_scale);
    BoundaryProfiles out;
    for (double x : xs) {
        out.x.push_back(x);
        out.alpha.push_back(fa.value(x));
        out.beta.push_back(fb.value(x));
        out.alpha_xx.push_back(fa.value(x, 2));
        out.beta_xx.push_back(fb.value(x, 2));
    }
    return out;
}

}  // namespace holistic
