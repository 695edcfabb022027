#pragma once

// Lattice ODEs for the complex roll amplitudes.
//
// Interior elements:
//   a_j' = r a_j + (4 g^2/h^2) d2 a_j - 3 g^2 a_j^2 b_j
//   b_j' = r b_j + (4 g^2/h^2) d2 b_j - 3 g^2 a_j b_j^2
// Left wall element (upper sign: u, u_xx given; lower sign: u_x, u_xxx given):
//   a_1' = r a_1 + (4 g^2/h^2)(a_2 - 2 a_1 -+ b_1) - 3 a_1^2 b_1 -+ (g^2/h)(1-i)(alpha+beta)
//   b_1' = r b_1 + (4 g^2/h^2)(b_2 - 2 b_1 -+ a_1) - 3 a_1 b_1^2 -+ (g^2/h)(1+i)(alpha+beta)
// The right wall element is the mirror image (x -> -x swaps a and b).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "holistic/core.hpp"

namespace holistic {

/// Upper: even derivatives given at the wall.  Lower: odd derivatives given.
enum class SignChoice { Upper, Lower };

inline double sign_value(SignChoice sign) noexcept { return sign == SignChoice::Upper ? 1.0 : -1.0; }

inline std::string to_string(SignChoice sign) { return sign == SignChoice::Upper ? "upper" : "lower"; }

inline SignChoice sign_for(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::EvenGiven: return SignChoice::Upper;
        case BoundaryKind::OddGiven: return SignChoice::Lower;
        case BoundaryKind::Periodic: break;
    }
    throw std::invalid_argument("periodic forcing has no boundary sign");
}

inline BoundaryKind kind_for(SignChoice sign) noexcept {
    return sign == SignChoice::Upper ? BoundaryKind::EvenGiven : BoundaryKind::OddGiven;
}

struct AmplitudeRates {
    Complex da;
    Complex db;
};

namespace detail {

inline void check_sizes(const AmplitudeState& state) {
    if (state.a.size() != state.b.size())
        throw std::invalid_argument("amplitude lattices a and b differ in length");
}

inline void check_wall(const AmplitudeState& state, const BoundaryForcing& forcing,
                       SignChoice sign) {
    check_sizes(state);
    if (state.size() < 2) throw std::invalid_argument("wall stencil needs at least two elements");
    if (forcing.is_periodic())
        throw std::invalid_argument("wall stencil requires EvenGiven or OddGiven forcing");
    if (sign_for(forcing.kind) != sign)
        throw std::invalid_argument("forcing kind does not match the sign choice");
}

// Wall stencil written for the element adjacent to the wall (own amplitudes
// a, b; inner neighbour a2, b2).  Both walls share it; the right wall calls
// it with the a/b roles swapped.
inline AmplitudeRates wall_stencil(Complex a, Complex b, Complex a2, Complex b2,
                                   const ModelParams& params, double sign, double forcing) {
    const double g2 = params.gamma * params.gamma;
    const double c = 4.0 * g2 / (params.h * params.h);
    const double f = sign * g2 / params.h * forcing;
    return {params.r * a + c * (a2 - 2.0 * a - sign * b) - 3.0 * a * a * b -
                f * Complex{1.0, -1.0},
            params.r * b + c * (b2 - 2.0 * b - sign * a) - 3.0 * a * b * b -
                f * Complex{1.0, 1.0}};
}

}  // namespace detail

/// Interior stencil at element j (zero based).
inline AmplitudeRates interior_rhs(const AmplitudeState& state, const ModelParams& params,
                                   std::size_t j, Topology topology = Topology::Bounded) {
    detail::check_sizes(state);
    const double g2 = params.gamma * params.gamma;
    const double c = 4.0 * g2 / (params.h * params.h);
    const Complex a = state.a.at(j), b = state.b.at(j);
    return {params.r * a + c * second_difference(state.a, j, topology) - 3.0 * g2 * a * a * b,
            params.r * b + c * second_difference(state.b, j, topology) - 3.0 * g2 * a * b * b};
}

/// Rates of the leftmost element, forcing evaluated at state.t.
inline AmplitudeRates left_boundary_rhs(const AmplitudeState& state, const ModelParams& params,
                                        const BoundaryForcing& forcing, SignChoice sign) {
    detail::check_wall(state, forcing, sign);
    const double s = forcing.alpha_at(state.t) + forcing.beta_at(state.t);
    return detail::wall_stencil(state.a[0], state.b[0], state.a[1], state.b[1], params,
                                sign_value(sign), s);
}

/// Rates of the rightmost element: the left-wall stencil reflected.
inline AmplitudeRates right_boundary_rhs(const AmplitudeState& state, const ModelParams& params,
                                         const BoundaryForcing& forcing, SignChoice sign) {
    detail::check_wall(state, forcing, sign);
    const std::size_t n = state.size();
    const double s = forcing.alpha_at(state.t) + forcing.beta_at(state.t);
    const auto mirrored = detail::wall_stencil(state.b[n - 1], state.a[n - 1], state.b[n - 2],
                                               state.a[n - 2], params, sign_value(sign), s);
    return {mirrored.db, mirrored.da};
}

struct LatticeRates {
    ComplexVector da;
    ComplexVector db;
};

/// Full lattice derivative.  Periodic forcing wraps every stencil; wall
/// forcing uses the wall stencils at both ends and the interior stencil
/// elsewhere (including the second element).
inline LatticeRates model_rhs(const AmplitudeState& state, const ModelParams& params,
                              const BoundaryForcing& forcing) {
    detail::check_sizes(state);
    const std::size_t n = state.size();
    LatticeRates rates{ComplexVector(n), ComplexVector(n)};
    if (forcing.is_periodic()) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto r = interior_rhs(state, params, j, Topology::Periodic);
            rates.da[j] = r.da;
            rates.db[j] = r.db;
        }
        return rates;
    }
    const SignChoice sign = sign_for(forcing.kind);
    const auto left = left_boundary_rhs(state, params, forcing, sign);
    const auto right = right_boundary_rhs(state, params, forcing, sign);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const auto r = interior_rhs(state, params, j, Topology::Bounded);
        rates.da[j] = r.da;
        rates.db[j] = r.db;
    }
    rates.da[0] = left.da;
    rates.db[0] = left.db;
    rates.da[n - 1] = right.da;
    rates.db[n - 1] = right.db;
    return rates;
}

/// Largest stable RK4 step we accept: a tenth of h^2/8, the time scale of
/// the fast wall mode.
inline double max_model_dt(const ModelParams& params) noexcept {
    return 0.1 * params.h * params.h / 8.0;
}

namespace detail {

inline AmplitudeState axpy(const AmplitudeState& s, double dt, const LatticeRates& k) {
    AmplitudeState out{s.t + dt, s.a, s.b};
    for (std::size_t j = 0; j < s.size(); ++j) {
        out.a[j] += dt * k.da[j];
        out.b[j] += dt * k.db[j];
    }
    return out;
}

inline bool all_finite(const AmplitudeState& s) {
    for (std::size_t j = 0; j < s.size(); ++j)
        if (!std::isfinite(s.a[j].real()) || !std::isfinite(s.a[j].imag()) ||
            !std::isfinite(s.b[j].real()) || !std::isfinite(s.b[j].imag()))
            return false;
    return true;
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step.
inline AmplitudeState rk4_step(const AmplitudeState& state, const ModelParams& params,
                               const BoundaryForcing& forcing, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (dt > max_model_dt(params) * (1.0 + 1e-12))
        throw std::invalid_argument("dt exceeds the explicit stability margin 0.1*h^2/8");
    const auto k1 = model_rhs(state, params, forcing);
    const auto k2 = model_rhs(detail::axpy(state, 0.5 * dt, k1), params, forcing);
    const auto k3 = model_rhs(detail::axpy(state, 0.5 * dt, k2), params, forcing);
    const auto k4 = model_rhs(detail::axpy(state, dt, k3), params, forcing);
    AmplitudeState out{state.t + dt, state.a, state.b};
    for (std::size_t j = 0; j < state.size(); ++j) {
        out.a[j] += dt / 6.0 * (k1.da[j] + 2.0 * k2.da[j] + 2.0 * k3.da[j] + k4.da[j]);
        out.b[j] += dt / 6.0 * (k1.db[j] + 2.0 * k2.db[j] + 2.0 * k3.db[j] + k4.db[j]);
    }
    if (!detail::all_finite(out))
        throw DivergenceError("amplitude model diverged at t = " + std::to_string(out.t));
    return out;
}

struct Trajectory {
    std::vector<AmplitudeState> samples;

    [[nodiscard]] const AmplitudeState& final_state() const { return samples.back(); }
};

/// Integrates from state.t to t_end with steps no larger than dt.  Samples
/// the initial state, every `stride`-th step and the final state.
inline Trajectory run_model(const AmplitudeState& state, const ModelParams& params,
                            const BoundaryForcing& forcing, double t_end, double dt,
                            std::size_t stride = 1) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    Trajectory traj;
    traj.samples.push_back(state);
    const double span = t_end - state.t;
    if (span <= 0.0) return traj;
    const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    const double step = span / static_cast<double>(steps);
    AmplitudeState current = state;
    for (std::size_t n = 1; n <= steps; ++n) {
        current = rk4_step(current, params, forcing, step);
        if (n == steps) current.t = t_end;
        if (n % stride == 0 || n == steps) traj.samples.push_back(current);
    }
    return traj;
}

/// Discrete Ginzburg-Landau right-hand side on a periodic lattice:
/// r a_j + (c/h^2)(a_{j+1} - 2 a_j + a_{j-1}) - d |a_j|^2 a_j.
inline ComplexVector gle_rhs(std::span<const Complex> a, double r, double c, double d, double h) {
    if (a.size() < 2) throw std::invalid_argument("gle_rhs needs at least two sites");
    ComplexVector out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        out[j] = r * a[j] + c / (h * h) * second_difference(a, j, Topology::Periodic) -
                 d * std::norm(a[j]) * a[j];
    return out;
}

/// max_j |b_j - conj(a_j)|; zero exactly when the field is real.
inline double reality_check(const AmplitudeState& state) {
    detail::check_sizes(state);
    double worst = 0.0;
    for (std::size_t j = 0; j < state.size(); ++j)
        worst = std::max(worst, std::abs(state.b[j] - std::conj(state.a[j])));
    return worst;
}

}  // namespace holistic
