#pragma once

// Closed-form predictions and the model-versus-direct comparison harness.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "holistic/amplitude_model.hpp"
#include "holistic/core.hpp"
#include "holistic/direct_solver.hpp"
#include "holistic/subgrid.hpp"

namespace holistic {

/// Linear growth rate of e^{ikx}: r - (1 - k^2)^2.
inline double she_growth_rate(double k, double r) noexcept {
    const double s = 1.0 - k * k;
    return r - s * s;
}

/// Growth rate of the lattice mode a_j = e^{i kappa j h} under the
/// linearised interior stencil.
inline double lattice_dispersion(double kappa, const ModelParams& params) noexcept {
    const double h = params.h;
    return params.r + 4.0 * params.gamma * params.gamma / (h * h) * (2.0 * std::cos(kappa * h) - 2.0);
}

struct ModeRates {
    double fast;  // r - 8/h^2: Re(a_1) for the upper sign, Im(a_1) for the lower
    double slow;  // r
};

inline ModeRates boundary_mode_rates(const ModelParams& params, SignChoice /*sign*/) noexcept {
    return {params.r - 8.0 / (params.h * params.h), params.r};
}

/// Predicted Re(a_1) equilibrium under constant upper-sign forcing.
inline double boundary_equilibrium(const ModelParams& params, double alpha, double beta) noexcept {
    return -params.h * (alpha + beta) / 8.0;
}

/// Rates of (Re a_1, Im a_1) from the left-wall stencil linearised about
/// zero with a_2 = a_1, b = conj(a), no forcing.  Computed from a central
/// difference Jacobian of left_boundary_rhs (the cubic drops out at O(eps^2)).
struct LinearisedWall {
    std::array<std::array<double, 2>, 2> jacobian{};  // d(Re, Im of a_1')/d(Re, Im of a_1)
    std::array<double, 2> eigenvalues{};              // ascending
};

inline LinearisedWall linearise_left_wall(const ModelParams& params, SignChoice sign,
                                          double eps = 1e-7) {
    const auto forcing = BoundaryForcing::walls(kind_for(sign), params, constant_signal(0.0),
                                                constant_signal(0.0));
    auto rate = [&](Complex a1) {
        auto state = AmplitudeState::real_sector(0.0, {a1, a1});
        return left_boundary_rhs(state, params, forcing, sign).da;
    };
    LinearisedWall out;
    const std::array<Complex, 2> dirs{Complex{1.0, 0.0}, Complex{0.0, 1.0}};
    for (std::size_t c = 0; c < 2; ++c) {
        const Complex d = (rate(eps * dirs[c]) - rate(-eps * dirs[c])) / (2.0 * eps);
        out.jacobian[0][c] = d.real();
        out.jacobian[1][c] = d.imag();
    }
    const auto& m = out.jacobian;
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    out.eigenvalues = {0.5 * tr - disc, 0.5 * tr + disc};
    return out;
}

/// A comparison run on a periodic lattice: the direct solver seeded with the
/// reconstructed subgrid field of `initial` versus the lattice model.
struct ComparisonConfig {
    ModelParams params;
    ComplexVector initial_a;     // b = conj(a)
    double t_end = 100.0;
    double model_dt = 0.25;
    double oracle_dt = 0.25;
    std::size_t samples = 10;    // comparison times after t = 0
    double seed_gamma = 1.0;     // coupling used to reconstruct the oracle seed
};

struct ComparisonReport {
    std::vector<double> times;
    std::vector<ComplexVector> model_amplitudes;
    std::vector<ComplexVector> oracle_amplitudes;
    std::vector<double> sup_error;
    double convergence_slope = std::nan("");
    bool outside_validity = false;  // oracle amplitude well beyond sqrt(r/3)
    double r = 0.0;

    [[nodiscard]] double terminal_error() const { return sup_error.back(); }
};

inline ComparisonReport compare_model_vs_direct(const ComparisonConfig& config) {
    const auto& params = config.params;
    if (config.initial_a.size() != params.n_elements)
        throw std::invalid_argument("initial amplitudes do not match n_elements");
    if (config.samples == 0) throw std::invalid_argument("samples must be positive");
    const auto forcing = BoundaryForcing::periodic();
    const auto initial = AmplitudeState::real_sector(0.0, config.initial_a);

    ComparisonReport report;
    report.r = params.r;
    for (std::size_t s = 0; s <= config.samples; ++s)
        report.times.push_back(config.t_end * static_cast<double>(s) /
                               static_cast<double>(config.samples));

    // Model trajectory, integrated between the comparison times.
    AmplitudeState state = initial;
    report.model_amplitudes.push_back(state.a);
    for (std::size_t s = 1; s < report.times.size(); ++s) {
        state = run_model(state, params, forcing, report.times[s], config.model_dt,
                          std::size_t{1} << 30)
                    .final_state();
        report.model_amplitudes.push_back(state.a);
    }

    // Oracle trajectory.
    const FieldGrid seed = reconstruct_field(initial, params, forcing, config.seed_gamma);
    const double interval = config.t_end / static_cast<double>(config.samples);
    const auto steps_per_interval =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(interval / config.oracle_dt - 1e-9)));
    SpectralStepper stepper(params.r, seed.size(), seed.length(),
                            interval / static_cast<double>(steps_per_interval));
    stepper.set_field(seed.u);
    FieldGrid grid = seed;
    report.oracle_amplitudes.push_back(extract_amplitudes(grid, params).a);
    for (std::size_t s = 1; s < report.times.size(); ++s) {
        stepper.advance(steps_per_interval);
        grid.u = stepper.field();
        report.oracle_amplitudes.push_back(extract_amplitudes(grid, params, report.times[s]).a);
    }

    const double scale = std::sqrt(std::max(params.r, 0.0) / 3.0);
    for (std::size_t s = 0; s < report.times.size(); ++s) {
        double worst = 0.0, largest = 0.0;
        for (std::size_t j = 0; j < params.n_elements; ++j) {
            worst = std::max(worst, std::abs(report.model_amplitudes[s][j] -
                                             report.oracle_amplitudes[s][j]));
            largest = std::max(largest, std::abs(report.oracle_amplitudes[s][j]));
        }
        report.sup_error.push_back(worst);
        if (largest > 2.0 * scale + 1e-12) report.outside_validity = true;
    }
    return report;
}

/// Initial amplitude profile for a ladder member at bifurcation parameter r.
using ProfileFn = std::function<ComplexVector(double r, std::size_t n_elements)>;

/// a_j = sqrt(r/3) (1 + depth cos(2 pi j / N)), j = 1..N.
inline ProfileFn modulated_profile(double depth = 0.2) {
    return [depth](double r, std::size_t n) {
        ComplexVector a(n);
        const double base = std::sqrt(r / 3.0);
        for (std::size_t j = 0; j < n; ++j)
            a[j] = base * (1.0 + depth * std::cos(two_pi * static_cast<double>(j + 1) /
                                                  static_cast<double>(n)));
        return a;
    };
}

struct LadderResult {
    std::vector<ComparisonReport> reports;
    std::vector<double> rs;
    std::vector<double> normalised_errors;  // terminal sup_error / sqrt(r/3)
    double slope = std::nan("");
};

/// Runs compare_model_vs_direct at each r (t_end = horizon / r) and fits
/// the log-log slope of the normalised terminal error against r.
inline LadderResult convergence_ladder(ComparisonConfig base, const std::vector<double>& rs,
                                       const ProfileFn& profile, double horizon = 10.0) {
    if (rs.size() < 2) throw std::invalid_argument("a ladder needs at least two values of r");
    LadderResult out;
    std::vector<double> log_r, log_e;
    for (double r : rs) {
        if (!(r > 0.0)) throw std::invalid_argument("ladder values of r must be positive");
        ComparisonConfig config = base;
        config.params.r = r;
        config.initial_a = profile(r, config.params.n_elements);
        config.t_end = horizon / r;
        auto report = compare_model_vs_direct(config);
        const double e = report.terminal_error() / std::sqrt(r / 3.0);
        out.rs.push_back(r);
        out.normalised_errors.push_back(e);
        log_r.push_back(std::log(r));
        log_e.push_back(std::log(e));
        out.reports.push_back(std::move(report));
    }
    out.slope = fit_slope(log_r, log_e);
    for (auto& report : out.reports) report.convergence_slope = out.slope;
    return out;
}

}  // namespace holistic
