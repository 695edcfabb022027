// Acceptance suite: one PASS/FAIL line per criterion.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "holistic/holistic.hpp"

using namespace holistic;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", id, name.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

ComplexVector random_lattice(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ComplexVector v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    return v;
}

// 1. Measured spectral growth rates against r - (1 - k^2)^2.
Outcome dispersion() {
    const auto params = make_params(0.1, 1.0, 5, 2, 64);
    double worst = 0.0;
    for (double k : {0.8, 1.0, 1.2})
        worst = std::max(worst, std::abs(measure_growth_rate(params, k, 1e-6, 20.0) -
                                         she_growth_rate(k, 0.1)));
    return {worst <= 1e-5, fmt("max |measured - theory| = %.3e (tol 1e-5)", worst)};
}

// 2. Interior stencil at gamma = 1 is the discrete GLE with c = 4, d = 3.
Outcome gle_identity() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto params = make_params(0.1 * (trial % 5) - 0.1, 1.0, 1 + trial % 3, 12, 32);
        const auto s = AmplitudeState::real_sector(0.0, random_lattice(rng, 12, 0.5));
        const auto gle = gle_rhs(s.a, params.r, 4.0, 3.0, params.h);
        for (std::size_t j = 0; j < 12; ++j)
            worst = std::max(worst,
                             std::abs(interior_rhs(s, params, j, Topology::Periodic).da - gle[j]));
    }
    return {worst <= 1e-14, fmt("max deviation %.3e over 100 states (tol 1e-14)", worst)};
}

// 3. Long-wave limit of the lattice dispersion.
Outcome long_wave() {
    const auto params = make_params(0.05, 1.0, 1, 16, 32);
    const int n = 40;
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const double kh = 0.01 + (0.2 - 0.01) * i / (n - 1);
        const double kappa = kh / params.h;
        const double k2 = kappa * kappa;
        a(i, 0) = k2;
        a(i, 1) = k2 * k2;
        y(i) = lattice_dispersion(kappa, params) - params.r;
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    const double expect_quartic = params.h * params.h / 3.0;
    const bool quartic_bounded = std::abs(c(1)) <= 2.0 * expect_quartic;
    return {std::abs(c(0) + 4.0) <= 0.05 && quartic_bounded,
            fmt("kappa^2 coefficient %.6f (target -4 +- 0.05), quartic %.4f (bound %.4f)", c(0), c(1),
                2.0 * expect_quartic)};
}

// 4. Oracle-model agreement improves as r decreases.
Outcome convergence() {
    ComparisonConfig base{make_params(0.04, 1.0, 1, 16, 32), ComplexVector(16), 1.0};
    const auto ladder = convergence_ladder(base, {0.04, 0.02, 0.01}, modulated_profile(0.2));
    std::string errs;
    for (double e : ladder.normalised_errors) errs += fmt("%.3e ", e);
    bool valid = true;
    for (const auto& r : ladder.reports) valid = valid && !r.outside_validity;
    return {ladder.slope >= 0.9 && valid,
            "normalised errors " + errs + fmt("slope %.3f (need >= 0.9)", ladder.slope)};
}

// 5. Wall selection of sin rolls (upper) and cos rolls (lower), then the
// bounded oracle's wall phase.
Outcome boundary_selection() {
    const auto params = make_params(0.05, 1.0, 1, 8, 32);
    const double t_end = 10.0 / (8.0 / (params.h * params.h) - params.r);
    const double s = 0.5 * std::sqrt(params.r / 3.0);
    std::string detail;
    bool pass = true;
    for (const SignChoice sign : {SignChoice::Upper, SignChoice::Lower}) {
        // Interior elements already carry the wall's preferred phase; a_1
        // starts at 45 degrees.
        ComplexVector a(8, sign == SignChoice::Upper ? Complex(0.0, s) : Complex(s, 0.0));
        a[0] = s * std::exp(I * (M_PI / 4.0));
        const auto initial = AmplitudeState::real_sector(0.0, a);
        const auto forcing = BoundaryForcing::walls(kind_for(sign), params, constant_signal(0.0),
                                                    constant_signal(0.0));
        const auto model = run_model(initial, params, forcing, t_end, 0.1, 1u << 30).final_state();
        const Complex a1 = model.a[0];
        const double ratio =
            (sign == SignChoice::Upper ? std::abs(a1.real()) : std::abs(a1.imag())) / std::abs(a1);
        pass = pass && ratio <= 0.05;

        SolverConfig config;
        config.dt = 0.02;
        config.t_end = t_end;
        config.scheme = Scheme::BoundedIMEX;
        const auto seed = reconstruct_field(initial, params, forcing, 1.0);
        const auto field = run_direct(seed, params, forcing, config, 1u << 30,
                                      [](double, const FieldGrid&) {});
        const Complex d1 = extract_amplitudes(field, params, t_end).a[0];
        const double phase = std::abs(std::arg(d1)) * 180.0 / M_PI;
        const double off = sign == SignChoice::Upper ? std::abs(phase - 90.0)
                                                     : std::min(phase, 180.0 - phase);
        pass = pass && off <= 10.0;
        detail += to_string(sign) + fmt(": model ratio %.4f (tol 0.05), direct phase %.2f deg (off %.2f, tol 10); ",
                                        ratio, phase, off);
    }
    return {pass, detail + fmt("t = %.2f", t_end)};
}

// 6. Steady forced wall amplitude against -h(alpha + beta)/8.
Outcome forced_equilibrium() {
    const auto params = make_params(0.0, 1.0, 1, 16, 32);
    const auto forcing = BoundaryForcing::even(params, 0.1, 0.0);
    auto state = AmplitudeState::zero(16);
    const double dt = max_model_dt(params);
    state = run_model(state, params, forcing, 20000.0, dt, 1u << 30).final_state();
    const double before = state.a[0].real();
    state = run_model(state, params, forcing, 40000.0, dt, 1u << 30).final_state();
    const double steady = state.a[0].real();
    const double target = boundary_equilibrium(params, 0.1, 0.0);
    const double rel = std::abs(steady - target) / std::abs(target);
    return {rel <= 0.1, fmt("steady Re(a_1) = %.5f (drift %.1e since t = 2e4), predicted %.5f", steady,
                            steady - before, target) +
                            fmt(", relative gap %.3f (tol 0.1)", rel)};
}

// 7. Linearised wall eigenvalues.
Outcome mode_rates() {
    double worst = 0.0;
    for (const auto& [r, p] : {std::pair{0.0, 1}, std::pair{0.05, 1}, std::pair{0.1, 2}}) {
        const auto params = make_params(r, 1.0, p, 8, 32);
        const auto rates = boundary_mode_rates(params, SignChoice::Upper);
        const auto lin = linearise_left_wall(params, SignChoice::Upper);
        worst = std::max({worst, std::abs(lin.eigenvalues[0] - rates.fast),
                          std::abs(lin.eigenvalues[1] - rates.slow),
                          std::abs(lin.jacobian[0][0] - rates.fast),
                          std::abs(lin.jacobian[1][1] - rates.slow)});
        const auto lower = linearise_left_wall(params, SignChoice::Lower);
        worst = std::max({worst, std::abs(lower.jacobian[0][0] - rates.slow),
                          std::abs(lower.jacobian[1][1] - rates.fast)});
    }
    return {worst <= 1e-10, fmt("max eigenvalue deviation %.3e (tol 1e-10)", worst)};
}

double d2(const std::function<double(double)>& f, double x, double s) {
    return (f(x - 3 * s) / 90.0 - 3.0 * f(x - 2 * s) / 20.0 + 1.5 * f(x - s) - 49.0 / 18.0 * f(x) +
            1.5 * f(x + s) - 3.0 * f(x + 2 * s) / 20.0 + f(x + 3 * s) / 90.0) /
           (s * s);
}

// 8. Structural invariants.
Outcome invariants() {
    std::mt19937_64 rng(8);
    std::string detail;
    bool pass = true;

    // conjugate closure
    double closure = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto params = make_params(0.05, 1.0, 1, 6, 32);
        const auto s = AmplitudeState::real_sector(0.3, random_lattice(rng, 6, 0.5));
        for (const auto& forcing :
             {BoundaryForcing::periodic(), BoundaryForcing::even(params, 0.2, -0.1),
              BoundaryForcing::odd(params, 0.3, 0.05)}) {
            const auto rates = model_rhs(s, params, forcing);
            for (std::size_t j = 0; j < 6; ++j)
                closure = std::max(closure, std::abs(rates.db[j] - std::conj(rates.da[j])));
        }
    }
    pass = pass && closure <= 1e-14;
    detail += fmt("closure %.1e; ", closure);

    // gamma^2 scaling of the linear coupling
    double scaling = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const AmplitudeState s{0.0, random_lattice(rng, 6, 1e-6), random_lattice(rng, 6, 1e-6)};
        const auto full = make_params(0.0, 0.8, 1, 6, 32), half = make_params(0.0, 0.4, 1, 6, 32);
        for (std::size_t j = 0; j < 6; ++j) {
            const Complex a = interior_rhs(s, full, j, Topology::Periodic).da;
            const Complex b = interior_rhs(s, half, j, Topology::Periodic).da;
            const Complex cubic_a = -3.0 * 0.64 * s.a[j] * s.a[j] * s.b[j];
            const Complex cubic_b = -3.0 * 0.16 * s.a[j] * s.a[j] * s.b[j];
            scaling = std::max(scaling, std::abs((a - cubic_a) / (b - cubic_b) - 4.0));
        }
    }
    pass = pass && scaling <= 1e-12;
    detail += fmt("gamma^2 ratio dev %.1e; ", scaling);

    // IBC residual ladder
    double worst_ratio = 4.0;
    {
        const auto params = make_params(0.0, 1.0, 1, 8, 32);
        for (int trial = 0; trial < 10; ++trial) {
            const AmplitudeState s{0.0, random_lattice(rng, 8, 0.5), random_lattice(rng, 8, 0.5)};
            auto norm = [&](double g) {
                double total = 0.0;
                for (std::size_t j = 0; j < 8; ++j) {
                    const auto res = ibc_residual(s, params, j, g);
                    total += std::norm(res.right) + std::norm(res.left);
                }
                return std::sqrt(total);
            };
            const double ratio = norm(0.1) / norm(0.05);
            if (std::abs(ratio - 4.0) > std::abs(worst_ratio - 4.0)) worst_ratio = ratio;
        }
    }
    pass = pass && std::abs(worst_ratio - 4.0) <= 0.5;
    detail += fmt("IBC ratio worst %.3f; ", worst_ratio);

    // kernel property of the coupling corrections
    double kernel = 0.0;
    {
        const auto params = make_params(0.0, 1.0, 1, 6, 32);
        const AmplitudeState s{0.0, random_lattice(rng, 6, 0.5), random_lattice(rng, 6, 0.5)};
        for (std::size_t j = 0; j < 6; ++j) {
            auto corr = interior_subgrid(s, params, j, 1.0, Topology::Periodic);
            corr.plus[0] -= s.a[j];
            corr.minus[0] -= s.b[j];
            const std::function<double(double)> u = [&](double x) { return corr.value(x); };
            const std::function<double(double)> lu = [&](double x) { return u(x) + d2(u, x, 0.02); };
            double norm = 0.0, worst = 0.0;
            for (int i = 0; i <= 20; ++i) {
                const double x = -2.5 + 0.25 * i;
                norm = std::max(norm, std::abs(u(x)));
                worst = std::max(worst, std::abs(lu(x) + d2(lu, x, 0.02)));
            }
            kernel = std::max(kernel, worst / norm);
        }
    }
    pass = pass && kernel <= 1e-6;
    detail += fmt("kernel rel %.1e; ", kernel);

    // round trip at gamma = 0, each element on its own samples
    double trip = 0.0;
    {
        const auto params = make_params(0.0, 0.0, 1, 8, 32);
        const auto s = AmplitudeState::real_sector(0.0, random_lattice(rng, 8, 0.5));
        std::vector<double> xs(params.m_samples + 1);
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -0.5 * params.h + i * params.dx();
        for (std::size_t j = 1; j + 1 < 8; ++j) {
            const auto u = reconstruct_interior(s, params, j, xs);
            trip = std::max(trip, std::abs(element_average(u, params.h).a - s.a[j]));
        }
        const auto u = reconstruct_boundary(s, params, BoundaryForcing::even(params), SignChoice::Upper, xs);
        trip = std::max(trip, std::abs(element_average(u, params.h).a - s.a[0]));
    }
    pass = pass && trip <= 1e-10;
    detail += fmt("round trip %.1e; ", trip);

    // reality preservation
    double reality = 0.0;
    {
        const auto params = make_params(0.05, 1.0, 1, 6, 32);
        for (const auto& forcing : {BoundaryForcing::periodic(), BoundaryForcing::even(params),
                                    BoundaryForcing::odd(params)}) {
            const auto s = AmplitudeState::real_sector(0.0, random_lattice(rng, 6, 0.2));
            const auto end = run_model(s, params, forcing, 1e4 * 0.4, 0.4, 1u << 30).final_state();
            reality = std::max(reality, reality_check(end));
        }
    }
    pass = pass && reality <= 1e-10;
    detail += fmt("reality %.1e", reality);
    return {pass, detail};
}

}  // namespace

int main() {
    report(1, "dispersion match", dispersion);
    report(2, "discrete GLE identity", gle_identity);
    report(3, "long-wave consistency", long_wave);
    report(4, "oracle-model convergence", convergence);
    report(5, "boundary selection", boundary_selection);
    report(6, "forced equilibrium", forced_equilibrium);
    report(7, "boundary-mode rates", mode_rates);
    report(8, "structural invariants", invariants);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
