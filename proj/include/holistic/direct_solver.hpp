#pragma once

// Direct integration of u_t = r u - (1 + d_xx)^2 u - u^3.
//
// Periodic domains: pseudospectral ETDRK4 (Cox-Matthews, coefficients by
// contour averaging) with exact modal propagation of the linear part.
// Walled domains: second-order central differences with two ghost points
// per wall, IMEX Euler (implicit linear, explicit cubic) extrapolated to
// second order from one full step and two half steps.

#include <fftw3.h>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "holistic/core.hpp"

namespace holistic {

enum class Scheme { SpectralETD, BoundedIMEX };

struct SolverConfig {
    double dt = 0.05;
    double t_end = 1.0;
    bool dealias = true;
    Scheme scheme = Scheme::SpectralETD;
    double c_stab = 1.0;  // BoundedIMEX requires dt <= c_stab * dx^2
};

namespace detail {

// The FFTW planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    FftPlan(std::vector<Complex>& in, std::vector<Complex>& out, int direction) {
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(in.size()),
                                 reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), direction,
                                 FFTW_ESTIMATE);
        if (plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_ = nullptr;
};

inline bool all_finite(std::span<const Complex> v) {
    return std::all_of(v.begin(), v.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

}  // namespace detail

/// Signed FFT mode index for position i of an n-point transform.
inline long signed_mode(std::size_t i, std::size_t n) noexcept {
    return i <= n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

/// ETDRK4 stepper on a periodic grid.  Holds the spectral state between
/// steps; the physical field is carried as a complex array so that
/// imaginary leakage can be monitored.
class SpectralStepper {
public:
    SpectralStepper(double r, std::size_t n, double length, double dt, bool dealias = true)
        : n_(n), dt_(dt), spectrum_(n), work_(n), buffer_(n),
          forward_(buffer_, work_, FFTW_FORWARD), backward_(work_, buffer_, FFTW_BACKWARD) {
        if (n < 4 || !is_power_of_two(n))
            throw std::invalid_argument("spectral grid size must be a power of two");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(length > 0.0)) throw std::invalid_argument("domain length must be positive");
        init_coefficients(r, length, dealias);
    }

    void set_field(std::span<const double> u) {
        if (u.size() != n_) throw std::invalid_argument("field size does not match stepper");
        for (std::size_t i = 0; i < n_; ++i) buffer_[i] = u[i];
        forward_.execute();
        spectrum_ = work_;
    }

    void step() {
        const auto nv = nonlinear(spectrum_);
        std::vector<Complex> a(n_), b(n_), c(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] = e2_[i] * spectrum_[i] + q_[i] * nv[i];
        const auto na = nonlinear(a);
        for (std::size_t i = 0; i < n_; ++i) b[i] = e2_[i] * spectrum_[i] + q_[i] * na[i];
        const auto nb = nonlinear(b);
        for (std::size_t i = 0; i < n_; ++i) c[i] = e2_[i] * a[i] + q_[i] * (2.0 * nb[i] - nv[i]);
        const auto nc = nonlinear(c);
        for (std::size_t i = 0; i < n_; ++i)
            spectrum_[i] = e_[i] * spectrum_[i] + f1_[i] * nv[i] + 2.0 * f2_[i] * (na[i] + nb[i]) +
                           f3_[i] * nc[i];
        time_ += dt_;
        if (!detail::all_finite(spectrum_))
            throw DivergenceError("spectral solver produced non-finite values at t = " +
                                  std::to_string(time_));
    }

    void advance(std::size_t steps) {
        for (std::size_t s = 0; s < steps; ++s) step();
    }

    /// Real part of the current physical field.
    [[nodiscard]] std::vector<double> field() {
        physical(spectrum_);
        std::vector<double> u(n_);
        for (std::size_t i = 0; i < n_; ++i) u[i] = buffer_[i].real();
        return u;
    }

    /// max |Im u| of the current physical field.
    [[nodiscard]] double imag_leakage() {
        physical(spectrum_);
        double worst = 0.0;
        for (const auto& z : buffer_) worst = std::max(worst, std::abs(z.imag()));
        return worst;
    }

    [[nodiscard]] const std::vector<Complex>& spectrum() const noexcept { return spectrum_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double elapsed() const noexcept { return time_; }

private:
    void init_coefficients(double r, double length, bool dealias) {
        constexpr int contour_points = 64;
        e_.resize(n_);
        e2_.resize(n_);
        q_.resize(n_);
        f1_.resize(n_);
        f2_.resize(n_);
        f3_.resize(n_);
        mask_.assign(n_, 1.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const long m = signed_mode(i, n_);
            const double k = two_pi * static_cast<double>(m) / length;
            const double lambda = r - (1.0 - k * k) * (1.0 - k * k);
            const double z = dt_ * lambda;
            e_[i] = std::exp(z);
            e2_[i] = std::exp(0.5 * z);
            Complex q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
            for (int c = 0; c < contour_points; ++c) {
                const Complex zc =
                    z + std::exp(I * (two_pi * (c + 0.5) / contour_points));
                const Complex ez = std::exp(zc);
                q += (std::exp(0.5 * zc) - 1.0) / zc;
                f1 += (-4.0 - zc + ez * (4.0 - 3.0 * zc + zc * zc)) / (zc * zc * zc);
                f2 += (2.0 + zc + ez * (zc - 2.0)) / (zc * zc * zc);
                f3 += (-4.0 - 3.0 * zc - zc * zc + ez * (4.0 - zc)) / (zc * zc * zc);
            }
            q_[i] = dt_ * q.real() / contour_points;
            f1_[i] = dt_ * f1.real() / contour_points;
            f2_[i] = dt_ * f2.real() / contour_points;
            f3_[i] = dt_ * f3.real() / contour_points;
            // Two-thirds rule: keep |m| <= n/3.
            if (dealias && std::abs(m) > static_cast<long>(n_ / 3)) mask_[i] = 0.0;
        }
    }

    void physical(const std::vector<Complex>& spec) {
        work_ = spec;
        backward_.execute();
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& z : buffer_) z *= scale;
    }

    // Spectrum of -u^3, masked.
    std::vector<Complex> nonlinear(const std::vector<Complex>& spec) {
        physical(spec);
        for (auto& z : buffer_) z = -z * z * z;
        forward_.execute();
        std::vector<Complex> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = mask_[i] * work_[i];
        return out;
    }

    std::size_t n_;
    double dt_;
    double time_ = 0.0;
    std::vector<Complex> spectrum_, work_, buffer_;
    detail::FftPlan forward_, backward_;  // buffer_ -> work_, work_ -> buffer_
    std::vector<double> e_, e2_, q_, f1_, f2_, f3_, mask_;
};

/// Advances a periodic grid by one ETDRK4 step.
inline FieldGrid step_spectral(const FieldGrid& grid, const ModelParams& params, double dt,
                               bool dealias = true) {
    if (!grid.periodic) throw std::invalid_argument("step_spectral requires a periodic grid");
    SpectralStepper stepper(params.r, grid.size(), grid.length(), dt, dealias);
    stepper.set_field(grid.u);
    stepper.step();
    FieldGrid out = grid;
    out.u = stepper.field();
    return out;
}

/// Finite-difference stepper for a walled domain.  Nodes include both walls.
class BoundedStepper {
public:
    BoundedStepper(const ModelParams& params, const BoundaryForcing& forcing, std::size_t nodes,
                   double dx, double dt, double c_stab = 1.0)
        : forcing_(forcing), n_(nodes), dx_(dx), dt_(dt) {
        if (forcing.is_periodic())
            throw std::invalid_argument("BoundedStepper requires EvenGiven or OddGiven forcing");
        if (nodes < 6) throw std::invalid_argument("bounded grid needs at least six nodes");
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (dt > c_stab * dx * dx)
            throw std::invalid_argument("unstable dt: BoundedIMEX requires dt <= " +
                                        std::to_string(c_stab) + " * dx^2 = " +
                                        std::to_string(c_stab * dx * dx));
        even_ = forcing.kind == BoundaryKind::EvenGiven;
        assemble(params.r);
        full_ = factorise(dt_);
        half_ = factorise(0.5 * dt_);
    }

    /// Advances u from time t to t + dt.
    void step(std::vector<double>& u, double t) const {
        if (u.size() != n_) throw std::invalid_argument("field size does not match stepper");
        const Eigen::Map<const Eigen::VectorXd> u0(u.data(), static_cast<Eigen::Index>(n_));
        const Eigen::VectorXd coarse = euler(*full_, u0, t, dt_);
        const Eigen::VectorXd mid = euler(*half_, u0, t, 0.5 * dt_);
        const Eigen::VectorXd fine = euler(*half_, mid, t + 0.5 * dt_, 0.5 * dt_);
        const Eigen::VectorXd next = 2.0 * fine - coarse;
        for (std::size_t i = 0; i < n_; ++i) {
            u[i] = next[static_cast<Eigen::Index>(i)];
            if (!std::isfinite(u[i]))
                throw DivergenceError("bounded solver produced non-finite values at t = " +
                                      std::to_string(t + dt_));
        }
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }

private:
    using Sparse = Eigen::SparseMatrix<double>;
    using Solver = Eigen::SparseLU<Sparse>;

    // Ghost value = sum(weights * nodes) + ca * alpha_s + cb * beta_s.
    struct Ghost {
        std::vector<std::pair<std::size_t, double>> weights;
        double ca = 0.0, cb = 0.0;
    };

    Ghost ghost(long index) const {
        const double h2 = dx_ * dx_, h3 = h2 * dx_;
        const std::size_t last = n_ - 1;
        if (even_) {
            // u = alpha_s (Dirichlet row), u_xx = beta_s via reflection
            if (index == -1) return {{{0, 2.0}, {1, -1.0}}, 0.0, h2};
            if (index == static_cast<long>(n_)) return {{{last, 2.0}, {last - 1, -1.0}}, 0.0, h2};
        } else {
            // u_x = alpha_s, u_xxx = beta_s on the left; mirrored on the right
            if (index == -1) return {{{1, 1.0}}, -2.0 * dx_, 0.0};
            if (index == -2) return {{{2, 1.0}}, -4.0 * dx_, -2.0 * h3};
            if (index == static_cast<long>(n_)) return {{{last - 1, 1.0}}, -2.0 * dx_, 0.0};
            if (index == static_cast<long>(n_) + 1) return {{{last - 2, 1.0}}, -4.0 * dx_, -2.0 * h3};
        }
        throw std::logic_error("ghost index outside the stencil reach");
    }

    void assemble(double r) {
        const double i2 = 1.0 / (dx_ * dx_), i4 = i2 * i2;
        const std::array<double, 5> stencil{-i4, 4.0 * i4 - 2.0 * i2, r - 1.0 - 6.0 * i4 + 4.0 * i2,
                                            4.0 * i4 - 2.0 * i2, -i4};
        std::vector<Eigen::Triplet<double>> triplets;
        g_alpha_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        g_beta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
        const std::size_t first = even_ ? 1 : 0, stop = even_ ? n_ - 1 : n_;
        for (std::size_t i = first; i < stop; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            for (int o = -2; o <= 2; ++o) {
                const long m = static_cast<long>(i) + o;
                const double c = stencil[static_cast<std::size_t>(o + 2)];
                if (m >= 0 && m < static_cast<long>(n_)) {
                    triplets.emplace_back(row, m, c);
                } else {
                    const Ghost g = ghost(m);
                    for (const auto& [node, w] : g.weights)
                        triplets.emplace_back(row, static_cast<Eigen::Index>(node), c * w);
                    g_alpha_[row] += c * g.ca;
                    g_beta_[row] += c * g.cb;
                }
            }
        }
        linear_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        linear_.setFromTriplets(triplets.begin(), triplets.end());
    }

    std::unique_ptr<Solver> factorise(double tau) const {
        Sparse a(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        a.setIdentity();
        // Wall rows of linear_ are empty for EvenGiven, leaving identity rows
        // that pin the Dirichlet values.
        a -= tau * linear_;
        a.makeCompressed();
        auto solver = std::make_unique<Solver>();
        solver->compute(a);
        if (solver->info() != Eigen::Success)
            throw std::runtime_error("bounded solver: factorisation failed");
        return solver;
    }

    Eigen::VectorXd euler(const Solver& solver, const Eigen::VectorXd& u, double t,
                          double tau) const {
        const double ta = t + tau;
        const double alpha_s = forcing_.parity_factor * forcing_.alpha_at(ta);
        const double beta_s = forcing_.parity_factor * forcing_.beta_at(ta);
        Eigen::VectorXd rhs = u - tau * u.array().cube().matrix() +
                              tau * (alpha_s * g_alpha_ + beta_s * g_beta_);
        if (even_) {
            rhs[0] = alpha_s;
            rhs[static_cast<Eigen::Index>(n_ - 1)] = alpha_s;
        }
        return solver.solve(rhs);
    }

    BoundaryForcing forcing_;
    std::size_t n_;
    double dx_, dt_;
    bool even_ = true;
    Sparse linear_;
    Eigen::VectorXd g_alpha_, g_beta_;
    std::unique_ptr<Solver> full_, half_;
};

/// Advances a walled grid from time t by one step of size dt.
inline FieldGrid step_bounded(const FieldGrid& grid, const ModelParams& params,
                              const BoundaryForcing& forcing, double dt, double t = 0.0,
                              double c_stab = 1.0) {
    if (grid.periodic) throw std::invalid_argument("step_bounded requires a walled grid");
    BoundedStepper stepper(params, forcing, grid.size(), grid.dx, dt, c_stab);
    FieldGrid out = grid;
    stepper.step(out.u, t);
    return out;
}

/// Integrates grid from t = 0 to config.t_end with the scheme matching the
/// grid (spectral for periodic grids, finite differences otherwise).
/// observer(t, grid) sees the initial field, every `stride`-th step and the
/// final field.
template <class Observer>
FieldGrid run_direct(FieldGrid grid, const ModelParams& params, const BoundaryForcing& forcing,
                     const SolverConfig& config, std::size_t stride, Observer&& observer) {
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    if (grid.periodic != forcing.is_periodic())
        throw std::invalid_argument("grid periodicity does not match the forcing kind");
    if (!(config.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    const auto steps =
        static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
    const double dt = steps == 0 ? config.dt : config.t_end / static_cast<double>(steps);
    observer(0.0, static_cast<const FieldGrid&>(grid));
    if (grid.periodic) {
        SpectralStepper stepper(params.r, grid.size(), grid.length(), dt, config.dealias);
        stepper.set_field(grid.u);
        for (std::size_t s = 1; s <= steps; ++s) {
            stepper.step();
            if (s % stride == 0 || s == steps) {
                grid.u = stepper.field();
                observer(static_cast<double>(s) * dt, static_cast<const FieldGrid&>(grid));
            }
        }
        grid.u = stepper.field();
    } else {
        BoundedStepper stepper(params, forcing, grid.size(), grid.dx, dt, config.c_stab);
        for (std::size_t s = 1; s <= steps; ++s) {
            stepper.step(grid.u, static_cast<double>(s - 1) * dt);
            if (s % stride == 0 || s == steps)
                observer(static_cast<double>(s) * dt, static_cast<const FieldGrid&>(grid));
        }
    }
    return grid;
}

/// |(1/n) sum_i u_i e^{-i k x_i}|, the modulus of the Fourier coefficient at k.
inline double mode_amplitude(const FieldGrid& grid, double k) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) sum += grid.u[i] * std::exp(-I * (k * grid.x(i)));
    return std::abs(sum) / static_cast<double>(grid.size());
}

/// Seeds eps0*cos(k x) on the periodic element grid, integrates to T and
/// returns the least-squares slope of log|u_hat_k|(t).
inline double measure_growth_rate(const ModelParams& params, double k, double eps0, double T,
                                  double dt = 0.05) {
    if (!(eps0 > 0.0) || !(T > 0.0)) throw std::invalid_argument("eps0 and T must be positive");
    FieldGrid grid = element_grid(params, true);
    const double length = grid.length();
    const double mode = k * length / two_pi;
    if (std::abs(mode - std::round(mode)) > 1e-9)
        throw std::invalid_argument("wavenumber " + std::to_string(k) +
                                    " is not commensurate with the periodic domain");
    if (std::abs(std::round(mode)) > static_cast<double>(grid.size() / 3))
        throw std::invalid_argument("wavenumber " + std::to_string(k) +
                                    " is not resolved by the grid");
    for (std::size_t i = 0; i < grid.size(); ++i) grid.u[i] = eps0 * std::cos(k * grid.x(i));
    const double base = mode_amplitude(grid, k);

    std::vector<double> times, logs;
    SolverConfig config;
    config.dt = dt;
    config.t_end = T;
    run_direct(grid, params, BoundaryForcing::periodic(), config, 1,
               [&](double t, const FieldGrid& g) {
                   const double amp = mode_amplitude(g, k);
                   if (amp > 100.0 * base)
                       throw std::runtime_error(
                           "growth-rate probe left the linear regime; reduce eps0 or T");
                   times.push_back(t);
                   logs.push_back(std::log(amp));
               });
    return fit_slope(times, logs);
}

}  // namespace holistic
