#pragma once

// Shared domain types and lattice stencils for the roll-amplitude model.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace holistic {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

/// Raised when a time integrator produces non-finite values.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model parameters.  Element width h holds exactly p rolls of the critical
/// wavelength 2*pi.
struct ModelParams {
    double r = 0.0;          // bifurcation parameter
    double gamma = 1.0;      // inter-element coupling; 1 is the physical model
    int p = 1;               // roll periods per element
    double h = two_pi;       // element width, 2*pi*p
    std::size_t n_elements = 2;
    std::size_t m_samples = 32;  // field samples per element

    /// (-1)^p, the value of cos(x) at an element edge.
    [[nodiscard]] double parity() const noexcept { return (p % 2 == 0) ? 1.0 : -1.0; }
    [[nodiscard]] double dx() const noexcept { return h / static_cast<double>(m_samples); }
    [[nodiscard]] double domain_length() const noexcept {
        return h * static_cast<double>(n_elements);
    }
};

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// Validated construction of ModelParams.  Throws std::invalid_argument.
inline ModelParams make_params(double r, double gamma, int p, std::size_t n_elements,
                               std::size_t m_samples) {
    if (!std::isfinite(r)) throw std::invalid_argument("r must be finite");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gamma must lie in [0, 1], got " + std::to_string(gamma));
    if (p < 1) throw std::invalid_argument("p must be a positive integer");
    if (n_elements < 2)
        throw std::invalid_argument("n_elements must be at least 2 (stencils need a neighbour)");
    if (m_samples < 16 || !is_power_of_two(m_samples))
        throw std::invalid_argument("m_samples must be a power of two and at least 16, got " +
                                    std::to_string(m_samples));
    ModelParams params;
    params.r = r;
    params.gamma = gamma;
    params.p = p;
    params.h = two_pi * static_cast<double>(p);
    params.n_elements = n_elements;
    params.m_samples = m_samples;
    return params;
}

/// Complex roll amplitudes: u ~ a_j e^{ix} + b_j e^{-ix} in element j.
struct AmplitudeState {
    double t = 0.0;
    ComplexVector a;
    ComplexVector b;

    [[nodiscard]] std::size_t size() const noexcept { return a.size(); }

    /// State of a real field: b = conj(a).
    static AmplitudeState real_sector(double t, ComplexVector a) {
        AmplitudeState s;
        s.t = t;
        s.b.reserve(a.size());
        for (const auto& v : a) s.b.push_back(std::conj(v));
        s.a = std::move(a);
        return s;
    }

    static AmplitudeState zero(std::size_t n, double t = 0.0) {
        return AmplitudeState{t, ComplexVector(n), ComplexVector(n)};
    }
};

/// Uniform samples of u(x, t).
///
/// Periodic grids hold n samples with u[0] at x0 and wrap at x0 + n*dx.
/// Bounded grids hold both end points, so an element-aligned bounded grid
/// has n_elements * m_samples + 1 samples.
struct FieldGrid {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<double> u;
    bool periodic = true;

    [[nodiscard]] double x(std::size_t i) const noexcept {
        return x0 + dx * static_cast<double>(i);
    }
    [[nodiscard]] std::size_t size() const noexcept { return u.size(); }
    [[nodiscard]] double length() const noexcept {
        return periodic ? dx * static_cast<double>(u.size())
                        : dx * static_cast<double>(u.size() - 1);
    }
};

/// Zero field on the element-aligned grid whose left edge (or left wall)
/// sits at x0 = -h/2, so element centres fall on multiples of h.
inline FieldGrid element_grid(const ModelParams& params, bool periodic) {
    FieldGrid grid;
    grid.x0 = -0.5 * params.h;
    grid.dx = params.dx();
    grid.periodic = periodic;
    grid.u.assign(params.n_elements * params.m_samples + (periodic ? 0 : 1), 0.0);
    return grid;
}

enum class BoundaryKind { Periodic, EvenGiven, OddGiven };

inline std::string to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::Periodic: return "periodic";
        case BoundaryKind::EvenGiven: return "even";
        case BoundaryKind::OddGiven: return "odd";
    }
    return "unknown";
}

using TimeSignal = std::function<double(double)>;

inline TimeSignal constant_signal(double value) {
    return [value](double) { return value; };
}

/// Physical boundary data.  EvenGiven prescribes u = parity*alpha and
/// u_xx = parity*beta at the wall; OddGiven prescribes u_x and u_xxx.
/// The right wall carries the mirror image of the left condition.
struct BoundaryForcing {
    BoundaryKind kind = BoundaryKind::Periodic;
    TimeSignal alpha;
    TimeSignal beta;
    double parity_factor = 1.0;

    static BoundaryForcing periodic() { return {}; }

    static BoundaryForcing walls(BoundaryKind kind, const ModelParams& params, TimeSignal alpha,
                                 TimeSignal beta) {
        if (kind == BoundaryKind::Periodic)
            throw std::invalid_argument("periodic forcing carries no boundary signals");
        return {kind, std::move(alpha), std::move(beta), params.parity()};
    }

    static BoundaryForcing even(const ModelParams& params, double alpha = 0.0, double beta = 0.0) {
        return walls(BoundaryKind::EvenGiven, params, constant_signal(alpha), constant_signal(beta));
    }

    static BoundaryForcing odd(const ModelParams& params, double alpha = 0.0, double beta = 0.0) {
        return walls(BoundaryKind::OddGiven, params, constant_signal(alpha), constant_signal(beta));
    }

    [[nodiscard]] bool is_periodic() const noexcept { return kind == BoundaryKind::Periodic; }
    [[nodiscard]] double alpha_at(double t) const { return alpha ? alpha(t) : 0.0; }
    [[nodiscard]] double beta_at(double t) const { return beta ? beta(t) : 0.0; }
};

enum class Topology { Periodic, Bounded };

inline Topology topology_of(const BoundaryForcing& forcing) noexcept {
    return forcing.is_periodic() ? Topology::Periodic : Topology::Bounded;
}

namespace detail {

inline std::size_t wrap_index(std::ptrdiff_t j, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((j % m) + m) % m);
}

struct Neighbours {
    std::size_t left, right;
};

inline Neighbours neighbours(std::size_t n, std::size_t j, Topology topology) {
    if (j >= n) throw std::out_of_range("lattice index out of range");
    if (topology == Topology::Periodic) {
        if (n < 2) throw std::out_of_range("periodic stencil needs at least two sites");
        return {wrap_index(static_cast<std::ptrdiff_t>(j) - 1, n), (j + 1) % n};
    }
    if (j == 0 || j + 1 >= n)
        throw std::out_of_range("index " + std::to_string(j) +
                                " has no neighbour on a bounded lattice");
    return {j - 1, j + 1};
}

}  // namespace detail

// Lattice indices are zero based.  Bounded lattices require 1 <= j <= n-2.

/// v[j+1] - 2 v[j] + v[j-1]
inline Complex second_difference(std::span<const Complex> v, std::size_t j,
                                 Topology topology = Topology::Bounded) {
    const auto [l, r] = detail::neighbours(v.size(), j, topology);
    return v[r] - 2.0 * v[j] + v[l];
}

/// (v[j+1] - v[j-1]) / 2
inline Complex mean_difference(std::span<const Complex> v, std::size_t j,
                               Topology topology = Topology::Bounded) {
    const auto [l, r] = detail::neighbours(v.size(), j, topology);
    return 0.5 * (v[r] - v[l]);
}

/// Euclidean norm of a complex lattice.
inline double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_slope needs at least two paired samples");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope needs distinct abscissae");
    return sxy / sxx;
}

}  // namespace holistic
