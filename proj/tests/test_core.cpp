#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "holistic/core.hpp"

using namespace holistic;

namespace {

ComplexVector random_lattice(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ComplexVector v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    return v;
}

}  // namespace

TEST(MakeParams, ComputesElementWidth) {
    const auto p1 = make_params(0.0, 1.0, 1, 8, 32);
    EXPECT_DOUBLE_EQ(p1.h, 2.0 * M_PI);
    EXPECT_EQ(p1.n_elements, 8u);
    EXPECT_DOUBLE_EQ(p1.parity(), -1.0);

    const auto p2 = make_params(0.1, 1.0, 2, 4, 64);
    EXPECT_DOUBLE_EQ(p2.h, 4.0 * M_PI);
    EXPECT_DOUBLE_EQ(p2.parity(), 1.0);
    EXPECT_DOUBLE_EQ(p2.dx(), 4.0 * M_PI / 64.0);
}

TEST(MakeParams, RejectsInvalidInput) {
    EXPECT_THROW(make_params(0.0, 1.5, 1, 8, 32), std::invalid_argument);
    EXPECT_THROW(make_params(0.0, -0.1, 1, 8, 32), std::invalid_argument);
    EXPECT_THROW(make_params(0.0, 1.0, 0, 8, 32), std::invalid_argument);
    EXPECT_THROW(make_params(0.0, 1.0, 1, 1, 32), std::invalid_argument);
    EXPECT_THROW(make_params(0.0, 1.0, 1, 8, 48), std::invalid_argument);
    EXPECT_THROW(make_params(0.0, 1.0, 1, 8, 8), std::invalid_argument);
    EXPECT_THROW(make_params(std::nan(""), 1.0, 1, 8, 32), std::invalid_argument);
}

TEST(ElementGrid, SizesAndOrigin) {
    const auto params = make_params(0.0, 1.0, 1, 4, 16);
    const auto periodic = element_grid(params, true);
    EXPECT_EQ(periodic.size(), 64u);
    EXPECT_DOUBLE_EQ(periodic.x0, -M_PI);
    EXPECT_NEAR(periodic.length(), 8.0 * M_PI, 1e-12);
    const auto walled = element_grid(params, false);
    EXPECT_EQ(walled.size(), 65u);
    EXPECT_NEAR(walled.x(64), 7.0 * M_PI, 1e-12);
}

TEST(BoundaryForcing, ParityFollowsP) {
    const auto odd_p = make_params(0.0, 1.0, 3, 4, 16);
    EXPECT_DOUBLE_EQ(BoundaryForcing::even(odd_p, 0.1).parity_factor, -1.0);
    const auto even_p = make_params(0.0, 1.0, 2, 4, 16);
    EXPECT_DOUBLE_EQ(BoundaryForcing::odd(even_p).parity_factor, 1.0);

    const auto periodic = BoundaryForcing::periodic();
    EXPECT_FALSE(periodic.alpha);
    EXPECT_FALSE(periodic.beta);
    EXPECT_THROW(BoundaryForcing::walls(BoundaryKind::Periodic, odd_p, constant_signal(0.0),
                                        constant_signal(0.0)),
                 std::invalid_argument);
}

TEST(Stencils, WorkedExamples) {
    const ComplexVector ones{1.0, 1.0, 1.0}, step{0.0, 0.0, 1.0}, grow{1.0, 2.0, 4.0};
    EXPECT_EQ(second_difference(ones, 1), Complex(0.0));
    EXPECT_EQ(second_difference(step, 1), Complex(1.0));
    EXPECT_EQ(second_difference(grow, 1), Complex(1.0));
    EXPECT_EQ(mean_difference(ones, 1), Complex(0.0));
    EXPECT_EQ(mean_difference(step, 1), Complex(0.5));
    EXPECT_EQ(mean_difference(grow, 1), Complex(1.5));
}

TEST(Stencils, BoundedIndexWithoutNeighbourThrows) {
    const ComplexVector v{1.0, 2.0, 4.0};
    EXPECT_THROW(second_difference(v, 0), std::out_of_range);
    EXPECT_THROW(mean_difference(v, 2), std::out_of_range);
    EXPECT_THROW(second_difference(v, 3, Topology::Periodic), std::out_of_range);
}

TEST(Stencils, PeriodicWrap) {
    const ComplexVector v{1.0, 2.0, 4.0};
    EXPECT_EQ(second_difference(v, 0, Topology::Periodic), Complex(4.0 - 2.0 + 2.0));
    EXPECT_EQ(mean_difference(v, 2, Topology::Periodic), Complex(0.5 * (1.0 - 2.0)));
}

TEST(Stencils, Linearity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto u = random_lattice(rng, 9), v = random_lattice(rng, 9);
        const Complex al{0.3, -1.2}, be{-0.7, 0.4};
        ComplexVector w(9);
        for (std::size_t i = 0; i < 9; ++i) w[i] = al * u[i] + be * v[i];
        for (std::size_t j = 0; j < 9; ++j) {
            const auto lhs2 = second_difference(w, j, Topology::Periodic);
            const auto rhs2 = al * second_difference(u, j, Topology::Periodic) +
                              be * second_difference(v, j, Topology::Periodic);
            EXPECT_LT(std::abs(lhs2 - rhs2), 1e-14);
            const auto lhs1 = mean_difference(w, j, Topology::Periodic);
            const auto rhs1 = al * mean_difference(u, j, Topology::Periodic) +
                              be * mean_difference(v, j, Topology::Periodic);
            EXPECT_LT(std::abs(lhs1 - rhs1), 1e-14);
        }
    }
}

TEST(Stencils, PlaneWaveSymbols) {
    const double h = 2.0 * M_PI;
    for (double kappa : {0.01, 0.05, 0.13, 0.31}) {
        ComplexVector v(12);
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = std::exp(I * (kappa * static_cast<double>(j) * h));
        for (std::size_t j = 1; j + 1 < v.size(); ++j) {
            EXPECT_LT(std::abs(second_difference(v, j) / v[j] - (2.0 * std::cos(kappa * h) - 2.0)),
                      1e-12);
            EXPECT_LT(std::abs(mean_difference(v, j) / v[j] - I * std::sin(kappa * h)), 1e-12);
        }
    }
}

TEST(FitSlope, RecoversLine) {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.5, 6.0, 8.5};
    EXPECT_NEAR(fit_slope(x, y), 2.5, 1e-14);
    const std::vector<double> one{1.0};
    EXPECT_THROW(fit_slope(one, one), std::invalid_argument);
}
