#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thermoplate/grid.hpp"
#include "thermoplate/oracles.hpp"
#include "thermoplate/rng.hpp"

using namespace thermoplate;
namespace g = thermoplate::grid;

namespace {

g::Grid box2d(int m) {
    g::DomainSpec spec;
    spec.n2 = 2;
    spec.modes = {m, m};
    return g::Grid::from_domain(spec);
}

g::Grid mixed_grid(int mf, int ms) {
    g::DomainSpec spec;
    spec.n1 = 1;
    spec.n2 = 1;
    spec.L_r = 2.0 * kPi;
    spec.modes = {mf, ms};
    return g::Grid::from_domain(spec);
}

}  // namespace

TEST_CASE("domain validation") {
    g::DomainSpec spec;
    CHECK_THROWS_AS((void)g::Grid::from_domain(spec), ConfigInvalid);  // no directions
    spec.n2 = 1;
    spec.modes = {7};
    CHECK_THROWS_AS((void)g::Grid::from_domain(spec), ConfigInvalid);  // odd count
    spec.modes = {2};
    CHECK_THROWS_AS((void)g::Grid::from_domain(spec), ConfigInvalid);  // below 4
    spec.modes = {8, 8};
    CHECK_THROWS_AS((void)g::Grid::from_domain(spec), ConfigInvalid);  // count mismatch
    spec.modes = {8};
    CHECK(g::Grid::from_domain(spec).size() == 8);
}

TEST_CASE("single sine mode has coefficient exactly 1") {
    g::DomainSpec spec;
    spec.n2 = 1;
    spec.modes = {8};
    const g::Grid grid = g::Grid::from_domain(spec);

    g::PhysField f = g::PhysField::zeros(grid);
    for (int i = 0; i < 8; ++i) {
        f.comp[0][static_cast<std::size_t>(i)] = std::sin(grid.point_coord(0, i));
    }
    const g::CoeffField c = g::forward_transform(f);
    CHECK(std::abs(c.comp[0][0] - 1.0) <= 1e-14);
    for (std::size_t m = 1; m < 8; ++m) {
        CHECK(std::abs(c.comp[0][m]) <= 1e-14);
    }
}

TEST_CASE("sin(2x)sin(3y) gives the single coefficient (2,3)") {
    const g::Grid grid = box2d(8);
    g::PhysField f = g::PhysField::zeros(grid);
    std::vector<int> idx(2);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        g::unflatten(grid, flat, idx);
        f.comp[0][flat] = std::sin(2.0 * grid.point_coord(0, idx[0])) *
                          std::sin(3.0 * grid.point_coord(1, idx[1]));
    }
    const g::CoeffField c = g::forward_transform(f);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        g::unflatten(grid, flat, idx);
        const double want = (idx[0] == 1 && idx[1] == 2) ? 1.0 : 0.0;
        CHECK(std::abs(c.comp[0][flat] - want) <= 1e-13);
    }
}

TEST_CASE("round trip against the dense summation oracle on an 8x8 mixed grid") {
    const g::Grid grid = mixed_grid(8, 8);
    const CounterRng rng(42);
    g::PhysField f = g::PhysField::zeros(grid);
    double scale = 0.0;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f.comp[static_cast<std::size_t>(c)][i] = rng.uniform_sym(c, i);
            scale = std::max(scale, std::abs(f.comp[static_cast<std::size_t>(c)][i]));
        }
    }
    const g::CoeffField coeffs = g::forward_transform(f);
    const g::PhysField back = g::inverse_transform(coeffs);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(back.comp[static_cast<std::size_t>(c)][i] -
                           f.comp[static_cast<std::size_t>(c)][i]) <= 1e-12 * scale);
        }
    }
    // Independent route: dense evaluation of the coefficient sum.
    const std::vector<double> dense = oracles::dense_inverse(grid, coeffs.comp[0]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(dense[i] - f.comp[0][i]) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("inverse of a hermitian-symmetrized coefficient field is real") {
    const g::Grid grid = mixed_grid(8, 6);
    const CounterRng rng(7);
    std::vector<cx> coeffs(grid.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = rng.complex_sym(0, i);
    }
    coeffs = g::hermitian_symmetrize(grid, coeffs);
    const std::vector<cx> vals = g::scalar_inverse_complex(grid, coeffs);
    for (const auto& v : vals) {
        CHECK(std::abs(v.imag()) <= 1e-12);
    }
}

TEST_CASE("laplacian symbol values") {
    {
        g::DomainSpec spec;
        spec.n2 = 1;
        spec.modes = {8};
        const g::Grid grid = g::Grid::from_domain(spec);
        CHECK(g::laplacian_symbol(grid, 0) == 1.0);  // k = 1
    }
    {
        const g::Grid grid = box2d(8);
        std::vector<int> idx = {1, 2};  // k = (2, 3)
        const auto st = g::strides(grid);
        CHECK(g::laplacian_symbol(grid, idx[0] * st[0] + idx[1] * st[1]) == 13.0);
        // Any (0,pi)-direction forces |zeta|^2 >= 1.
        double zmin = 1e300;
        for (std::size_t m = 0; m < grid.size(); ++m) {
            zmin = std::min(zmin, g::laplacian_symbol(grid, m));
        }
        CHECK(zmin >= 1.0);
    }
    {
        g::DomainSpec spec;
        spec.n1 = 1;
        spec.L_r = 2.0 * kPi;
        spec.modes = {16};
        const g::Grid grid = g::Grid::from_domain(spec);
        CHECK(g::laplacian_symbol(grid, 5) == 25.0);  // index 5 on L = 2 pi
        CHECK(g::has_zero_mode(grid));
        CHECK(g::laplacian_symbol(grid, 0) == 0.0);
    }
}

TEST_CASE("Parseval: physical quadrature matches weighted coefficients") {
    const g::Grid grid = mixed_grid(8, 8);
    const CounterRng rng(11);
    g::PhysField f = g::PhysField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f.comp[static_cast<std::size_t>(c)][i] = rng.uniform_sym(c, i);
        }
    }
    const double phys = g::phys_lp_norm(f, 2.0);
    const double coeff = g::coeff_l2_norm(g::forward_transform(f));
    CHECK(phys == doctest::Approx(coeff).epsilon(1e-10));
}

TEST_CASE("lp norms: refined quadrature is exact for band-limited fields") {
    const g::Grid grid = box2d(8);
    const CounterRng rng(13);
    g::CoeffField c = g::CoeffField::zeros(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        c.comp[0][i] = rng.uniform_sym(0, i);
        c.comp[1][i] = rng.uniform_sym(1, i);
        c.comp[2][i] = rng.uniform_sym(2, i);
    }
    CHECK(g::lp_norm(c, 2.0, 1) == doctest::Approx(g::lp_norm(c, 2.0, 3)).epsilon(1e-12));
    CHECK(g::lp_norm(c, 4.0, 2) == doctest::Approx(g::lp_norm(c, 4.0, 4)).epsilon(1e-12));
}

TEST_CASE("pad and truncate are mutually inverse") {
    const g::Grid grid = mixed_grid(8, 6);
    const CounterRng rng(17);
    std::vector<cx> coeffs(grid.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = rng.complex_sym(0, i);
    const g::Grid big = g::refined_grid(grid, 2);
    const std::vector<cx> padded = g::pad_coeffs(grid, coeffs, 2);
    const std::vector<cx> back = g::truncate_coeffs(big, padded, grid);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        CHECK(back[i] == coeffs[i]);
    }
}

TEST_CASE("dirichlet inverse laplacian") {
    const g::Grid grid = box2d(8);
    g::ScalarCoeff f = g::ScalarCoeff::zeros(grid);
    f.values[0] = -2.0;  // coefficients of -2 sin x sin y; |zeta|^2 = 2
    const g::ScalarCoeff u = g::dirichlet_inverse_laplacian(f);
    CHECK(std::abs(u.values[0] - 1.0) <= 1e-15);

    const g::ScalarCoeff zero = g::dirichlet_inverse_laplacian(g::ScalarCoeff::zeros(grid));
    for (const auto& v : zero.values) CHECK(v == cx(0.0, 0.0));

    // Exact inverse of the mode-wise Laplacian action.
    const CounterRng rng(19);
    g::ScalarCoeff r = g::ScalarCoeff::zeros(grid);
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = rng.complex_sym(0, i);
    const g::ScalarCoeff lap = g::apply_laplacian(g::dirichlet_inverse_laplacian(r));
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        CHECK(std::abs(lap.values[i] - r.values[i]) <= 1e-12);
    }
}

TEST_CASE("zero-mode handling in a pure-Fourier setup") {
    g::DomainSpec spec;
    spec.n1 = 1;
    spec.modes = {8};
    const g::Grid grid = g::Grid::from_domain(spec);
    const CounterRng rng(23);
    g::ScalarCoeff f = g::ScalarCoeff::zeros(grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = rng.complex_sym(0, i);

    CHECK_THROWS_AS((void)g::dirichlet_inverse_laplacian(f), ZeroModeNotInvertible);
    f.values[0] = 0.0;  // zero mean
    CHECK_NOTHROW((void)g::dirichlet_inverse_laplacian(f));
}

TEST_CASE("shape mismatches are rejected") {
    const g::Grid grid = box2d(8);
    std::vector<double> wrong(grid.size() + 1, 0.0);
    CHECK_THROWS_AS((void)g::scalar_forward(grid, wrong), ShapeMismatch);
    std::vector<cx> wrong_c(grid.size() - 1);
    CHECK_THROWS_AS((void)g::scalar_inverse(grid, wrong_c), ShapeMismatch);
}
