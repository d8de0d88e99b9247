#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thermoplate/backtransform.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"
#include "thermoplate/nonlinear.hpp"
#include "thermoplate/rng.hpp"

using namespace thermoplate;
namespace g = thermoplate::grid;
namespace bt = thermoplate::backtransform;
namespace lin = thermoplate::linear;

namespace {

g::Grid box2d(int m) {
    g::DomainSpec spec;
    spec.n2 = 2;
    spec.modes = {m, m};
    return g::Grid::from_domain(spec);
}

g::CoeffField smooth_field(const g::Grid& grid, std::uint64_t seed, double amp, double decay) {
    const CounterRng rng(seed);
    g::CoeffField f = g::CoeffField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double zabs = std::sqrt(g::laplacian_symbol(grid, i));
            f.comp[static_cast<std::size_t>(c)][i] =
                amp * rng.uniform_sym(c, i) * std::exp(-decay * zabs);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("recover: inverse Laplacian route and trivial cases") {
    const g::Grid grid = box2d(8);
    g::CoeffField state = g::CoeffField::zeros(grid);
    state.comp[0][0] = -2.0;  // Delta u = -2 sin x sin y
    state.comp[1][0] = 0.3;
    state.comp[2][0] = -0.9;
    const bt::Recovered rec = bt::recover(state);
    CHECK(std::abs(rec.u.values[0] - 1.0) <= 1e-15);  // u = sin x sin y
    CHECK(rec.u_t.values[0] == cx(0.3, 0.0));
    CHECK(rec.theta.values[0] == cx(-0.9, 0.0));

    // Consistency: the Laplacian symbol applied to u returns U_1.
    const g::ScalarCoeff back = g::apply_laplacian(rec.u);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(back.values[i] - state.comp[0][i]) <= 1e-12);
    }

    const bt::Recovered zero = bt::recover(g::CoeffField::zeros(grid));
    for (const auto& v : zero.u.values) CHECK(v == cx(0.0, 0.0));
}

TEST_CASE("recover propagates the zero-mode error") {
    g::DomainSpec spec;
    spec.n1 = 1;
    spec.modes = {8};
    const g::Grid grid = g::Grid::from_domain(spec);
    g::CoeffField state = g::CoeffField::zeros(grid);
    state.comp[0][0] = 1.0;  // energy on the zero frequency
    CHECK_THROWS_AS((void)bt::recover(state), ZeroModeNotInvertible);
}

TEST_CASE("time derivative of recovered u matches U_2 at second order") {
    const g::Grid grid = box2d(8);
    const g::CoeffField u0 = smooth_field(grid, 51, 0.4, 0.6);

    auto max_mismatch = [&](int steps) {
        const lin::Trajectory traj = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.2, steps});
        const bt::RecoveredTrajectory rec = bt::recover_trajectory(traj);
        const double dt = traj.time.dt();
        double worst = 0.0;
        for (std::size_t n = 1; n + 1 < rec.u.size(); ++n) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const cx fd = (rec.u[n + 1].values[i] - rec.u[n - 1].values[i]) / (2.0 * dt);
                worst = std::max(worst, std::abs(fd - rec.u_t[n].values[i]));
            }
        }
        return worst;
    };
    const double coarse = max_mismatch(50);
    const double fine = max_mismatch(100);
    CHECK(coarse / fine >= 2.7);
    CHECK(fine <= 1e-4);
}

TEST_CASE("manufactured forcing fed back exactly gives round-off residuals") {
    const g::Grid grid = box2d(8);
    const double a = 1.3;
    const lin::TimeGrid tg{0.3, 12};
    const CounterRng rng(57);

    // Arbitrary smooth trajectories for (u, u_t, theta).
    bt::RecoveredTrajectory traj;
    traj.space = grid;
    traj.time = tg;
    for (int n = 0; n <= tg.n_steps; ++n) {
        const double t = tg.node(n);
        g::ScalarCoeff u = g::ScalarCoeff::zeros(grid);
        g::ScalarCoeff ut = g::ScalarCoeff::zeros(grid);
        g::ScalarCoeff th = g::ScalarCoeff::zeros(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double zabs = std::sqrt(g::laplacian_symbol(grid, i));
            const double w = std::exp(-0.8 * zabs);
            u.values[i] = w * rng.uniform_sym(1, i) * std::exp(-t);
            ut.values[i] = w * rng.uniform_sym(2, i) * std::cos(t);
            th.values[i] = w * rng.uniform_sym(3, i) * std::exp(-2.0 * t);
        }
        traj.u.push_back(std::move(u));
        traj.u_t.push_back(std::move(ut));
        traj.theta.push_back(std::move(th));
    }

    // Compute (g, h) with the same discrete operators the residual uses.
    const double dt = tg.dt();
    std::vector<g::ScalarCoeff> gf, hf;
    for (std::size_t n = 0; n < traj.u.size(); ++n) {
        const std::size_t last = traj.u.size() - 1;
        g::ScalarCoeff gn = g::ScalarCoeff::zeros(grid);
        g::ScalarCoeff hn = g::ScalarCoeff::zeros(grid);
        std::vector<cx> delta_u(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            delta_u[i] = -g::laplacian_symbol(grid, i) * traj.u[n].values[i];
        }
        const std::vector<cx> cube = nonlinear::dealiased_cube(grid, delta_u, 2);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double zsq = g::laplacian_symbol(grid, i);
            cx utt, tht;
            if (n == 0) {
                utt = (traj.u_t[1].values[i] - traj.u_t[0].values[i]) / dt;
                tht = (traj.theta[1].values[i] - traj.theta[0].values[i]) / dt;
            } else if (n == last) {
                utt = (traj.u_t[last].values[i] - traj.u_t[last - 1].values[i]) / dt;
                tht = (traj.theta[last].values[i] - traj.theta[last - 1].values[i]) / dt;
            } else {
                utt = (traj.u_t[n + 1].values[i] - traj.u_t[n - 1].values[i]) / (2.0 * dt);
                tht = (traj.theta[n + 1].values[i] - traj.theta[n - 1].values[i]) / (2.0 * dt);
            }
            gn.values[i] = utt + zsq * zsq * traj.u[n].values[i] -
                           zsq * traj.theta[n].values[i] - a * zsq * cube[i];
            hn.values[i] = tht + zsq * traj.theta[n].values[i] + zsq * traj.u_t[n].values[i];
        }
        gf.push_back(std::move(gn));
        hf.push_back(std::move(hn));
    }

    const bt::ResidualSeries res = bt::residual_original(traj, gf, hf, a);
    for (std::size_t n = 0; n < res.r1.size(); ++n) {
        CHECK(res.r1[n] <= 1e-12);
        CHECK(res.r2[n] <= 1e-12);
    }
}

TEST_CASE("converged linear run satisfies the original system at second order") {
    const g::Grid grid = box2d(16);
    g::CoeffField u0 = g::CoeffField::zeros(grid);
    const auto st = g::strides(grid);
    const CounterRng rng(61);
    for (int k1 = 1; k1 <= 2; ++k1) {
        for (int k2 = 1; k2 <= 2; ++k2) {
            const std::size_t flat = static_cast<std::size_t>(k1 - 1) * st[0] +
                                     static_cast<std::size_t>(k2 - 1) * st[1];
            // Small low-mode amplitudes keep the centered-difference error
            // of u_tt inside the 1e-6 budget at dt = 1e-3.
            for (int c = 0; c < 3; ++c) {
                u0.comp[static_cast<std::size_t>(c)][flat] =
                    0.01 * rng.uniform_sym(c, flat) / (k1 * k1 * k2 * k2);
            }
        }
    }
    auto interior_max = [](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t n = 1; n + 1 < v.size(); ++n) m = std::max(m, v[n]);
        return m;
    };
    auto residual = [&](int steps) {
        const lin::Trajectory traj = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.25, steps});
        const bt::ResidualSeries res =
            bt::residual_original(bt::recover_trajectory(traj), {}, {}, 0.0);
        return std::max(interior_max(res.r1), interior_max(res.r2));
    };
    const double coarse = residual(125);
    const double fine = residual(250);
    CHECK(fine <= 1e-6);
    CHECK(coarse / fine >= 2.7);
}

TEST_CASE("shape validation") {
    const g::Grid grid = box2d(8);
    bt::RecoveredTrajectory traj;
    traj.space = grid;
    traj.time = lin::TimeGrid{0.1, 2};
    traj.u.assign(3, g::ScalarCoeff::zeros(grid));
    traj.u_t.assign(2, g::ScalarCoeff::zeros(grid));
    traj.theta.assign(3, g::ScalarCoeff::zeros(grid));
    CHECK_THROWS_AS((void)bt::residual_original(traj, {}, {}, 1.0), ShapeMismatch);
}
