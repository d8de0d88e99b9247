#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"
#include "thermoplate/oracles.hpp"
#include "thermoplate/rng.hpp"
#include "thermoplate/symbol.hpp"

using namespace thermoplate;
namespace g = thermoplate::grid;
namespace lin = thermoplate::linear;

namespace {

g::Grid box2d(int m) {
    g::DomainSpec spec;
    spec.n2 = 2;
    spec.modes = {m, m};
    return g::Grid::from_domain(spec);
}

g::CoeffField single_mode_field(const g::Grid& grid, int k1, int k2, const Vec3& v) {
    g::CoeffField f = g::CoeffField::zeros(grid);
    const auto st = g::strides(grid);
    const std::size_t flat = static_cast<std::size_t>(k1 - 1) * st[0] +
                             static_cast<std::size_t>(k2 - 1) * st[1];
    f.comp[0][flat] = v[0];
    f.comp[1][flat] = v[1];
    f.comp[2][flat] = v[2];
    return f;
}

double field_max_diff(const g::CoeffField& a, const g::CoeffField& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < a.comp[static_cast<std::size_t>(c)].size(); ++i) {
            m = std::max(m, std::abs(a.comp[static_cast<std::size_t>(c)][i] -
                                     b.comp[static_cast<std::size_t>(c)][i]));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("propagate_mode trivial cases are exact") {
    const Vec3 u0 = {cx(0.3, 0.1), cx(-0.2, 0.4), cx(0.9, 0.0)};
    const std::vector<double> zeta = {1.0, 2.0};
    const Vec3 at_zero_time = lin::propagate_mode(u0, zeta, 0.0);
    const Vec3 at_zero_freq = lin::propagate_mode(u0, std::vector<double>{0.0, 0.0}, 7.5);
    for (int i = 0; i < 3; ++i) {
        CHECK(at_zero_time[static_cast<std::size_t>(i)] == u0[static_cast<std::size_t>(i)]);
        CHECK(at_zero_freq[static_cast<std::size_t>(i)] == u0[static_cast<std::size_t>(i)]);
    }
    CHECK_THROWS_AS((void)lin::propagate_mode(u0, zeta, -0.1), PreconditionViolated);
}

TEST_CASE("propagate_mode matches the matrix exponential oracle") {
    const CounterRng rng(99);
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        const Vec3 u0 = {rng.complex_sym(1, 3 * s), rng.complex_sym(1, 3 * s + 1),
                         rng.complex_sym(1, 3 * s + 2)};
        const double zsq = std::pow(10.0, -1.0 + 2.0 * rng.uniform01(2, s));
        const double t = 0.3 * rng.uniform01(3, s) + 1e-3;
        const Vec3 got = lin::propagate_mode_sq(u0, zsq, t);
        const Vec3 want = oracles::expm(symbol::coupling_matrix() * cx(-t * zsq, 0.0)) * u0;
        Vec3 d;
        for (int i = 0; i < 3; ++i) {
            d[static_cast<std::size_t>(i)] =
                got[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)];
        }
        worst = std::max(worst, norm2(d) / std::max(norm2(want), 1e-300));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("solve_linear with F = 0 equals the mode propagator at every node") {
    const g::Grid grid = box2d(8);
    const g::CoeffField u0 = single_mode_field(grid, 2, 3, {1.0, cx(0.0, 0.5), -0.3});
    const lin::TimeGrid tg{0.4, 16};
    const lin::Trajectory traj = lin::solve_linear_core(u0, {}, tg);
    const double zsq = 13.0;
    const auto st = g::strides(grid);
    const std::size_t flat = 1 * st[0] + 2 * st[1];
    for (int n = 0; n <= 16; ++n) {
        const Vec3 want = lin::propagate_mode_sq({1.0, cx(0.0, 0.5), -0.3}, zsq, tg.node(n));
        const auto& node = traj.nodes[static_cast<std::size_t>(n)];
        const Vec3 got = {node.comp[0][flat], node.comp[1][flat], node.comp[2][flat]};
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(got[static_cast<std::size_t>(i)] -
                           want[static_cast<std::size_t>(i)]) <= 1e-13);
        }
    }
}

TEST_CASE("semigroup property of the F = 0 solve") {
    const g::Grid grid = box2d(8);
    const CounterRng rng(3);
    g::CoeffField u0 = g::CoeffField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u0.comp[static_cast<std::size_t>(c)][i] =
                rng.uniform_sym(c, i) * std::exp(-0.5 * std::sqrt(g::laplacian_symbol(grid, i)));
        }
    }
    const lin::Trajectory full = lin::solve_linear_core(u0, {}, lin::TimeGrid{1.0, 10});
    const lin::Trajectory first = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.4, 4});
    const lin::Trajectory second =
        lin::solve_linear_core(first.nodes.back(), {}, lin::TimeGrid{0.6, 6});
    CHECK(field_max_diff(second.nodes.back(), full.nodes.back()) <= 1e-11);
}

TEST_CASE("constant forcing converges to the steady state") {
    const g::Grid grid = box2d(8);
    const g::CoeffField f_hat = single_mode_field(grid, 1, 2, {0.0, 1.0, 0.4});
    const g::CoeffField u_inf = lin::steady_state(f_hat);

    // 3x3 solve oracle: u = (|zeta|^2 M)^{-1} f with the explicit inverse.
    {
        const auto st = g::strides(grid);
        const std::size_t flat = 0 * st[0] + 1 * st[1];
        const double zsq = 5.0;
        const Vec3 want = symbol::coupling_matrix_inverse() *
                          Vec3{0.0, cx(1.0 / zsq, 0.0), cx(0.4 / zsq, 0.0)};
        CHECK(std::abs(u_inf.comp[0][flat] - want[0]) <= 1e-14);
        CHECK(std::abs(u_inf.comp[1][flat] - want[1]) <= 1e-14);
        CHECK(std::abs(u_inf.comp[2][flat] - want[2]) <= 1e-14);
    }

    const lin::TimeGrid tg{20.0, 400};
    std::vector<g::CoeffField> forcing(static_cast<std::size_t>(tg.n_nodes()), f_hat);
    const lin::Trajectory traj = lin::solve_linear_core(g::CoeffField::zeros(grid), forcing, tg);
    CHECK(field_max_diff(traj.nodes.back(), u_inf) <= 1e-8);

    g::CoeffField bad = f_hat;
    bad.grid = grid;
    CHECK_NOTHROW((void)lin::steady_state(bad));
}

TEST_CASE("running to steady state stops on the U_t criterion") {
    const g::Grid grid = box2d(8);
    const g::CoeffField f_hat = single_mode_field(grid, 1, 1, {0.0, 0.8, 0.3});
    const g::CoeffField u0 = single_mode_field(grid, 2, 2, {0.5, 0.0, 0.2});
    const auto [traj, steady] = lin::solve_to_steady_state(u0, f_hat, 0.05, 400.0);
    CHECK(steady);
    CHECK(traj.time.t_end < 400.0);  // stopped well before the cap
    CHECK(field_max_diff(traj.nodes.back(), lin::steady_state(f_hat)) <= 1e-9);

    // A cap too short to converge reports failure honestly.
    const auto [short_traj, reached] = lin::solve_to_steady_state(u0, f_hat, 0.05, 0.2);
    CHECK_FALSE(reached);
    CHECK(short_traj.nodes.size() == 5);
}

TEST_CASE("manufactured linear solution: second order in the step count") {
    const g::Grid grid = box2d(8);
    const Vec3 v = {0.004, -0.003, 0.002};
    const double zsq = 2.0;
    const Mat3 m = symbol::coupling_matrix();

    auto run_err = [&](int steps) {
        const lin::TimeGrid tg{0.25, steps};
        std::vector<g::CoeffField> forcing;
        std::vector<g::CoeffField> expect;
        for (int n = 0; n <= steps; ++n) {
            const double t = tg.node(n);
            // F = U_t + A U for U = e^{-t} v on mode (1,1).
            const Vec3 mv = m * v;
            Vec3 f;
            for (int i = 0; i < 3; ++i) {
                f[static_cast<std::size_t>(i)] =
                    std::exp(-t) * (-v[static_cast<std::size_t>(i)] +
                                    zsq * mv[static_cast<std::size_t>(i)]);
            }
            forcing.push_back(single_mode_field(grid, 1, 1, f));
            Vec3 u;
            for (int i = 0; i < 3; ++i) {
                u[static_cast<std::size_t>(i)] = std::exp(-t) * v[static_cast<std::size_t>(i)];
            }
            expect.push_back(single_mode_field(grid, 1, 1, u));
        }
        const lin::Trajectory traj =
            lin::solve_linear_core(expect.front(), forcing, tg);
        double err = 0.0;
        for (std::size_t n = 0; n < traj.nodes.size(); ++n) {
            err = std::max(err, field_max_diff(traj.nodes[n], expect[n]));
        }
        return err;
    };
    const double e64 = run_err(64);
    const double e32 = run_err(32);
    CHECK(e64 <= 1e-8);
    CHECK(e32 / e64 >= 3.0);
    CHECK(e32 / e64 <= 5.0);
}

TEST_CASE("max-reg ratio: closed form for one mode with constant forcing, p = 2") {
    const g::Grid grid = box2d(8);
    const Vec3 fvec = {0.2, 1.0, -0.5};
    const double zsq = 5.0;  // mode (1,2)
    const g::CoeffField f_hat = single_mode_field(grid, 1, 2, fvec);
    const double T = 1.0;

    // Closed-form oracle in the eigenbasis: U(t) = A^{-1}(I - e^{-tA}) f,
    // U_t = e^{-tA} f, with A = |zeta|^2 M on the mode.
    const auto& sys = symbol::eigen_decompose_M();
    Vec3 c = sys.vectors_inverse * fvec;
    Mat3 gram = sys.vectors.adjoint() * sys.vectors;
    std::array<cx, 3> mu;
    for (int i = 0; i < 3; ++i) mu[static_cast<std::size_t>(i)] = zsq * sys.eigenvalues[static_cast<std::size_t>(i)];

    auto pair_integral_ut = [&](int i, int j) {
        // int_0^T e^{-t(conj(mu_i) + mu_j)} dt
        const cx s = std::conj(mu[static_cast<std::size_t>(i)]) + mu[static_cast<std::size_t>(j)];
        return (1.0 - std::exp(-T * s)) / s;
    };
    auto pair_integral_au = [&](int i, int j) {
        // int_0^T (1 - e^{-t conj(mu_i)})(1 - e^{-t mu_j}) dt
        const cx mi = std::conj(mu[static_cast<std::size_t>(i)]);
        const cx mj = mu[static_cast<std::size_t>(j)];
        return T - (1.0 - std::exp(-T * mi)) / mi - (1.0 - std::exp(-T * mj)) / mj +
               (1.0 - std::exp(-T * (mi + mj))) / (mi + mj);
    };
    cx ut_sq = 0.0, au_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const cx w = std::conj(c[static_cast<std::size_t>(i)]) * gram(i, j) *
                         c[static_cast<std::size_t>(j)];
            ut_sq += w * pair_integral_ut(i, j);
            au_sq += w * pair_integral_au(i, j);
        }
    }
    const double f_norm = norm2(fvec) * std::sqrt(T);
    const double want =
        (std::sqrt(ut_sq.real()) + std::sqrt(au_sq.real())) / f_norm;

    const lin::TimeGrid tg{T, 4096};
    std::vector<g::CoeffField> forcing(static_cast<std::size_t>(tg.n_nodes()), f_hat);
    const double got = lin::max_reg_ratio(forcing, 2.0, tg);
    CHECK(got == doctest::Approx(want).epsilon(1e-5));

    // Scaling invariance: ratio(cF) = ratio(F).
    std::vector<g::CoeffField> scaled;
    for (const auto& f : forcing) scaled.push_back(cx(3.0, 0.0) * f);
    CHECK(lin::max_reg_ratio(scaled, 2.0, tg) == doctest::Approx(got).epsilon(1e-13));

    CHECK_THROWS_AS(
        (void)lin::max_reg_ratio(
            std::vector<g::CoeffField>(5, g::CoeffField::zeros(grid)), 2.0, lin::TimeGrid{1.0, 4}),
        ZeroForcing);
}

TEST_CASE("dissipation: exact identity at nodes and second-order residual") {
    const g::Grid grid = box2d(8);
    const g::CoeffField u0 = single_mode_field(grid, 1, 1, {0.1, 0.04, 0.08});

    // Pointwise identity: Re<A U, U> equals |zeta|^2 |U_3|^2 (the symmetric
    // part of M is diag(0,0,1)).
    const lin::Trajectory traj = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.2, 8});
    for (const auto& node : traj.nodes) {
        const g::CoeffField au = lin::apply_A(node);
        double w = 1.0;
        for (int d = 0; d < grid.ndim(); ++d) w *= grid.parseval_weight(d);
        double inner = 0.0;
        double diss = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (int cidx = 0; cidx < 3; ++cidx) {
                inner += (std::conj(au.comp[static_cast<std::size_t>(cidx)][i]) *
                          node.comp[static_cast<std::size_t>(cidx)][i])
                             .real();
            }
            diss += g::laplacian_symbol(grid, i) * std::norm(node.comp[2][i]);
        }
        CHECK(inner * w == doctest::Approx(diss * w).epsilon(1e-12));
    }

    auto residual_max = [&](int steps) {
        const lin::Trajectory t2 = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.2, steps});
        const auto res = lin::dissipation_residual(t2);
        double m = 0.0;
        for (double r : res) m = std::max(m, r);
        return m;
    };
    const double coarse = residual_max(1000);
    const double fine = residual_max(2000);
    CHECK(fine <= 1e-8);
    CHECK(coarse / fine >= 2.7);

    // U_3 = 0 at t = 0: dissipation vanishes there.
    const g::CoeffField u0_null = single_mode_field(grid, 1, 1, {0.5, 0.2, 0.0});
    CHECK(g::grad_l2_sq(grid, u0_null.comp[2]) == 0.0);
}

TEST_CASE("monotone L2 decay for F = 0") {
    const g::Grid grid = box2d(16);
    const CounterRng rng(5);
    g::CoeffField u0 = g::CoeffField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u0.comp[static_cast<std::size_t>(c)][i] = rng.uniform_sym(c, i);
        }
    }
    const lin::Trajectory traj = lin::solve_linear_core(u0, {}, lin::TimeGrid{0.3, 60});
    double prev = g::coeff_l2_norm(traj.nodes.front());
    for (std::size_t n = 1; n < traj.nodes.size(); ++n) {
        const double cur = g::coeff_l2_norm(traj.nodes[n]);
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("analytic smoothing proxy: C/t bound with stable constant") {
    const g::Grid grid = box2d(16);
    const CounterRng rng(7);
    g::CoeffField u0 = g::CoeffField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double zabs = std::sqrt(g::laplacian_symbol(grid, i));
            u0.comp[static_cast<std::size_t>(c)][i] = rng.uniform_sym(c, i) / (1.0 + zabs);
        }
    }
    std::vector<double> cs;
    for (const double t : {0.01, 0.05, 0.1, 0.5, 1.0}) {
        cs.push_back(t * lin::analytic_smoothing_sup(u0, t));
    }
    const double cmax = *std::max_element(cs.begin(), cs.end());
    const double cmin = *std::min_element(cs.begin(), cs.end());
    CHECK(cmax <= 2.0 * cmin);
}

TEST_CASE("trace proxy norm of a single mode") {
    const g::Grid grid = box2d(8);
    const g::CoeffField u0 = single_mode_field(grid, 1, 1, {0.0, 2.0, 0.0});
    // |zeta|^2 = 2, p = 2: sqrt(w (1 + 2)) * |v| with w = (pi/2)^2.
    const double w = (kPi / 2.0) * (kPi / 2.0);
    CHECK(lin::trace_proxy_norm(u0, 2.0) ==
          doctest::Approx(std::sqrt(3.0 * w) * 2.0).epsilon(1e-13));
    // Larger p weights the high modes less strongly at fixed data.
    CHECK(lin::trace_proxy_norm(u0, 4.0) > 0.0);
}

TEST_CASE("solve report and shape validation") {
    const g::Grid grid = box2d(8);
    const g::CoeffField u0 = single_mode_field(grid, 1, 1, {0.1, 0.2, 0.3});
    const lin::TimeGrid tg{0.5, 8};

    std::vector<g::CoeffField> wrong(3, g::CoeffField::zeros(grid));
    CHECK_THROWS_AS((void)lin::solve_linear_core(u0, wrong, tg), ShapeMismatch);

    const auto [traj, report] = lin::solve_linear(u0, {}, tg, 2.0);
    CHECK(report.t.size() == 9);
    CHECK(report.dissipation_residual.size() == 7);
    CHECK_FALSE(report.max_reg_ratio.has_value());
    for (double v : report.l2_U) CHECK(std::isfinite(v));
}
