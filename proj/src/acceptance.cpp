#include "thermoplate/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>

#include "thermoplate/backtransform.hpp"
#include "thermoplate/config.hpp"
#include "thermoplate/extension.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/io.hpp"
#include "thermoplate/linear.hpp"
#include "thermoplate/multiplier.hpp"
#include "thermoplate/nonlinear.hpp"
#include "thermoplate/oracles.hpp"
#include "thermoplate/pipeline.hpp"
#include "thermoplate/rng.hpp"
#include "thermoplate/symbol.hpp"

namespace thermoplate::acceptance {

namespace fs = std::filesystem;
using grid::CoeffField;
using grid::Grid;
using linear::TimeGrid;

namespace {

// Accumulates sub-checks; the detail string keeps the most useful numbers
// and the first failure.
struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& label) {
        if (!cond) {
            pass = false;
            detail << " FAILED[" << label << "]";
        }
    }
    void note(const std::string& text) { detail << text; }
    void note_value(const char* label, double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %s=%.3g", label, v);
        detail << buf;
    }
};

Grid square_sine_grid(int modes_per_dir) {
    grid::DomainSpec spec;
    spec.n2 = 2;
    spec.modes = {modes_per_dir, modes_per_dir};
    return Grid::from_domain(spec);
}

CoeffField random_sine_field(const Grid& g, std::uint64_t seed, double amplitude,
                             double decay) {
    config::InitialConfig ic;
    ic.kind = "smooth_random";
    ic.amplitude = amplitude;
    ic.decay = decay;
    return config::build_initial(ic, g, seed);
}

double rel_err(const Mat3& got, const Mat3& want) {
    const double scale = std::max(frobenius_norm(want), 1e-300);
    return frobenius_norm(got - want) / scale;
}

double traj_max_abs_diff(const linear::Trajectory& a,
                         const std::vector<CoeffField>& expect) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.nodes.size(); ++n) {
        for (int c = 0; c < 3; ++c) {
            const auto& x = a.nodes[n].comp[static_cast<std::size_t>(c)];
            const auto& y = expect[n].comp[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < x.size(); ++i) {
                m = std::max(m, std::abs(x[i] - y[i]));
            }
        }
    }
    return m;
}


// --------------------------------------------------------------------------
// 1. Sector angle and eigenvalue anchors.
// --------------------------------------------------------------------------
CriterionResult c01_sector_angle() {
    Check ck;
    const auto coeffs = symbol::char_poly_coeffs();
    ck.require(coeffs[0] == 1.0 && coeffs[1] == -1.0 && coeffs[2] == 2.0 && coeffs[3] == -1.0,
               "char poly coefficients (1,-1,2,-1)");

    const auto& sys = symbol::eigen_decompose_M();
    const auto oracle_roots = oracles::cubic_roots_closed_form(coeffs);
    for (int i = 0; i < 3; ++i) {
        ck.require(std::abs(sys.eigenvalues[static_cast<std::size_t>(i)] -
                            oracle_roots[static_cast<std::size_t>(i)]) <= 1e-12,
                   "eigenvalues match closed-form root oracle");
    }

    double real_root = 0.0;
    double complex_re = 0.0;
    for (const auto& ev : sys.eigenvalues) {
        if (std::abs(ev.imag()) < 1e-12) {
            real_root = ev.real();
        } else {
            complex_re = ev.real();
        }
    }
    const double angle = symbol::spectral_angle();
    const double margin = symbol::spectral_margin();
    ck.require(angle < kPi / 2.0, "angle < pi/2");
    ck.require(margin > 0.1, "margin > 0.1 rad");
    ck.require(real_root >= 0.56 && real_root <= 0.58, "real root in [0.56, 0.58]");
    ck.require(complex_re >= 0.21 && complex_re <= 0.22, "complex pair Re in [0.21, 0.22]");
    ck.note_value("angle", angle);
    ck.note_value("margin", margin);
    ck.note_value("real_root", real_root);
    return {1, "sector angle and eigenvalue anchors", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 2. Quasi-homogeneity of kappa.
// --------------------------------------------------------------------------
CriterionResult c02_quasi_homogeneity(std::uint64_t seed) {
    Check ck;
    const CounterRng rng(seed ^ 0xc2ULL);
    const double phi = symbol::spectral_angle() + 0.05;
    std::vector<std::vector<int>> alphas;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                if (i + j + k <= 2) alphas.push_back({i, j, k});
            }
        }
    }
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const auto su = static_cast<std::uint64_t>(s);
        const double r_lambda = std::pow(10.0, -2.0 + 4.0 * rng.uniform01(1, su));
        const double theta = (kPi - phi) * 0.98 * rng.uniform_sym(2, su);
        const cx lambda = std::polar(r_lambda, theta);
        std::vector<double> zeta = {rng.uniform_sym(3, su) * 3.0, rng.uniform_sym(4, su) * 3.0,
                                    rng.uniform_sym(5, su) * 3.0};
        if (std::abs(zeta[0]) + std::abs(zeta[1]) + std::abs(zeta[2]) < 0.1) {
            zeta[0] += 0.5;
        }
        for (const double r : {2.0, 10.0}) {
            std::vector<double> rz = zeta;
            for (auto& z : rz) z *= r;
            for (const auto& alpha : alphas) {
                const Mat3 base = symbol::kappa(lambda, zeta, alpha);
                const Mat3 scaled = symbol::kappa(r * r * lambda, rz, alpha);
                worst = std::max(worst, max_abs(scaled - base));
            }
        }
    }
    ck.require(worst <= 1e-10, "max abs error <= 1e-10");
    ck.note_value("max_err", worst);
    return {2, "kappa quasi-homogeneity", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 3. Holomorphic calculus against the diagonalization oracle.
// --------------------------------------------------------------------------
CriterionResult c03_holomorphic_calculus() {
    Check ck;
    const std::vector<symbol::TestFunction> fns = {symbol::tf_rho(), symbol::tf_sqrt_exp(),
                                                   symbol::tf_shifted_inverse(1.0)};
    double worst = 0.0;
    for (const auto& f : fns) {
        const symbol::ContourSpec contour = symbol::default_contour(f);
        for (int i = 0; i < 20; ++i) {
            const double zsq = 1e-2 * std::pow(1e4, i / 19.0);
            const Mat3 got = symbol::holomorphic_calculus_sq(f, zsq, contour);
            const Mat3 want = symbol::matrix_function_oracle(f.f, zsq);
            worst = std::max(worst, rel_err(got, want));
        }
    }
    ck.require(worst <= 1e-6, "rel error <= 1e-6 at default contour");
    ck.note_value("max_rel_err", worst);

    // Error shrinks under node doubling for every family member (factor-2
    // noise allowance, floor at quadrature round-off).
    const double floor = 1e-12;
    for (const auto& f : fns) {
        const symbol::ContourSpec dflt = symbol::default_contour(f);
        std::vector<double> errs;
        for (const int div : {8, 4, 2, 1}) {
            symbol::ContourSpec contour = dflt;
            contour.n_nodes = dflt.n_nodes / div;
            errs.push_back(rel_err(symbol::holomorphic_calculus_sq(f, 1.0, contour),
                                   symbol::matrix_function_oracle(f.f, 1.0)));
        }
        for (std::size_t i = 1; i < errs.size(); ++i) {
            ck.require(errs[i] <= std::max(2.0 * errs[i - 1], floor),
                       f.id + " node doubling non-increase");
        }
        ck.require(errs.back() <= std::max(errs.front() / 4.0, floor),
                   f.id + " node doubling net shrink");
        if (f.id == "rho") {
            ck.note_value("rho_err_coarse", errs.front());
            ck.note_value("rho_err_default", errs.back());
        }
    }
    return {3, "holomorphic calculus vs oracle", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 4. Propagator exactness against the matrix-exponential oracle.
// --------------------------------------------------------------------------
CriterionResult c04_propagator(std::uint64_t seed) {
    Check ck;
    const CounterRng rng(seed ^ 0xc4ULL);
    const Mat3 m = symbol::coupling_matrix();
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const auto su = static_cast<std::uint64_t>(s);
        const Vec3 u0 = {rng.complex_sym(1, 3 * su), rng.complex_sym(1, 3 * su + 1),
                         rng.complex_sym(1, 3 * su + 2)};
        std::vector<double> zeta = {0.1 + 4.9 * rng.uniform01(2, su),
                                    0.1 + 4.9 * rng.uniform01(3, su)};
        double t = 2.0 * rng.uniform01(4, su);
        if (s % 50 == 0) t = 0.0;
        double zsq = zeta[0] * zeta[0] + zeta[1] * zeta[1];
        const Vec3 got = linear::propagate_mode(u0, zeta, t);
        const Vec3 want = oracles::expm(m * cx(-t * zsq, 0.0)) * u0;
        Vec3 diff;
        for (int i = 0; i < 3; ++i) {
            diff[static_cast<std::size_t>(i)] =
                got[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)];
        }
        worst = std::max(worst, norm2(diff) / std::max(norm2(want), 1e-300));
    }
    ck.require(worst <= 1e-10, "rel error <= 1e-10 over 1000 samples");
    ck.note_value("max_rel_err", worst);
    return {4, "propagator vs matrix exponential oracle", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 5. Extension equivalence: Dirichlet solve vs restrict(solve(extend)).
// --------------------------------------------------------------------------
CriterionResult c05_extension_equivalence(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(16);
    const CoeffField u0 = random_sine_field(g, seed ^ 0xc5ULL, 1.0, 0.3);
    const double t = 0.3;
    const TimeGrid tg{t, 1};

    const linear::Trajectory direct = linear::solve_linear_core(u0, {}, tg);
    const grid::PhysField direct_phys = grid::inverse_transform(direct.nodes.back());

    const extension::ReflectionPlan plan = extension::full_reflection_plan(g);
    const CoeffField extended = extension::odd_extend_coeffs(u0, plan);
    const linear::Trajectory ext_traj = linear::solve_linear_core(extended, {}, tg);
    const grid::PhysField ext_phys = grid::inverse_transform(ext_traj.nodes.back());
    const grid::PhysField restricted = extension::restrict_field(ext_phys, plan);

    double worst = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& x = direct_phys.comp[static_cast<std::size_t>(c)];
        const auto& y = restricted.comp[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < x.size(); ++i) {
            worst = std::max(worst, std::abs(x[i] - y[i]));
        }
    }
    ck.require(worst <= 1e-11, "pointwise agreement <= 1e-11");
    ck.note_value("max_diff", worst);
    return {5, "extension-solve-restrict equivalence", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 6. Linear dissipation identity and monotone decay.
// --------------------------------------------------------------------------
CriterionResult c06_linear_dissipation(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(32);
    const CoeffField u0 = random_sine_field(g, seed ^ 0xc6ULL, 1.0, 0.5);

    auto max_interior_residual = [&](int steps) {
        const linear::Trajectory traj = linear::solve_linear_core(u0, {}, TimeGrid{0.5, steps});
        const auto res = linear::dissipation_residual(traj);
        return *std::max_element(res.begin(), res.end());
    };
    const double coarse = max_interior_residual(100);
    const double fine = max_interior_residual(200);
    ck.require(fine <= coarse / 4.0 * 1.6, "second order in dt");
    ck.note_value("res_coarse", coarse);
    ck.note_value("res_fine", fine);

    const linear::Trajectory traj = linear::solve_linear_core(u0, {}, TimeGrid{0.5, 100});
    bool monotone = true;
    double prev = grid::coeff_l2_norm(traj.nodes.front());
    for (std::size_t n = 1; n < traj.nodes.size(); ++n) {
        const double cur = grid::coeff_l2_norm(traj.nodes[n]);
        if (cur > prev * (1.0 + 1e-12)) monotone = false;
        prev = cur;
    }
    ck.require(monotone, "||U(t)|| nonincreasing");
    return {6, "linear dissipation identity", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 7. Maximal-regularity ratio stability under resolution doubling.
// --------------------------------------------------------------------------
CriterionResult c07_max_reg(std::uint64_t seed) {
    Check ck;
    const TimeGrid tg{0.5, 50};
    const Grid coarse = square_sine_grid(16);
    const Grid fine = square_sine_grid(32);

    auto forcing_for = [&](const Grid& g, int s) {
        config::InitialConfig ic;
        ic.kind = "smooth_random";
        ic.amplitude = 1.0;
        ic.decay = 0.7;
        const CoeffField base =
            config::build_initial(ic, g, seed ^ (0xc700ULL + static_cast<std::uint64_t>(s)));
        std::vector<CoeffField> f;
        f.reserve(static_cast<std::size_t>(tg.n_nodes()));
        const double phase = 2.0 * kPi * (s % 7) / 7.0;
        for (int n = 0; n < tg.n_nodes(); ++n) {
            const double gmod = 1.0 + 0.5 * std::sin(2.0 * kPi * tg.node(n) / tg.t_end + phase);
            f.push_back(cx(gmod, 0.0) * base);
        }
        return f;
    };

    double worst_change = 0.0;
    double max_ratio = 0.0;
    std::mutex mtx;
    for (const double p : {2.0, 4.0}) {
        parallel_for_chunked(100, 4, [&](std::size_t lo, std::size_t hi) {
            double local_change = 0.0;
            double local_ratio = 0.0;
            for (std::size_t s = lo; s < hi; ++s) {
                const int si = static_cast<int>(s);
                const double rc = linear::max_reg_ratio(forcing_for(coarse, si), p, tg);
                const double rf = linear::max_reg_ratio(forcing_for(fine, si), p, tg);
                local_change = std::max(local_change, std::abs(rf - rc) / rc);
                local_ratio = std::max(local_ratio, std::max(rc, rf));
            }
            std::lock_guard<std::mutex> lock(mtx);
            worst_change = std::max(worst_change, local_change);
            max_ratio = std::max(max_ratio, local_ratio);
        });
    }
    ck.require(worst_change < 0.5, "ratio change < 50% under resolution doubling");
    ck.note_value("worst_change", worst_change);
    ck.note_value("max_ratio", max_ratio);
    return {7, "maximal-regularity ratio stability", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 8. Steady state and exponential decay rate (n2 != 0).
// --------------------------------------------------------------------------
CriterionResult c08_steady_state() {
    Check ck;
    const Grid g = square_sine_grid(8);
    // Single mode (1,1): |zeta|^2 = 2.
    CoeffField f_hat = CoeffField::zeros(g);
    const auto st = grid::strides(g);
    const std::size_t flat = 0;  // k = (1,1) stores at indices (0,0)
    (void)st;
    f_hat.comp[1][flat] = 1.0;
    f_hat.comp[2][flat] = 0.7;

    const CoeffField u_inf = linear::steady_state(f_hat);
    // 3x3 solve oracle: (|zeta|^2 M) u = f via the cofactor inverse of M.
    {
        const Mat3 m_inv = symbol::coupling_matrix_inverse();
        const Vec3 f{f_hat.comp[0][flat], f_hat.comp[1][flat], f_hat.comp[2][flat]};
        const Vec3 want = m_inv * f;
        const double zsq = grid::laplacian_symbol(g, flat);
        Vec3 got{u_inf.comp[0][flat] * zsq, u_inf.comp[1][flat] * zsq,
                 u_inf.comp[2][flat] * zsq};
        Vec3 diff;
        for (int i = 0; i < 3; ++i) {
            diff[static_cast<std::size_t>(i)] =
                got[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)];
        }
        ck.require(norm2(diff) <= 1e-12 * std::max(1.0, norm2(want)),
                   "steady state matches 3x3 solve oracle");
    }

    const double dt = 0.01;
    const TimeGrid tg{16.0, 1600};
    std::vector<CoeffField> forcing(static_cast<std::size_t>(tg.n_nodes()), f_hat);
    const linear::Trajectory traj = linear::solve_linear_core(CoeffField::zeros(g), forcing, tg);

    const auto& sys = symbol::eigen_decompose_M();
    double min_re = 1e300;
    double im_slow = 0.0;
    for (const auto& ev : sys.eigenvalues) {
        if (ev.real() < min_re) {
            min_re = ev.real();
            im_slow = std::abs(ev.imag());
        }
    }
    const double zsq = grid::laplacian_symbol(g, flat);
    const double predicted = zsq * min_re;

    auto err_norm = [&](int node) {
        const auto& u = traj.nodes[static_cast<std::size_t>(node)];
        return norm2({u.comp[0][flat] - u_inf.comp[0][flat], u.comp[1][flat] - u_inf.comp[1][flat],
                      u.comp[2][flat] - u_inf.comp[2][flat]});
    };
    // Sample two times separated by a whole number of periods of the
    // |e^{-t z (a+ib)}|^2 beat so the oscillatory factor cancels.
    const double beat_period = kPi / (zsq * im_slow);
    const int na = static_cast<int>(std::llround(6.0 / dt));
    const int span = static_cast<int>(std::llround(5.0 * beat_period / dt));
    const int nb = na + span;
    const double measured =
        std::log(err_norm(na) / err_norm(nb)) / (tg.node(nb) - tg.node(na));
    ck.require(std::abs(measured - predicted) <= 0.1 * predicted, "decay rate within 10%");
    ck.note_value("measured", measured);
    ck.note_value("predicted", predicted);
    return {8, "steady state and decay rate", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 9. Nonlinear correctness: sin^3 identity, manufactured solution, a = 0.
// --------------------------------------------------------------------------
CriterionResult c09_nonlinear_correctness(std::uint64_t seed) {
    Check ck;

    {  // sin^3 identity on (0, pi).
        grid::DomainSpec ds;
        ds.n2 = 1;
        ds.modes = {8};
        const Grid g1 = Grid::from_domain(ds);
        CoeffField u = CoeffField::zeros(g1);
        u.comp[0][0] = 1.0;  // sin(x)
        const double a = 2.0;
        const CoeffField out = nonlinear::phi(u, a, 2);
        double err = 0.0;
        for (std::size_t m = 0; m < out.comp[1].size(); ++m) {
            cx want = 0.0;
            if (m == 0) want = a * 0.75;         // k=1: a * (3/4) * 1
            if (m == 2) want = a * (-0.25) * 9.0;  // k=3: a * (-1/4) * 9
            err = std::max(err, std::abs(out.comp[1][m] - want));
            err = std::max(err, std::abs(out.comp[0][m]));
            err = std::max(err, std::abs(out.comp[2][m]));
        }
        ck.require(err <= 1e-12, "sin^3 identity exact to 1e-12");
        ck.note_value("sin3_err", err);
    }

    {  // Manufactured solution with analytic source term.
        const Grid g = square_sine_grid(8);
        const Vec3 w0 = {0.05, -0.04, 0.06};
        const double a = 1.0;
        const Mat3 m = symbol::coupling_matrix();
        const auto st = grid::strides(g);
        auto flat_of = [&](int k1, int k2) {
            return static_cast<std::size_t>(k1 - 1) * st[0] + static_cast<std::size_t>(k2 - 1);
        };
        const std::size_t base = flat_of(1, 1);
        // Cube of sin x sin y: product of (3 sin k - sin 3k)/4 per direction.
        const std::vector<std::pair<std::size_t, double>> cube_modes = {
            {flat_of(1, 1), 9.0 / 16.0},
            {flat_of(3, 1), -3.0 / 16.0},
            {flat_of(1, 3), -3.0 / 16.0},
            {flat_of(3, 3), 1.0 / 16.0}};
        const double w0_cubed = w0[0].real() * w0[0].real() * w0[0].real();

        auto expected_at = [&](double t) {
            CoeffField u = CoeffField::zeros(g);
            for (int c = 0; c < 3; ++c) {
                u.comp[static_cast<std::size_t>(c)][base] =
                    std::exp(-t) * w0[static_cast<std::size_t>(c)];
            }
            return u;
        };
        auto source_at = [&](double t) {
            CoeffField f = CoeffField::zeros(g);
            const double zsq_b = grid::laplacian_symbol(g, base);
            const Vec3 mw = m * w0;
            for (int c = 0; c < 3; ++c) {
                f.comp[static_cast<std::size_t>(c)][base] =
                    std::exp(-t) * (-w0[static_cast<std::size_t>(c)] +
                                    zsq_b * mw[static_cast<std::size_t>(c)]);
            }
            for (const auto& [mode, coef] : cube_modes) {
                const double zsq = grid::laplacian_symbol(g, mode);
                f.comp[1][mode] -= a * zsq * coef * w0_cubed * std::exp(-3.0 * t);
            }
            return f;
        };

        auto run_error = [&](int steps) {
            const TimeGrid tg{1.0, steps};
            std::vector<CoeffField> source;
            std::vector<CoeffField> expect;
            for (int n = 0; n < tg.n_nodes(); ++n) {
                source.push_back(source_at(tg.node(n)));
                expect.push_back(expected_at(tg.node(n)));
            }
            nonlinear::NonlinearConfig cfg;
            cfg.a = a;
            cfg.T = 1.0;
            cfg.contraction_tol = 1e-12;
            cfg.max_picard_iters = 60;
            const nonlinear::PicardResult res =
                nonlinear::picard_solve(expect.front(), cfg, tg, source);
            return traj_max_abs_diff(res.trajectory, expect);
        };
        const double e128 = run_error(128);
        const double e64 = run_error(64);
        ck.require(e128 <= 1e-6, "manufactured error <= 1e-6 at 128 steps");
        ck.require(e64 >= 2.5 * e128, "second-order convergence");
        ck.note_value("e128", e128);
        ck.note_value("order", std::log2(e64 / e128));
    }

    {  // a = 0 agrees with the linear solver bit for bit.
        const Grid g = square_sine_grid(8);
        const CoeffField u0 = random_sine_field(g, seed ^ 0xc9ULL, 0.5, 0.5);
        const TimeGrid tg{0.5, 32};
        nonlinear::NonlinearConfig cfg;
        cfg.a = 0.0;
        cfg.T = 0.5;
        const nonlinear::PicardResult res = nonlinear::picard_solve(u0, cfg, tg);
        const linear::Trajectory lin = linear::solve_linear_core(u0, {}, tg);
        bool identical = res.trajectory.nodes.size() == lin.nodes.size();
        for (std::size_t n = 0; identical && n < lin.nodes.size(); ++n) {
            for (int c = 0; c < 3; ++c) {
                const auto& x = res.trajectory.nodes[n].comp[static_cast<std::size_t>(c)];
                const auto& y = lin.nodes[n].comp[static_cast<std::size_t>(c)];
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (x[i] != y[i]) {
                        identical = false;
                        break;
                    }
                }
            }
        }
        ck.require(identical, "a=0 bit-identical to linear solve");
    }
    return {9, "nonlinear correctness", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 10. Contraction dichotomy: small data contracts, large data shrinks.
// --------------------------------------------------------------------------
CriterionResult c10_contraction(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(8);
    const CoeffField shape = random_sine_field(g, seed ^ 0xc10ULL, 1.0, 1.0);
    const TimeGrid tg{0.5, 64};
    nonlinear::NonlinearConfig cfg;
    cfg.a = 1.0;
    cfg.T = 0.5;
    cfg.contraction_tol = 1e-11;
    cfg.max_picard_iters = 40;

    auto contracts = [&](double scale) {
        try {
            const nonlinear::PicardResult res =
                nonlinear::picard_solve(cx(scale, 0.0) * shape, cfg, tg);
            if (!res.trace.converged || res.trace.windows_used != 1) return false;
            for (const auto& it : res.trace.iterations) {
                if (it.iteration >= 3 && std::isfinite(it.ratio) && it.ratio > 0.5) {
                    return false;
                }
            }
            return true;
        } catch (const NoConvergence&) {
            return false;
        }
    };

    double lo = 1e-4, hi = 1e4;
    if (!contracts(lo)) {
        ck.require(false, "smallest probe scale contracts");
    } else {
        for (int it = 0; it < 24; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (contracts(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    const double d_scale = lo;
    const double d_norm = linear::trace_proxy_norm(cx(d_scale, 0.0) * shape, 2.0);
    ck.note_value("d_proxy_norm", d_norm);

    {  // Small data: ratios past the second iteration stay below 0.55.
        const nonlinear::PicardResult res =
            nonlinear::picard_solve(cx(d_scale, 0.0) * shape, cfg, tg);
        ck.require(res.trace.converged && res.trace.windows_used == 1,
                   "small data converges on the full window");
        double worst_ratio = 0.0;
        for (const auto& it : res.trace.iterations) {
            if (it.iteration >= 3 && std::isfinite(it.ratio)) {
                worst_ratio = std::max(worst_ratio, it.ratio);
            }
        }
        ck.require(worst_ratio <= 0.55, "ratios <= 0.55 after the second iteration");
        ck.note_value("worst_ratio", worst_ratio);
    }

    {  // 100x larger data: the window-shrink path triggers.
        bool shrank = false;
        try {
            const nonlinear::PicardResult res =
                nonlinear::picard_solve(cx(100.0 * d_scale, 0.0) * shape, cfg, tg);
            shrank = res.trace.windows_used > 1;
        } catch (const nonlinear::PicardNoConvergence& e) {
            shrank = e.trace.windows_used > 1;
        }
        ck.require(shrank, "window-shrink path triggers at 100x data");
    }
    return {10, "Picard contraction dichotomy", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 11. Nonlinear energy identity.
// --------------------------------------------------------------------------
CriterionResult c11_energy_identity(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(32);
    const CoeffField u0 = random_sine_field(g, seed ^ 0xc11ULL, 0.03, 1.0);
    nonlinear::NonlinearConfig cfg;
    cfg.a = 1.0;
    cfg.T = 0.25;
    cfg.contraction_tol = 1e-11;
    cfg.max_picard_iters = 40;

    auto run = [&](int steps) {
        const TimeGrid tg{0.25, steps};
        const nonlinear::PicardResult res = nonlinear::picard_solve(u0, cfg, tg);
        return nonlinear::energy_report(res.trajectory, cfg.a, cfg.dealias_factor);
    };
    auto interior_max = [](const nonlinear::EnergySeries& es) {
        double m = 0.0;
        for (std::size_t n = 1; n + 1 < es.residual.size(); ++n) {
            m = std::max(m, es.residual[n]);
        }
        return m;
    };
    const nonlinear::EnergySeries fine = run(250);   // dt = 1e-3
    const nonlinear::EnergySeries coarse = run(125);  // dt = 2e-3
    const double res_fine = interior_max(fine);
    const double res_coarse = interior_max(coarse);
    ck.require(res_fine <= 1e-6, "energy residual <= 1e-6 at dt = 1e-3");
    ck.require(res_fine <= res_coarse / 4.0 * 1.6, "second order in dt");
    bool monotone = true;
    for (std::size_t n = 1; n < fine.energy.size(); ++n) {
        if (fine.energy[n] > fine.energy[n - 1] * (1.0 + 1e-12)) monotone = false;
    }
    ck.require(monotone, "E nonincreasing");
    ck.note_value("res_dt1e-3", res_fine);
    ck.note_value("res_dt2e-3", res_coarse);
    return {11, "nonlinear energy identity", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 12. Residuals of the original second-order system.
// --------------------------------------------------------------------------
CriterionResult c12_original_residuals(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(32);
    CoeffField u0 = CoeffField::zeros(g);
    {
        // Low modes with small amplitudes keep the centered-difference error
        // inside the 1e-6 budget at dt = 1e-3.
        const CounterRng rng(seed ^ 0xc12ULL);
        const auto st = grid::strides(g);
        auto set_mode = [&](int k1, int k2, double amp) {
            const std::size_t flat =
                static_cast<std::size_t>(k1 - 1) * st[0] + static_cast<std::size_t>(k2 - 1);
            for (int c = 0; c < 3; ++c) {
                u0.comp[static_cast<std::size_t>(c)][flat] =
                    amp * rng.uniform_sym(static_cast<std::uint64_t>(c) + 1,
                                          static_cast<std::size_t>(k1 * 8 + k2));
            }
        };
        set_mode(1, 1, 0.01);
        set_mode(2, 1, 0.002);
        set_mode(1, 2, 0.002);
        set_mode(2, 2, 0.001);
    }

    auto interior_max = [](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t n = 1; n + 1 < v.size(); ++n) m = std::max(m, v[n]);
        return m;
    };

    auto linear_residual = [&](int steps) {
        const linear::Trajectory traj = linear::solve_linear_core(u0, {}, TimeGrid{0.25, steps});
        const auto rec = backtransform::recover_trajectory(traj);
        const auto res = backtransform::residual_original(rec, {}, {}, 0.0);
        return std::max(interior_max(res.r1), interior_max(res.r2));
    };
    auto nonlinear_residual = [&](int steps) {
        nonlinear::NonlinearConfig cfg;
        cfg.a = 1.0;
        cfg.T = 0.25;
        cfg.contraction_tol = 1e-11;
        cfg.max_picard_iters = 40;
        const nonlinear::PicardResult res = nonlinear::picard_solve(u0, cfg, TimeGrid{0.25, steps});
        const auto rec = backtransform::recover_trajectory(res.trajectory);
        const auto series = backtransform::residual_original(rec, {}, {}, cfg.a);
        return std::max(interior_max(series.r1), interior_max(series.r2));
    };

    const double lin_fine = linear_residual(250);
    const double lin_coarse = linear_residual(125);
    ck.require(lin_fine <= 1e-6, "linear residual <= 1e-6 at dt = 1e-3");
    ck.require(lin_fine <= lin_coarse / 4.0 * 1.6, "linear second order");
    const double nl_fine = nonlinear_residual(250);
    const double nl_coarse = nonlinear_residual(125);
    ck.require(nl_fine <= 1e-6, "nonlinear residual <= 1e-6 at dt = 1e-3");
    ck.require(nl_fine <= nl_coarse / 4.0 * 1.6, "nonlinear second order");
    ck.note_value("lin_fine", lin_fine);
    ck.note_value("nl_fine", nl_fine);
    return {12, "original-system residuals", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 13. Michlin sweep stability under grid doubling.
// --------------------------------------------------------------------------
CriterionResult c13_michlin_stability() {
    Check ck;
    const double phi = symbol::spectral_angle() + 0.05;
    const std::vector<cx> lambdas = multiplier::sweep_lambda_set(phi, 8, 9, 1e-3, 1e3);
    const std::vector<cx> lambdas_refined = multiplier::sweep_lambda_set(phi, 16, 9, 1e-3, 1e3);

    multiplier::MichlinSweepSpec spec;
    spec.n1 = 1;
    spec.n2 = 1;
    spec.lambda_relative = true;
    spec.xi_points = 8;
    // Past k ~ 2/margin the shifted fiber stays inside the resolvent peak
    // and the k-weighted difference sups saturate.
    spec.k_max = 48;

    double worst = 1.0;
    const std::vector<std::vector<int>> alphas = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    for (const auto& alpha : alphas) {
        spec.family = "kappa";
        spec.lambdas = lambdas;
        const auto stab = multiplier::michlin_stability(spec, multiplier::make_kappa_eval(alpha),
                                                        lambdas_refined);
        ck.require(stab.stable, "kappa sweep stable for alpha");
        worst = std::max(worst, stab.worst_ratio);
    }
    {
        spec.family = "h_rho";
        spec.lambdas.clear();
        symbol::TestFunction rho = symbol::tf_rho();
        symbol::ContourSpec contour = symbol::default_contour(rho);
        contour.n_nodes = 100;
        const auto stab =
            multiplier::michlin_stability(spec, multiplier::make_hf_eval(rho, contour), {});
        ck.require(stab.stable, "h_rho sweep stable");
        worst = std::max(worst, stab.worst_ratio);
    }
    ck.note_value("worst_ratio", worst);
    return {13, "Michlin sweep stability", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 14. R-bound and Kahane checks.
// --------------------------------------------------------------------------
CriterionResult c14_rbound_kahane(std::uint64_t seed) {
    Check ck;
    const CounterRng rng(seed ^ 0xc14ULL);

    {  // N = 1 exactness.
        multiplier::RBoundSample sample;
        sample.operators.push_back(symbol::resolvent_at_sq(cx(1.0, 0.3), 2.0) * cx(1.0, 0.3));
        sample.vectors.push_back({cx(0.3, -0.1), cx(0.2, 0.5), cx(-0.7, 0.1)});
        sample.n_draws = 1;  // no randomness needed
        const double got = multiplier::rbound_estimate(sample, 2.0);
        const double want =
            norm2(sample.operators[0] * sample.vectors[0]) / norm2(sample.vectors[0]);
        ck.require(got == want, "N=1 exact");
    }

    {  // Kahane over 1000 seeded trials.
        bool all_ok = true;
        double worst_ratio = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const auto tu = static_cast<std::uint64_t>(trial);
            std::vector<cx> a(8), b(8);
            std::vector<Vec3> x(8);
            for (std::size_t j = 0; j < 8; ++j) {
                b[j] = rng.complex_sym(100 + tu, j);
                a[j] = b[j] * rng.uniform01(200 + tu, j);
                x[j] = {rng.complex_sym(300 + tu, 3 * j), rng.complex_sym(300 + tu, 3 * j + 1),
                        rng.complex_sym(300 + tu, 3 * j + 2)};
            }
            double bmax = 0.0;
            for (const auto& v : b) bmax = std::max(bmax, std::abs(v));
            if (bmax < 1e-3) continue;
            const auto res = multiplier::kahane_check(a, b, x, 2.0, 256, seed ^ tu);
            all_ok = all_ok && res.ok;
            worst_ratio = std::max(worst_ratio, res.ratio);
        }
        ck.require(all_ok, "Kahane inequality with slack 1.05 over 1000 trials");
        ck.note_value("worst_ratio", worst_ratio);
    }

    {  // Nested-family monotonicity over resolvent evaluations.
        const double phi = symbol::spectral_angle() + 0.05;
        multiplier::RBoundSample sample;
        sample.n_draws = 512;
        sample.seed = seed ^ 0x4e4eULL;
        for (int j = 0; j < 32; ++j) {
            const auto ju = static_cast<std::uint64_t>(j);
            const double r = std::pow(10.0, -2.0 + 4.0 * rng.uniform01(400, ju));
            const double theta = (kPi - phi) * 0.98 * rng.uniform_sym(401, ju);
            const cx lambda = std::polar(r, theta);
            const double za = std::pow(10.0, -1.5 + 3.0 * rng.uniform01(402, ju));
            sample.operators.push_back(symbol::resolvent_at_sq(lambda, za * za) * lambda);
            sample.vectors.push_back({rng.complex_sym(403, 3 * ju), rng.complex_sym(403, 3 * ju + 1),
                                      rng.complex_sym(403, 3 * ju + 2)});
        }
        const auto scan = multiplier::rbound_nested_scan(sample, 2.0);
        bool monotone = true;
        for (std::size_t m = 1; m < scan.size(); ++m) {
            if (scan[m] < scan[m - 1]) monotone = false;
        }
        ck.require(monotone, "nested-family estimates monotone");
        ck.note_value("estimate_N32", scan.back());
    }
    return {14, "R-bound and Kahane checks", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 15. Analyticity proxies.
// --------------------------------------------------------------------------
CriterionResult c15_analyticity(std::uint64_t seed) {
    Check ck;
    const Grid g = square_sine_grid(32);
    config::InitialConfig ic;
    ic.kind = "rough_random";
    ic.amplitude = 1.0;
    const CoeffField rough = config::build_initial(ic, g, seed ^ 0xc15ULL);

    // C(t) = t * sup_zeta |zeta|^2 ||U_hat(t)|| / ||U0|| stable within a
    // factor of two across probe times.
    std::vector<double> cs;
    for (const double t : {0.05, 0.1, 0.5}) {
        cs.push_back(t * linear::analytic_smoothing_sup(rough, t));
    }
    const double cmax = *std::max_element(cs.begin(), cs.end());
    const double cmin = *std::min_element(cs.begin(), cs.end());
    ck.require(cmax <= 2.0 * cmin, "smoothing constant stable within factor 2");
    ck.note_value("C_min", cmin);
    ck.note_value("C_max", cmax);

    const linear::Trajectory lin = linear::solve_linear_core(rough, {}, TimeGrid{0.5, 50});
    const double slope_early = nonlinear::analyticity_proxy(lin, 0.1);
    const double slope_late = nonlinear::analyticity_proxy(lin, 0.5);
    ck.require(slope_early < 0.0, "linear slope < 0 at t = 0.1");
    ck.require(slope_late < slope_early, "slope more negative at t = 0.5");
    ck.note_value("slope_t0.1", slope_early);
    ck.note_value("slope_t0.5", slope_late);

    {  // Small-data nonlinear run.
        const CoeffField u0 = random_sine_field(g, seed ^ 0xc15bULL, 0.05, 1.0);
        nonlinear::NonlinearConfig cfg;
        cfg.a = 1.0;
        cfg.T = 0.25;
        cfg.contraction_tol = 1e-10;
        const nonlinear::PicardResult res = nonlinear::picard_solve(u0, cfg, TimeGrid{0.25, 50});
        const double slope_nl = nonlinear::analyticity_proxy(res.trajectory, 0.2);
        ck.require(slope_nl < 0.0, "nonlinear slope < 0 at t = 0.2");
        ck.note_value("slope_nl", slope_nl);
    }
    return {15, "analyticity proxies", ck.pass, ck.detail.str(), 0.0};
}

// --------------------------------------------------------------------------
// 16. Byte determinism of the output bundle.
// --------------------------------------------------------------------------
CriterionResult c16_determinism(const Options& opts) {
    Check ck;
    config::Config cfg = config::default_config();
    cfg.seed = opts.seed;
    const fs::path root = fs::path(opts.out_dir);
    const fs::path again = root / "determinism_check";
    pipeline::run_bundle(cfg, root);
    pipeline::run_bundle(cfg, again);

    const std::vector<std::string> files = {
        "sector_report.json",        "resolvent_sweep.csv",
        "michlin_sweep.csv",         "rbound.json",
        "linear/solve_report.json",  "linear/trajectory.csv",
        "linear/residual.csv",       "nonlinear/picard_trace.json",
        "nonlinear/trajectory.csv",  "nonlinear/energy.csv",
        "nonlinear/residual.csv"};
    auto slurp = [](const fs::path& p) -> std::string {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    for (const auto& f : files) {
        const std::string a = slurp(root / f);
        const std::string b = slurp(again / f);
        ck.require(!a.empty(), "output file written: " + f);
        ck.require(a == b, "byte-identical: " + f);
    }
    return {16, "byte determinism of outputs", ck.pass, ck.detail.str(), 0.0};
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& opts) {
    std::vector<std::function<CriterionResult()>> criteria = {
        [&] { return c01_sector_angle(); },
        [&] { return c02_quasi_homogeneity(opts.seed); },
        [&] { return c03_holomorphic_calculus(); },
        [&] { return c04_propagator(opts.seed); },
        [&] { return c05_extension_equivalence(opts.seed); },
        [&] { return c06_linear_dissipation(opts.seed); },
        [&] { return c07_max_reg(opts.seed); },
        [&] { return c08_steady_state(); },
        [&] { return c09_nonlinear_correctness(opts.seed); },
        [&] { return c10_contraction(opts.seed); },
        [&] { return c11_energy_identity(opts.seed); },
        [&] { return c12_original_residuals(opts.seed); },
        [&] { return c13_michlin_stability(); },
        [&] { return c14_rbound_kahane(opts.seed); },
        [&] { return c15_analyticity(opts.seed); },
        [&] { return c16_determinism(opts); },
    };

    std::vector<CriterionResult> results;
    results.reserve(criteria.size());
    for (auto& fn : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.number = static_cast<int>(results.size()) + 1;
            r.name = "criterion raised an exception";
            r.pass = false;
            r.detail = std::string(" exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!opts.quiet) {
            std::printf("[%s] %2d. %s —%s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.number,
                        r.name.c_str(), r.detail.c_str(), r.seconds);
            std::fflush(stdout);
        }
        results.push_back(std::move(r));
    }
    int passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    std::printf("%d/%zu criteria passed\n", passed, results.size());
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

}  // namespace thermoplate::acceptance
