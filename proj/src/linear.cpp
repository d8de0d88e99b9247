#include "thermoplate/linear.hpp"

#include <algorithm>
#include <cmath>

#include "thermoplate/symbol.hpp"

namespace thermoplate::linear {

using grid::CoeffField;
using grid::Grid;

namespace {

// phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2, with Taylor fallback
// near zero against cancellation.
cx phi1(cx z) {
    if (std::abs(z) < 0.25) {
        cx acc = 0.0;
        cx term = 1.0;  // z^k / (k+1)! starting at k = 0
        for (int k = 0; k <= 16; ++k) {
            if (k > 0) term *= z / static_cast<double>(k + 1);
            acc += term;
        }
        return acc;
    }
    return (std::exp(z) - 1.0) / z;
}

cx phi2(cx z) {
    if (std::abs(z) < 0.25) {
        cx acc = 0.0;
        cx term = 0.5;  // z^k / (k+2)! starting at k = 0
        for (int k = 0; k <= 16; ++k) {
            if (k > 0) term *= z / static_cast<double>(k + 2);
            acc += term;
        }
        return acc;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

Vec3 to_eigen(const Mat3& vinv, const Vec3& u) { return vinv * u; }
Vec3 from_eigen(const Mat3& v, const Vec3& w) { return v * w; }

}  // namespace

Vec3 propagate_mode_sq(const Vec3& u0, double zeta_sq, double t) {
    if (t < 0.0) {
        throw PreconditionViolated("propagate_mode: t >= 0 required");
    }
    if (t == 0.0 || zeta_sq == 0.0) {
        return u0;  // a(0) = 0 and the semigroup identity at t = 0, exactly
    }
    const auto& sys = symbol::eigen_decompose_M();
    Vec3 w = to_eigen(sys.vectors_inverse, u0);
    for (int i = 0; i < 3; ++i) {
        w[static_cast<std::size_t>(i)] *=
            std::exp(-t * zeta_sq * sys.eigenvalues[static_cast<std::size_t>(i)]);
    }
    return from_eigen(sys.vectors, w);
}

Vec3 propagate_mode(const Vec3& u0, std::span<const double> zeta, double t) {
    double zsq = 0.0;
    for (double z : zeta) zsq += z * z;
    return propagate_mode_sq(u0, zsq, t);
}

grid::CoeffField apply_A(const CoeffField& u) {
    const Mat3 m = symbol::coupling_matrix();
    CoeffField out = CoeffField::zeros(u.grid);
    const std::size_t n = u.comp[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        const double zsq = grid::laplacian_symbol(u.grid, i);
        const Vec3 v{u.comp[0][i], u.comp[1][i], u.comp[2][i]};
        const Vec3 r = m * v;
        out.comp[0][i] = zsq * r[0];
        out.comp[1][i] = zsq * r[1];
        out.comp[2][i] = zsq * r[2];
    }
    return out;
}

Trajectory solve_linear_core(const CoeffField& u0, std::span<const CoeffField> forcing,
                             const TimeGrid& tgrid) {
    tgrid.validate();
    const Grid& g = u0.grid;
    const bool has_forcing = !forcing.empty();
    if (has_forcing) {
        if (static_cast<int>(forcing.size()) != tgrid.n_nodes()) {
            throw ShapeMismatch("solve_linear: one forcing sample per time node required");
        }
        for (const auto& f : forcing) {
            if (!(f.grid == g)) {
                throw ShapeMismatch("solve_linear: forcing grid does not match state grid");
            }
        }
    }

    const auto& sys = symbol::eigen_decompose_M();
    const double h = tgrid.dt();
    const int n_nodes = tgrid.n_nodes();

    Trajectory traj;
    traj.space = g;
    traj.time = tgrid;
    traj.nodes.assign(static_cast<std::size_t>(n_nodes), CoeffField::zeros(g));
    traj.nodes[0] = u0;

    const std::size_t n_modes = g.size();
    parallel_for_chunked(n_modes, 64, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
            const double zsq = grid::laplacian_symbol(g, m);
            std::array<cx, 3> expz, w1, w2;
            for (int i = 0; i < 3; ++i) {
                const cx z = -h * zsq * sys.eigenvalues[static_cast<std::size_t>(i)];
                expz[static_cast<std::size_t>(i)] = std::exp(z);
                const cx p1 = phi1(z);
                const cx p2 = phi2(z);
                w1[static_cast<std::size_t>(i)] = h * (p1 - p2);
                w2[static_cast<std::size_t>(i)] = h * p2;
            }
            Vec3 w_prev = to_eigen(sys.vectors_inverse,
                                   {u0.comp[0][m], u0.comp[1][m], u0.comp[2][m]});
            Vec3 g_prev{};
            if (has_forcing) {
                g_prev = to_eigen(sys.vectors_inverse, {forcing[0].comp[0][m],
                                                        forcing[0].comp[1][m],
                                                        forcing[0].comp[2][m]});
            }
            for (int n = 1; n < n_nodes; ++n) {
                Vec3 g_cur{};
                if (has_forcing) {
                    const auto& fn = forcing[static_cast<std::size_t>(n)];
                    g_cur = to_eigen(sys.vectors_inverse,
                                     {fn.comp[0][m], fn.comp[1][m], fn.comp[2][m]});
                }
                Vec3 w_cur;
                for (std::size_t i = 0; i < 3; ++i) {
                    w_cur[i] = expz[i] * w_prev[i] + w1[i] * g_prev[i] + w2[i] * g_cur[i];
                }
                const Vec3 u = from_eigen(sys.vectors, w_cur);
                auto& node = traj.nodes[static_cast<std::size_t>(n)];
                node.comp[0][m] = u[0];
                node.comp[1][m] = u[1];
                node.comp[2][m] = u[2];
                w_prev = w_cur;
                g_prev = g_cur;
            }
        }
    });
    return traj;
}

double lp_time_norm(std::span<const double> node_norms, double dt, double p) {
    if (node_norms.size() < 2) {
        throw PreconditionViolated("lp_time_norm: at least two nodes required");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < node_norms.size(); ++i) {
        const double w = (i == 0 || i + 1 == node_norms.size()) ? 0.5 : 1.0;
        acc += w * std::pow(node_norms[i], p);
    }
    return std::pow(acc * dt, 1.0 / p);
}

SolveReport make_solve_report(const Trajectory& traj, std::span<const CoeffField> forcing,
                              double p) {
    const bool has_forcing = !forcing.empty();
    const int n_nodes = traj.time.n_nodes();
    SolveReport rep;
    rep.p = p;
    for (int n = 0; n < n_nodes; ++n) {
        const auto& u = traj.nodes[static_cast<std::size_t>(n)];
        const CoeffField au = apply_A(u);
        CoeffField ut = cx(-1.0, 0.0) * au;
        CoeffField f = CoeffField::zeros(traj.space);
        if (has_forcing) {
            f = forcing[static_cast<std::size_t>(n)];
            ut = ut + f;
        }
        rep.t.push_back(traj.time.node(n));
        rep.l2_U.push_back(grid::coeff_l2_norm(u));
        rep.lp_U.push_back(grid::lp_norm(u, p));
        rep.l2_AU.push_back(grid::coeff_l2_norm(au));
        rep.lp_AU.push_back(grid::lp_norm(au, p));
        rep.l2_Ut.push_back(grid::coeff_l2_norm(ut));
        rep.lp_Ut.push_back(grid::lp_norm(ut, p));
        rep.l2_F.push_back(grid::coeff_l2_norm(f));
        rep.lp_F.push_back(grid::lp_norm(f, p));
    }
    if (!has_forcing) {
        rep.dissipation_residual = dissipation_residual(traj);
    } else {
        const double f_norm = lp_time_norm(rep.lp_F, traj.time.dt(), p);
        if (f_norm > 0.0) {
            const double ut_norm = lp_time_norm(rep.lp_Ut, traj.time.dt(), p);
            const double au_norm = lp_time_norm(rep.lp_AU, traj.time.dt(), p);
            rep.max_reg_ratio = (ut_norm + au_norm) / f_norm;
        }
    }
    return rep;
}

std::pair<Trajectory, SolveReport> solve_linear(const CoeffField& u0,
                                                std::span<const CoeffField> forcing,
                                                const TimeGrid& tgrid, double p) {
    Trajectory traj = solve_linear_core(u0, forcing, tgrid);
    SolveReport rep = make_solve_report(traj, forcing, p);
    return {std::move(traj), std::move(rep)};
}

double max_reg_ratio(std::span<const CoeffField> forcing, double p, const TimeGrid& tgrid) {
    if (forcing.empty()) {
        throw ZeroForcing("max_reg_ratio: forcing samples required");
    }
    double sup = 0.0;
    for (const auto& f : forcing) {
        sup = std::max(sup, grid::coeff_l2_norm(f));
    }
    if (sup <= 0.0) {
        throw ZeroForcing("max_reg_ratio: ||F|| = 0");
    }
    const CoeffField u0 = CoeffField::zeros(forcing[0].grid);
    const Trajectory traj = solve_linear_core(u0, forcing, tgrid);

    const double dt = tgrid.dt();
    std::vector<double> ut_norms, au_norms, f_norms;
    for (int n = 0; n < tgrid.n_nodes(); ++n) {
        const auto& u = traj.nodes[static_cast<std::size_t>(n)];
        const CoeffField au = apply_A(u);
        const CoeffField ut = forcing[static_cast<std::size_t>(n)] - au;
        au_norms.push_back(grid::lp_norm(au, p));
        ut_norms.push_back(grid::lp_norm(ut, p));
        f_norms.push_back(grid::lp_norm(forcing[static_cast<std::size_t>(n)], p));
    }
    const double denom = lp_time_norm(f_norms, dt, p);
    if (!(denom > 0.0)) {
        throw ZeroForcing("max_reg_ratio: ||F||_{L^p L^p} = 0");
    }
    return (lp_time_norm(ut_norms, dt, p) + lp_time_norm(au_norms, dt, p)) / denom;
}

std::vector<double> dissipation_residual(const Trajectory& traj) {
    const int n_nodes = traj.time.n_nodes();
    const double dt = traj.time.dt();
    std::vector<double> half_l2_sq(static_cast<std::size_t>(n_nodes));
    std::vector<double> dissipation(static_cast<std::size_t>(n_nodes));
    for (int n = 0; n < n_nodes; ++n) {
        const auto& u = traj.nodes[static_cast<std::size_t>(n)];
        const double l2 = grid::coeff_l2_norm(u);
        half_l2_sq[static_cast<std::size_t>(n)] = 0.5 * l2 * l2;
        dissipation[static_cast<std::size_t>(n)] = grid::grad_l2_sq(traj.space, u.comp[2]);
    }
    std::vector<double> residual;
    residual.reserve(static_cast<std::size_t>(std::max(0, n_nodes - 2)));
    for (int n = 1; n + 1 < n_nodes; ++n) {
        const double ddt = (half_l2_sq[static_cast<std::size_t>(n + 1)] -
                            half_l2_sq[static_cast<std::size_t>(n - 1)]) /
                           (2.0 * dt);
        residual.push_back(std::abs(ddt + dissipation[static_cast<std::size_t>(n)]));
    }
    return residual;
}

grid::CoeffField steady_state(const CoeffField& f_hat) {
    const Mat3 m = symbol::coupling_matrix();
    CoeffField out = CoeffField::zeros(f_hat.grid);
    for (std::size_t i = 0; i < f_hat.comp[0].size(); ++i) {
        const double zsq = grid::laplacian_symbol(f_hat.grid, i);
        const Vec3 f{f_hat.comp[0][i], f_hat.comp[1][i], f_hat.comp[2][i]};
        if (zsq == 0.0) {
            if (std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])}) > 0.0) {
                throw ZeroModeNotInvertible("steady_state: forcing on the zero frequency");
            }
            continue;
        }
        const Mat3 a_inv = cofactor_inverse(m * cx(zsq, 0.0));
        const Vec3 u = a_inv * f;
        out.comp[0][i] = u[0];
        out.comp[1][i] = u[1];
        out.comp[2][i] = u[2];
    }
    return out;
}

std::pair<Trajectory, bool> solve_to_steady_state(const CoeffField& u0,
                                                  const CoeffField& f_hat, double dt,
                                                  double t_max, double tol) {
    if (!(dt > 0.0) || !(t_max >= dt)) {
        throw PreconditionViolated("solve_to_steady_state: 0 < dt <= t_max required");
    }
    if (!(u0.grid == f_hat.grid)) {
        throw ShapeMismatch("solve_to_steady_state: forcing grid mismatch");
    }
    const int max_steps = static_cast<int>(std::llround(t_max / dt));
    const TimeGrid step{dt, 1};
    const std::vector<CoeffField> f_nodes(2, f_hat);

    Trajectory traj;
    traj.space = u0.grid;
    traj.nodes.push_back(u0);
    bool steady = false;
    int n = 0;
    for (; n < max_steps; ++n) {
        Trajectory one = solve_linear_core(traj.nodes.back(), f_nodes, step);
        traj.nodes.push_back(std::move(one.nodes.back()));
        const CoeffField ut = f_hat - apply_A(traj.nodes.back());
        if (grid::coeff_l2_norm(ut) < tol) {
            steady = true;
            ++n;
            break;
        }
    }
    traj.time = TimeGrid{n * dt, std::max(1, n)};
    return {std::move(traj), steady};
}

double analytic_smoothing_sup(const CoeffField& u0, double t) {
    if (!(t > 0.0)) {
        throw PreconditionViolated("analytic_smoothing_sup: t > 0 required");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < u0.comp[0].size(); ++i) {
        scale = std::max(scale, norm2({u0.comp[0][i], u0.comp[1][i], u0.comp[2][i]}));
    }
    if (!(scale > 0.0)) {
        throw PreconditionViolated("analytic_smoothing_sup: u0 = 0");
    }
    // Mode-wise amplification |zeta|^2 ||U_hat(t)|| / ||U0_hat||: the fiber
    // version of ||A e^{-tA}||; rough data just populates every fiber.
    double sup = 0.0;
    for (std::size_t i = 0; i < u0.comp[0].size(); ++i) {
        const Vec3 v0{u0.comp[0][i], u0.comp[1][i], u0.comp[2][i]};
        const double denom = norm2(v0);
        if (denom <= 1e-14 * scale) {
            continue;
        }
        const double zsq = grid::laplacian_symbol(u0.grid, i);
        sup = std::max(sup, zsq * norm2(propagate_mode_sq(v0, zsq, t)) / denom);
    }
    return sup;
}

double trace_proxy_norm(const CoeffField& u0, double p) {
    if (!(p > 1.0)) {
        throw PreconditionViolated("trace_proxy_norm: p > 1 required");
    }
    double w = 1.0;
    for (int d = 0; d < u0.grid.ndim(); ++d) w *= u0.grid.parseval_weight(d);
    double acc = 0.0;
    for (std::size_t m = 0; m < u0.comp[0].size(); ++m) {
        const double zsq = grid::laplacian_symbol(u0.grid, m);
        const double nrm = norm2({u0.comp[0][m], u0.comp[1][m], u0.comp[2][m]});
        acc += w * std::pow(std::pow(1.0 + zsq, (2.0 - 2.0 / p) / 2.0) * nrm, p);
    }
    return std::pow(acc, 1.0 / p);
}

double mr_norm(const Trajectory& traj) {
    const int n_nodes = traj.time.n_nodes();
    const double dt = traj.time.dt();
    std::vector<double> u_norms, ut_norms, au_norms;
    for (int n = 0; n < n_nodes; ++n) {
        const auto& u = traj.nodes[static_cast<std::size_t>(n)];
        u_norms.push_back(grid::coeff_l2_norm(u));
        au_norms.push_back(grid::coeff_l2_norm(apply_A(u)));
        CoeffField dudt = CoeffField::zeros(traj.space);
        if (n == 0) {
            dudt = cx(1.0 / dt, 0.0) * (traj.nodes[1] - traj.nodes[0]);
        } else if (n + 1 == n_nodes) {
            dudt = cx(1.0 / dt, 0.0) *
                   (traj.nodes[static_cast<std::size_t>(n)] -
                    traj.nodes[static_cast<std::size_t>(n - 1)]);
        } else {
            dudt = cx(0.5 / dt, 0.0) *
                   (traj.nodes[static_cast<std::size_t>(n + 1)] -
                    traj.nodes[static_cast<std::size_t>(n - 1)]);
        }
        ut_norms.push_back(grid::coeff_l2_norm(dudt));
    }
    return lp_time_norm(u_norms, dt, 2.0) + lp_time_norm(ut_norms, dt, 2.0) +
           lp_time_norm(au_norms, dt, 2.0);
}

}  // namespace thermoplate::linear
