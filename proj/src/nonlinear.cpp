#include "thermoplate/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermoplate::nonlinear {

using grid::CoeffField;
using grid::Grid;
using linear::TimeGrid;
using linear::Trajectory;

std::vector<cx> dealiased_cube(const Grid& g, const std::vector<cx>& coeffs,
                               int dealias_factor) {
    if (dealias_factor < 2) {
        throw PreconditionViolated("dealiased_cube: factor >= 2 required");
    }
    const Grid big = grid::refined_grid(g, dealias_factor);
    std::vector<double> vals = grid::scalar_inverse(big, grid::pad_coeffs(g, coeffs, dealias_factor));
    for (auto& v : vals) v = v * v * v;
    return grid::truncate_coeffs(big, grid::scalar_forward(big, vals), g);
}

grid::CoeffField phi(const CoeffField& u, double a, int dealias_factor) {
    for (const auto& c : u.comp) {
        if (c.size() != u.grid.size()) {
            throw ShapeMismatch("phi: field size does not match grid");
        }
    }
    CoeffField out = CoeffField::zeros(u.grid);
    if (a == 0.0) {
        return out;
    }
    const std::vector<cx> cube = dealiased_cube(u.grid, u.comp[0], dealias_factor);
    for (std::size_t m = 0; m < cube.size(); ++m) {
        // -a Laplace maps to +a |zeta|^2 on coefficients.
        out.comp[1][m] = a * grid::laplacian_symbol(u.grid, m) * cube[m];
    }
    return out;
}

namespace {

Trajectory difference(const Trajectory& a, const Trajectory& b) {
    Trajectory d;
    d.space = a.space;
    d.time = a.time;
    d.nodes.reserve(a.nodes.size());
    for (std::size_t n = 0; n < a.nodes.size(); ++n) {
        d.nodes.push_back(a.nodes[n] - b.nodes[n]);
    }
    return d;
}

std::vector<CoeffField> picard_forcing(const Trajectory& u, const NonlinearConfig& cfg,
                                       std::span<const CoeffField> extra_forcing) {
    std::vector<CoeffField> f;
    f.reserve(u.nodes.size());
    for (std::size_t n = 0; n < u.nodes.size(); ++n) {
        CoeffField fn = phi(u.nodes[n], cfg.a, cfg.dealias_factor);
        if (!extra_forcing.empty()) {
            fn = fn + extra_forcing[n];
        }
        f.push_back(std::move(fn));
    }
    return f;
}

constexpr double kStallEps = 0.05;  // ratio above 1 - eps counts as a stall

}  // namespace

PicardResult picard_solve(const CoeffField& u0, const NonlinearConfig& cfg,
                          const TimeGrid& tgrid, std::span<const CoeffField> extra_forcing) {
    cfg.validate();
    tgrid.validate();
    if (std::abs(cfg.T - tgrid.t_end) > 1e-12 * std::max(1.0, cfg.T)) {
        throw PreconditionViolated("picard_solve: cfg.T must equal the time grid length");
    }
    if (!extra_forcing.empty() &&
        static_cast<int>(extra_forcing.size()) != tgrid.n_nodes()) {
        throw ShapeMismatch("picard_solve: one extra forcing sample per node required");
    }
    for (const auto& v : u0.comp) {
        for (const auto& c : v) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                throw PreconditionViolated("picard_solve: U0 must be finite");
            }
        }
    }

    const double dt = tgrid.dt();
    double window = cfg.T;
    PicardTrace trace;
    int window_index = 0;
    for (;;) {
        const int n_w = static_cast<int>(std::llround(window / dt));
        if (n_w < 1) {
            trace.final_window = window;
            throw PicardNoConvergence("picard_solve: window shrunk below dt", trace);
        }
        const TimeGrid wgrid{n_w * dt, n_w};
        std::span<const CoeffField> g_window =
            extra_forcing.empty() ? std::span<const CoeffField>{}
                                  : extra_forcing.subspan(0, static_cast<std::size_t>(n_w) + 1);

        Trajectory u_prev = linear::solve_linear_core(u0, g_window, wgrid);
        double prev_inc = std::numeric_limits<double>::quiet_NaN();
        int stall_count = 0;
        for (int iter = 1; iter <= cfg.max_picard_iters; ++iter) {
            const std::vector<CoeffField> f = picard_forcing(u_prev, cfg, g_window);
            Trajectory u_next = linear::solve_linear_core(u0, f, wgrid);
            const double inc = linear::mr_norm(difference(u_next, u_prev));
            const double ratio = inc / prev_inc;  // NaN on the first iteration
            trace.iterations.push_back({window_index, iter, inc, ratio, wgrid.t_end});

            if (std::isfinite(inc) && inc < cfg.contraction_tol) {
                trace.windows_used = window_index + 1;
                trace.final_window = wgrid.t_end;
                trace.converged = true;
                return {std::move(u_next), std::move(trace)};
            }
            if (!std::isfinite(inc)) {
                stall_count = 3;
            } else if (std::isfinite(ratio) && ratio > 1.0 - kStallEps) {
                ++stall_count;
            } else {
                stall_count = 0;
            }
            if (stall_count >= 3) {
                break;
            }
            u_prev = std::move(u_next);
            prev_inc = inc;
        }
        window *= cfg.shrink_factor;
        ++window_index;
        trace.windows_used = window_index + 1;
    }
}

double duhamel_defect(const Trajectory& traj, const CoeffField& u0, const NonlinearConfig& cfg,
                      std::span<const CoeffField> extra_forcing) {
    std::span<const CoeffField> g_window =
        extra_forcing.empty() ? std::span<const CoeffField>{}
                              : extra_forcing.subspan(0, traj.nodes.size());
    const std::vector<CoeffField> f = picard_forcing(traj, cfg, g_window);
    const Trajectory sweep = linear::solve_linear_core(u0, f, traj.time);
    return linear::mr_norm(difference(sweep, traj));
}

EnergySeries energy_report(const Trajectory& traj, double a, int dealias_factor) {
    if (grid::has_zero_mode(traj.space)) {
        double z = 0.0;
        for (const auto& node : traj.nodes) {
            for (const auto& c : node.comp) z = std::max(z, std::abs(c[0]));
        }
        if (z > 1e-14) {
            throw ZeroModeNotInvertible("energy_report: trajectory carries a zero mode");
        }
    }
    const int n_nodes = traj.time.n_nodes();
    const double dt = traj.time.dt();
    EnergySeries out;
    out.t.reserve(static_cast<std::size_t>(n_nodes));
    for (int n = 0; n < n_nodes; ++n) {
        const auto& u = traj.nodes[static_cast<std::size_t>(n)];
        const double l2 = grid::coeff_l2_norm(u);
        double e = 0.5 * l2 * l2;
        if (a != 0.0) {
            const grid::ScalarCoeff u1{traj.space, u.comp[0]};
            const double l4 = grid::scalar_lp_norm(u1, 4.0, std::max(2, dealias_factor));
            e += 0.25 * a * l4 * l4 * l4 * l4;
        }
        out.t.push_back(traj.time.node(n));
        out.energy.push_back(e);
        out.dissipation.push_back(grid::grad_l2_sq(traj.space, u.comp[2]));
    }
    out.residual.resize(static_cast<std::size_t>(n_nodes));
    for (int n = 0; n < n_nodes; ++n) {
        double ddt;
        if (n == 0) {
            ddt = (out.energy[1] - out.energy[0]) / dt;
        } else if (n + 1 == n_nodes) {
            ddt = (out.energy[static_cast<std::size_t>(n)] -
                   out.energy[static_cast<std::size_t>(n - 1)]) / dt;
        } else {
            ddt = (out.energy[static_cast<std::size_t>(n + 1)] -
                   out.energy[static_cast<std::size_t>(n - 1)]) / (2.0 * dt);
        }
        out.residual[static_cast<std::size_t>(n)] =
            std::abs(ddt + out.dissipation[static_cast<std::size_t>(n)]);
    }
    return out;
}

double analyticity_proxy(const Trajectory& traj, double t_probe) {
    if (!(t_probe > 0.0) || t_probe > traj.time.t_end * (1.0 + 1e-12)) {
        throw PreconditionViolated("analyticity_proxy: t_probe must lie inside the window");
    }
    const int node = static_cast<int>(std::llround(t_probe / traj.time.dt()));
    const auto& u = traj.nodes[static_cast<std::size_t>(std::clamp(node, 0, traj.time.n_steps))];

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n_pts = 0;
    for (std::size_t m = 0; m < u.comp[0].size(); ++m) {
        const double nrm = norm2({u.comp[0][m], u.comp[1][m], u.comp[2][m]});
        if (nrm <= 1e-14) {
            continue;
        }
        const double x = std::sqrt(grid::laplacian_symbol(traj.space, m));
        const double y = std::log(nrm);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n_pts;
    }
    if (n_pts < 8) {
        throw InsufficientBand("analyticity_proxy: fewer than 8 modes above the noise floor");
    }
    const double n = static_cast<double>(n_pts);
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        throw InsufficientBand("analyticity_proxy: degenerate |zeta| distribution");
    }
    return (n * sxy - sx * sy) / denom;
}

}  // namespace thermoplate::nonlinear
