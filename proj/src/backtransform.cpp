#include "thermoplate/backtransform.hpp"

#include <cmath>

#include "thermoplate/nonlinear.hpp"

namespace thermoplate::backtransform {

using grid::ScalarCoeff;

Recovered recover(const grid::CoeffField& state) {
    Recovered out;
    out.u = grid::dirichlet_inverse_laplacian({state.grid, state.comp[0]});
    out.u_t = {state.grid, state.comp[1]};
    out.theta = {state.grid, state.comp[2]};
    return out;
}

RecoveredTrajectory recover_trajectory(const linear::Trajectory& traj) {
    RecoveredTrajectory out;
    out.space = traj.space;
    out.time = traj.time;
    out.u.reserve(traj.nodes.size());
    out.u_t.reserve(traj.nodes.size());
    out.theta.reserve(traj.nodes.size());
    for (const auto& node : traj.nodes) {
        Recovered r = recover(node);
        out.u.push_back(std::move(r.u));
        out.u_t.push_back(std::move(r.u_t));
        out.theta.push_back(std::move(r.theta));
    }
    return out;
}

namespace {

std::vector<cx> time_derivative(const std::vector<ScalarCoeff>& series, std::size_t n,
                                double dt) {
    const std::size_t last = series.size() - 1;
    std::vector<cx> out(series[n].values.size());
    if (n == 0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = (series[1].values[i] - series[0].values[i]) / dt;
        }
    } else if (n == last) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = (series[last].values[i] - series[last - 1].values[i]) / dt;
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = (series[n + 1].values[i] - series[n - 1].values[i]) / (2.0 * dt);
        }
    }
    return out;
}

}  // namespace

ResidualSeries residual_original(const RecoveredTrajectory& traj,
                                 const std::vector<ScalarCoeff>& g,
                                 const std::vector<ScalarCoeff>& h, double a,
                                 int dealias_factor) {
    const std::size_t n_nodes = traj.u.size();
    if (n_nodes != traj.u_t.size() || n_nodes != traj.theta.size() ||
        n_nodes != static_cast<std::size_t>(traj.time.n_nodes())) {
        throw ShapeMismatch("residual_original: trajectory lengths disagree");
    }
    if ((!g.empty() && g.size() != n_nodes) || (!h.empty() && h.size() != n_nodes)) {
        throw ShapeMismatch("residual_original: forcing must carry one sample per node");
    }
    const grid::Grid& space = traj.space;
    const std::size_t n_modes = space.size();
    const double dt = traj.time.dt();
    const double weight = [&] {
        double w = 1.0;
        for (int d = 0; d < space.ndim(); ++d) w *= space.parseval_weight(d);
        return w;
    }();

    ResidualSeries out;
    for (std::size_t n = 0; n < n_nodes; ++n) {
        // u_tt as the time derivative of u_t (the first-order identity
        // halves the differencing error relative to a second difference).
        const std::vector<cx> u_tt = time_derivative(traj.u_t, n, dt);
        const std::vector<cx> theta_t = time_derivative(traj.theta, n, dt);

        // Cube of Delta u, dealiased.
        std::vector<cx> delta_u(n_modes);
        for (std::size_t i = 0; i < n_modes; ++i) {
            delta_u[i] = -grid::laplacian_symbol(space, i) * traj.u[n].values[i];
        }
        const std::vector<cx> cube =
            a == 0.0 ? std::vector<cx>(n_modes, cx(0.0, 0.0))
                     : nonlinear::dealiased_cube(space, delta_u, dealias_factor);

        double acc1 = 0.0, acc2 = 0.0;
        for (std::size_t i = 0; i < n_modes; ++i) {
            const double zsq = grid::laplacian_symbol(space, i);
            cx r1 = u_tt[i] + zsq * zsq * traj.u[n].values[i] - zsq * traj.theta[n].values[i] -
                    a * zsq * cube[i];
            cx r2 = theta_t[i] + zsq * traj.theta[n].values[i] + zsq * traj.u_t[n].values[i];
            if (!g.empty()) r1 -= g[n].values[i];
            if (!h.empty()) r2 -= h[n].values[i];
            acc1 += std::norm(r1);
            acc2 += std::norm(r2);
        }
        out.t.push_back(traj.time.node(static_cast<int>(n)));
        out.r1.push_back(std::sqrt(acc1 * weight));
        out.r2.push_back(std::sqrt(acc2 * weight));
    }
    return out;
}

}  // namespace thermoplate::backtransform
