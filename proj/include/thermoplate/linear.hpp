#pragma once

#include <optional>
#include <span>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/mat3.hpp"

namespace thermoplate::linear {

struct TimeGrid {
    double t_end = 1.0;
    int n_steps = 1;

    void validate() const {
        if (!(t_end > 0.0) || n_steps < 1) {
            throw ConfigInvalid("time grid: t_end > 0 and n_steps >= 1 required");
        }
    }
    double dt() const { return t_end / n_steps; }
    int n_nodes() const { return n_steps + 1; }
    double node(int i) const { return t_end * i / n_steps; }
};

struct Trajectory {
    grid::Grid space;
    TimeGrid time;
    std::vector<grid::CoeffField> nodes;  // size time.n_nodes()
};

// exp(-t |zeta|^2 M) u0 through the cached eigen-decomposition; exact
// mode-wise semigroup.
Vec3 propagate_mode_sq(const Vec3& u0, double zeta_sq, double t);
Vec3 propagate_mode(const Vec3& u0, std::span<const double> zeta, double t);

// A U: per mode |zeta|^2 M u.
grid::CoeffField apply_A(const grid::CoeffField& u);

// Exact mode-wise Duhamel step for forcing reconstructed piecewise-linearly
// between nodes (exponential trapezoid). forcing is either empty (F = 0) or
// one CoeffField per time node.
Trajectory solve_linear_core(const grid::CoeffField& u0,
                             std::span<const grid::CoeffField> forcing,
                             const TimeGrid& tgrid);

struct SolveReport {
    double p = 2.0;
    std::vector<double> t;
    std::vector<double> l2_U, lp_U;
    std::vector<double> l2_AU, lp_AU;
    std::vector<double> l2_Ut, lp_Ut;
    std::vector<double> l2_F, lp_F;
    std::vector<double> dissipation_residual;  // interior nodes 1..n-1, F = 0 runs
    std::optional<double> max_reg_ratio;       // present when ||F|| > 0
};

SolveReport make_solve_report(const Trajectory& traj,
                              std::span<const grid::CoeffField> forcing, double p);

std::pair<Trajectory, SolveReport> solve_linear(const grid::CoeffField& u0,
                                                std::span<const grid::CoeffField> forcing,
                                                const TimeGrid& tgrid, double p = 2.0);

// (||U_t|| + ||A U||) / ||F|| in discrete L^p((0,T), L^p) norms with U0 = 0.
// Throws ZeroForcing when the forcing vanishes.
double max_reg_ratio(std::span<const grid::CoeffField> forcing, double p,
                     const TimeGrid& tgrid);

// | d/dt 1/2 ||U||^2 + ||grad U_3||^2 | at interior nodes, centered
// differences; meaningful for F = 0 trajectories where the exact flow
// satisfies d/dt 1/2 ||U||^2 = -||grad U_3||^2.
std::vector<double> dissipation_residual(const Trajectory& traj);

// Steady state (|zeta|^2 M)^{-1} F for time-independent forcing; requires
// every forced mode to carry |zeta|^2 > 0.
grid::CoeffField steady_state(const grid::CoeffField& f_hat);

// Integrates U' + AU = F (constant F) until ||U_t||_{L^2} < tol, stepping by
// dt up to t_max; the realization of running on an unbounded time interval
// for invertible setups. Returns the trajectory up to the stopping node and
// whether the criterion was met.
std::pair<Trajectory, bool> solve_to_steady_state(const grid::CoeffField& u0,
                                                  const grid::CoeffField& f_hat, double dt,
                                                  double t_max, double tol = 1e-10);

// sup over populated modes of |zeta|^2 ||e^{-tA} u0_hat(zeta)|| normalized
// by ||u0_hat(zeta)||; the fiberwise discretization of the
// analytic-semigroup bound ||A e^{-tA}|| <= C/t.
double analytic_smoothing_sup(const grid::CoeffField& u0, double t);

// Trapezoid-in-time of per-node spatial norms: (int s(t)^p dt)^{1/p}.
double lp_time_norm(std::span<const double> node_norms, double dt, double p);

// Discrete stand-in for the trace-space norm of initial data:
// || (1 + |zeta|^2)^{(2 - 2/p)/2} U0_hat ||_{l^p weighted}.
double trace_proxy_norm(const grid::CoeffField& u0, double p);

// Discrete maximal-regularity norm ||D|| + ||D_t|| + ||A D|| of a trajectory,
// L^2 in space (Parseval) and time, D_t by finite differences. Used to
// monitor Picard increments.
double mr_norm(const Trajectory& traj);

}  // namespace thermoplate::linear
