#pragma once

#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"

namespace thermoplate::backtransform {

// Recovery of the second-order variables from U = (Delta u, u_t, theta):
// u is the Dirichlet inverse Laplacian of U_1, the others are copies.
struct Recovered {
    grid::ScalarCoeff u;
    grid::ScalarCoeff u_t;
    grid::ScalarCoeff theta;
};

Recovered recover(const grid::CoeffField& state);

struct RecoveredTrajectory {
    grid::Grid space;
    linear::TimeGrid time;
    std::vector<grid::ScalarCoeff> u, u_t, theta;
};

RecoveredTrajectory recover_trajectory(const linear::Trajectory& traj);

struct ResidualSeries {
    std::vector<double> t;
    std::vector<double> r1;  // ||u_tt + Delta^2 u + Delta theta + a Delta (Delta u)^3 - g||_L2
    std::vector<double> r2;  // ||theta_t - Delta theta - Delta u_t - h||_L2
};

// Residuals of the original second-order system along recovered
// trajectories. Time derivatives by centered differences (one-sided at the
// endpoints; exclude the first/last node when reading off convergence
// orders). g and h may be empty (zero forcing) or carry one sample per node.
ResidualSeries residual_original(const RecoveredTrajectory& traj,
                                 const std::vector<grid::ScalarCoeff>& g,
                                 const std::vector<grid::ScalarCoeff>& h, double a,
                                 int dealias_factor = 2);

}  // namespace thermoplate::backtransform
