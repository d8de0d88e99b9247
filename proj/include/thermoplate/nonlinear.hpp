#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"

namespace thermoplate::nonlinear {

struct NonlinearConfig {
    double a = 1.0;
    double T = 1.0;
    int max_picard_iters = 50;
    double contraction_tol = 1e-10;
    int dealias_factor = 2;  // factor-2 zero padding makes the cubic exact
    double shrink_factor = 0.5;

    void validate() const {
        if (!(a >= 0.0)) {
            throw ConfigInvalid("nonlinear: a >= 0 required (a > 0 in the model)");
        }
        if (!(T > 0.0)) {
            throw ConfigInvalid("nonlinear: T > 0 required");
        }
        if (max_picard_iters < 1) {
            throw ConfigInvalid("nonlinear: max_picard_iters >= 1 required");
        }
        if (!(contraction_tol > 0.0)) {
            throw ConfigInvalid("nonlinear: contraction_tol > 0 required");
        }
        if (dealias_factor < 2) {
            throw ConfigInvalid("nonlinear: dealias_factor >= 2 required for the cubic");
        }
        if (!(shrink_factor > 0.0) || !(shrink_factor < 1.0)) {
            throw ConfigInvalid("nonlinear: shrink_factor in (0,1) required");
        }
    }
};

// Phi(U) = -a Laplace (0, U_1^3, 0)^T: component 2 carries a |zeta|^2 times
// the dealiased cube of U_1, components 1 and 3 vanish.
grid::CoeffField phi(const grid::CoeffField& u, double a, int dealias_factor = 2);

// The cube of a scalar field computed pointwise on the grid refined by
// dealias_factor, then truncated back; exact for factor >= 2.
std::vector<cx> dealiased_cube(const grid::Grid& g, const std::vector<cx>& coeffs,
                               int dealias_factor);

struct PicardTrace {
    struct Iteration {
        int window_index;
        int iteration;
        double increment_norm;  // ||U^{k+1} - U^k|| in the discrete MR norm
        double ratio;           // NaN on the first iteration of a window
        double window_length;
    };
    std::vector<Iteration> iterations;
    int windows_used = 1;
    double final_window = 0.0;
    bool converged = false;
};

class PicardNoConvergence : public NoConvergence {
public:
    PicardNoConvergence(const std::string& what, PicardTrace t)
        : NoConvergence(what), trace(std::move(t)) {}
    PicardTrace trace;
};

struct PicardResult {
    linear::Trajectory trajectory;
    PicardTrace trace;
};

// Global-in-window Picard iteration U^{k+1} = Duhamel(U0, Phi(U^k) + G):
// stops when the increment norm falls below contraction_tol; after three
// consecutive non-contracting iterations the window is shrunk by
// shrink_factor (keeping dt) and the iteration restarts. Throws
// PicardNoConvergence (carrying the trace) once the window falls below dt.
// extra_forcing, when nonempty, supplies one sample per node of tgrid
// (manufactured-solution source terms).
PicardResult picard_solve(const grid::CoeffField& u0, const NonlinearConfig& cfg,
                          const linear::TimeGrid& tgrid,
                          std::span<const grid::CoeffField> extra_forcing = {});

// Residual of the discrete Duhamel fixed-point equation for a trajectory.
double duhamel_defect(const linear::Trajectory& traj, const grid::CoeffField& u0,
                      const NonlinearConfig& cfg,
                      std::span<const grid::CoeffField> extra_forcing = {});

struct EnergySeries {
    std::vector<double> t;
    std::vector<double> energy;       // E(t)
    std::vector<double> dissipation;  // ||grad theta||^2
    std::vector<double> residual;     // |dE/dt + dissipation|, one-sided ends
};

// E(t) = 1/2 ||u_t||^2 + 1/2 ||Delta u||^2 + 1/2 ||theta||^2
//        + a/4 ||Delta u||_{L^4}^4, evaluated from U = (Delta u, u_t, theta).
// Requires a back-transformable trajectory (no energy on a zero mode).
EnergySeries energy_report(const linear::Trajectory& traj, double a, int dealias_factor = 2);

// Least-squares slope of log ||U_hat(t_probe, zeta)|| against |zeta| over
// modes above the 1e-14 noise floor; negative slope is the spectral
// signature of spatial analyticity. Throws InsufficientBand with fewer than
// 8 usable modes.
double analyticity_proxy(const linear::Trajectory& traj, double t_probe);

}  // namespace thermoplate::nonlinear
