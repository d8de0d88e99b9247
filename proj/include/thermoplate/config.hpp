#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"
#include "thermoplate/nonlinear.hpp"

namespace thermoplate::config {

// Flat JSON configuration with one section per module. Parsing is strict:
// unknown keys and type mismatches are ConfigInvalid with the field path.

struct SweepConfig {
    int xi_points = 16;
    double xi_min = 1e-2;
    double xi_max = 1e2;
    int k_max = 16;
    int lambda_radii = 8;
    int lambda_angles = 9;
    double phi_margin = 0.05;
    double lambda_r_min = 1e-3;
    double lambda_r_max = 1e3;
    int hf_nodes = 100;  // contour nodes per ray inside sweeps
    double fd_rel_step = 1e-3;

    void validate() const;
};

struct RBoundConfig {
    int n_ops = 16;
    int n_draws = 512;
    double p = 2.0;

    void validate() const;
};

struct InitialConfig {
    std::string kind = "smooth_random";  // single_mode | smooth_random | rough_random
    std::vector<int> mode = {1, 1};      // single_mode only, 1-based sine index per direction
    double amplitude = 1.0;
    std::array<double, 3> components = {1.0, 1.0, 1.0};
    double decay = 1.0;  // smooth_random spectral decay rate

    void validate() const;
};

struct ForcingConfig {
    std::string kind = "none";  // none | constant_mode | random_smooth
    std::vector<int> mode = {1, 1};
    double amplitude = 1.0;
    std::array<double, 3> components = {0.0, 1.0, 1.0};
    double decay = 1.0;

    void validate() const;
};

struct Config {
    grid::DomainSpec domain;
    linear::TimeGrid time;
    nonlinear::NonlinearConfig nonlinear;
    SweepConfig sweep;
    RBoundConfig rbound;
    InitialConfig initial;
    ForcingConfig forcing;
    std::uint64_t seed = 20240101;
    int output_stride = 10;
    double p = 2.0;  // report norm exponent

    void validate() const;
};

Config default_config();
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);
std::string default_config_json();

// Deterministic per-mode key: a function of the signed frequency indices, so
// the same mode receives the same random coefficient at every resolution.
std::uint64_t mode_key(const grid::Grid& g, std::size_t flat);

grid::CoeffField build_initial(const InitialConfig& cfg, const grid::Grid& g,
                               std::uint64_t seed);
std::vector<grid::CoeffField> build_forcing(const ForcingConfig& cfg, const grid::Grid& g,
                                            const linear::TimeGrid& tgrid, std::uint64_t seed);

}  // namespace thermoplate::config
