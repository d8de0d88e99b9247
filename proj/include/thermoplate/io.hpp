#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "thermoplate/backtransform.hpp"
#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/linear.hpp"
#include "thermoplate/multiplier.hpp"
#include "thermoplate/nonlinear.hpp"
#include "thermoplate/symbol.hpp"

namespace thermoplate::io {

// All emitters print doubles with 17 significant digits and fixed key /
// column order, so identical inputs produce byte-identical files.

void write_text_file(const std::filesystem::path& path, const std::string& content);

std::string sector_report_json(const symbol::SectorReport& report);
std::string resolvent_sweep_csv(const symbol::SectorReport& report);

std::string solve_report_json(const linear::SolveReport& report);
std::string picard_trace_json(const nonlinear::PicardTrace& trace, std::uint64_t seed);

struct RBoundReport {
    std::uint64_t seed;
    double p;
    int n_draws;
    std::vector<double> nested_estimates;
    double estimate;
    multiplier::KahaneResult kahane;
};

std::string rbound_json(const RBoundReport& report);

std::string michlin_csv(const std::vector<multiplier::MichlinTable>& tables,
                        const std::vector<std::string>& alphas);

std::string trajectory_csv(const linear::Trajectory& traj, int stride);
std::string phys_field_csv(const grid::PhysField& field);
std::string coeff_field_csv(const grid::CoeffField& field);
std::string energy_csv(const nonlinear::EnergySeries& series);
std::string residual_csv(const backtransform::ResidualSeries& series);

}  // namespace thermoplate::io
