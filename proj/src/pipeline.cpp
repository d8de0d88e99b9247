#include "thermoplate/pipeline.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "thermoplate/backtransform.hpp"
#include "thermoplate/extension.hpp"
#include "thermoplate/io.hpp"
#include "thermoplate/multiplier.hpp"
#include "thermoplate/nonlinear.hpp"
#include "thermoplate/rng.hpp"
#include "thermoplate/symbol.hpp"

namespace thermoplate::pipeline {

namespace fs = std::filesystem;
using config::Config;

namespace {

symbol::SectorSweepParams sector_params(const Config& cfg) {
    symbol::SectorSweepParams p;
    p.phi_margin = cfg.sweep.phi_margin;
    p.lambda_radii = cfg.sweep.lambda_radii;
    p.lambda_angles = cfg.sweep.lambda_angles;
    p.lambda_r_min = cfg.sweep.lambda_r_min;
    p.lambda_r_max = cfg.sweep.lambda_r_max;
    return p;
}

std::vector<cx> sweep_lambdas(const Config& cfg, int radii_factor) {
    return multiplier::sweep_lambda_set(
        symbol::spectral_angle() + cfg.sweep.phi_margin,
        cfg.sweep.lambda_radii * radii_factor, cfg.sweep.lambda_angles,
        cfg.sweep.lambda_r_min, cfg.sweep.lambda_r_max);
}

std::vector<grid::ScalarCoeff> component_series(const std::vector<grid::CoeffField>& fields,
                                                int comp) {
    std::vector<grid::ScalarCoeff> out;
    out.reserve(fields.size());
    for (const auto& f : fields) {
        out.push_back({f.grid, f.comp[static_cast<std::size_t>(comp)]});
    }
    return out;
}

bool component_is_zero(const std::vector<grid::CoeffField>& fields, int comp) {
    for (const auto& f : fields) {
        for (const auto& v : f.comp[static_cast<std::size_t>(comp)]) {
            if (v != cx(0.0, 0.0)) return false;
        }
    }
    return true;
}

void write_residual_if_possible(const linear::Trajectory& traj,
                                const std::vector<grid::CoeffField>& forcing, double a,
                                const fs::path& out_dir) {
    if (!forcing.empty() && !component_is_zero(forcing, 0)) {
        return;  // forcing on component 1 is outside the second-order form
    }
    try {
        const backtransform::RecoveredTrajectory rec = backtransform::recover_trajectory(traj);
        std::vector<grid::ScalarCoeff> g, h;
        if (!forcing.empty()) {
            g = component_series(forcing, 1);
            h = component_series(forcing, 2);
        }
        const backtransform::ResidualSeries res = backtransform::residual_original(rec, g, h, a);
        io::write_text_file(out_dir / "residual.csv", io::residual_csv(res));
    } catch (const ZeroModeNotInvertible&) {
        // back-transformation undefined on this domain; skip the series
    }
}

}  // namespace

void run_symbol_report(const Config& cfg, const fs::path& out_dir) {
    const symbol::SectorReport report = symbol::compute_sector_report(sector_params(cfg));
    io::write_text_file(out_dir / "sector_report.json", io::sector_report_json(report));
    io::write_text_file(out_dir / "resolvent_sweep.csv", io::resolvent_sweep_csv(report));
}

void run_multiplier_check(const Config& cfg, const fs::path& out_dir) {
    const std::vector<cx> lambdas = sweep_lambdas(cfg, 1);
    const std::vector<cx> lambdas_refined = sweep_lambdas(cfg, 2);

    multiplier::MichlinSweepSpec spec;
    spec.n1 = 1;
    spec.n2 = 1;
    spec.lambda_relative = true;
    spec.xi_points = cfg.sweep.xi_points;
    spec.xi_min = cfg.sweep.xi_min;
    spec.xi_max = cfg.sweep.xi_max;
    spec.k_max = cfg.sweep.k_max;
    spec.fd_rel_step = cfg.sweep.fd_rel_step;

    std::vector<multiplier::MichlinTable> tables;
    std::vector<std::string> labels;
    const std::vector<std::vector<int>> alphas = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    for (const auto& alpha : alphas) {
        spec.family = "kappa";
        spec.lambdas = lambdas;
        const auto stability = multiplier::michlin_stability(
            spec, multiplier::make_kappa_eval(alpha), lambdas_refined);
        std::string label = "a" + std::to_string(alpha[0]) + std::to_string(alpha[1]);
        tables.push_back(stability.base);
        labels.push_back(label);
        tables.push_back(stability.refined);
        labels.push_back(label);
    }
    {
        spec.family = "h_rho";
        spec.lambdas.clear();
        symbol::TestFunction rho = symbol::tf_rho();
        symbol::ContourSpec contour = symbol::default_contour(rho);
        contour.n_nodes = cfg.sweep.hf_nodes;
        const auto stability = multiplier::michlin_stability(
            spec, multiplier::make_hf_eval(rho, contour), {});
        tables.push_back(stability.base);
        labels.push_back("-");
        tables.push_back(stability.refined);
        labels.push_back("-");
    }
    io::write_text_file(out_dir / "michlin_sweep.csv", io::michlin_csv(tables, labels));

    // R-bound estimate over sampled resolvent evaluations.
    const CounterRng rng(cfg.seed);
    multiplier::RBoundSample sample;
    sample.n_draws = cfg.rbound.n_draws;
    sample.seed = cfg.seed;
    const double phi = symbol::spectral_angle() + cfg.sweep.phi_margin;
    for (int j = 0; j < cfg.rbound.n_ops; ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        const double r = std::pow(10.0, -2.0 + 4.0 * rng.uniform01(11, ju));
        const double theta = (kPi - phi) * 0.98 * rng.uniform_sym(12, ju);
        const cx lambda = std::polar(r, theta);
        const double zeta_abs = std::pow(10.0, -1.0 + 2.0 * rng.uniform01(13, ju));
        sample.operators.push_back(symbol::resolvent_at_sq(lambda, zeta_abs * zeta_abs) * lambda);
        sample.vectors.push_back(
            {rng.complex_sym(14, 3 * ju), rng.complex_sym(14, 3 * ju + 1),
             rng.complex_sym(14, 3 * ju + 2)});
    }
    io::RBoundReport report;
    report.seed = cfg.seed;
    report.p = cfg.rbound.p;
    report.n_draws = cfg.rbound.n_draws;
    report.nested_estimates = multiplier::rbound_nested_scan(sample, cfg.rbound.p);
    report.estimate = report.nested_estimates.back();

    std::vector<cx> ka(8), kb(8);
    std::vector<Vec3> kx(8);
    for (std::size_t j = 0; j < 8; ++j) {
        kb[j] = rng.complex_sym(21, j);
        ka[j] = kb[j] * rng.uniform01(22, j);
        kx[j] = {rng.complex_sym(23, 3 * j), rng.complex_sym(23, 3 * j + 1),
                 rng.complex_sym(23, 3 * j + 2)};
    }
    report.kahane = multiplier::kahane_check(ka, kb, kx, cfg.rbound.p, cfg.rbound.n_draws,
                                             cfg.seed ^ 0x4b41ULL);
    io::write_text_file(out_dir / "rbound.json", io::rbound_json(report));
}

void run_solve_linear(const Config& cfg, const fs::path& out_dir) {
    const grid::Grid g = grid::Grid::from_domain(cfg.domain);
    const grid::CoeffField u0 = config::build_initial(cfg.initial, g, cfg.seed);
    const std::vector<grid::CoeffField> forcing =
        config::build_forcing(cfg.forcing, g, cfg.time, cfg.seed);
    const auto [traj, report] = linear::solve_linear(u0, forcing, cfg.time, cfg.p);
    io::write_text_file(out_dir / "solve_report.json", io::solve_report_json(report));
    io::write_text_file(out_dir / "trajectory.csv",
                        io::trajectory_csv(traj, cfg.output_stride));
    write_residual_if_possible(traj, forcing, 0.0, out_dir);
}

void run_solve_nonlinear(const Config& cfg, const fs::path& out_dir) {
    const grid::Grid g = grid::Grid::from_domain(cfg.domain);
    const grid::CoeffField u0 = config::build_initial(cfg.initial, g, cfg.seed);
    nonlinear::NonlinearConfig ncfg = cfg.nonlinear;
    ncfg.T = cfg.time.t_end;
    try {
        const nonlinear::PicardResult result = nonlinear::picard_solve(u0, ncfg, cfg.time);
        io::write_text_file(out_dir / "picard_trace.json",
                            io::picard_trace_json(result.trace, cfg.seed));
        io::write_text_file(out_dir / "trajectory.csv",
                            io::trajectory_csv(result.trajectory, cfg.output_stride));
        const nonlinear::EnergySeries energy =
            nonlinear::energy_report(result.trajectory, ncfg.a, ncfg.dealias_factor);
        io::write_text_file(out_dir / "energy.csv", io::energy_csv(energy));
        write_residual_if_possible(result.trajectory, {}, ncfg.a, out_dir);
    } catch (const nonlinear::PicardNoConvergence& e) {
        io::write_text_file(out_dir / "picard_trace.json",
                            io::picard_trace_json(e.trace, cfg.seed));
        throw;
    }
}

void run_bundle(const Config& cfg, const fs::path& out_dir) {
    run_symbol_report(cfg, out_dir);
    run_multiplier_check(cfg, out_dir);
    run_solve_linear(cfg, out_dir / "linear");
    run_solve_nonlinear(cfg, out_dir / "nonlinear");
}

}  // namespace thermoplate::pipeline
