#include "thermoplate/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace thermoplate::io {

namespace {

std::string json_number(double v) {
    if (!std::isfinite(v)) {
        return "null";
    }
    return fmt_double(v);
}

void append_double_array(std::ostringstream& out, const char* key,
                         const std::vector<double>& values, bool trailing_comma) {
    out << "  \"" << key << "\": [";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out << ", ";
        out << json_number(values[i]);
    }
    out << "]" << (trailing_comma ? "," : "") << "\n";
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        throw ValidationError("failed to open for writing: " + path.string());
    }
    out << content;
    if (!out.good()) {
        throw ValidationError("failed to write: " + path.string());
    }
}

std::string sector_report_json(const symbol::SectorReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"eigenvalues_of_M\": [";
    for (int i = 0; i < 3; ++i) {
        if (i > 0) out << ", ";
        const cx ev = report.eigenvalues_of_M[static_cast<std::size_t>(i)];
        out << "{\"re\": " << fmt_double(ev.real()) << ", \"im\": " << fmt_double(ev.imag())
            << "}";
    }
    out << "],\n";
    out << "  \"spectral_angle\": " << fmt_double(report.spectral_angle) << ",\n";
    out << "  \"margin\": " << fmt_double(report.margin) << ",\n";
    out << "  \"resolvent_sup\": " << fmt_double(report.resolvent_sup) << ",\n";
    out << "  \"sweep\": {\n";
    out << "    \"phi_margin\": " << fmt_double(report.params.phi_margin) << ",\n";
    out << "    \"lambda_radii\": " << report.params.lambda_radii << ",\n";
    out << "    \"lambda_angles\": " << report.params.lambda_angles << ",\n";
    out << "    \"zeta_points\": " << report.params.zeta_points << ",\n";
    out << "    \"samples\": " << report.sweep.size() << "\n";
    out << "  }\n";
    out << "}\n";
    return out.str();
}

std::string resolvent_sweep_csv(const symbol::SectorReport& report) {
    std::ostringstream out;
    out << "re_lambda,im_lambda,abs_zeta_sq,resolvent_norm\n";
    for (const auto& s : report.sweep) {
        out << fmt_double(s.lambda.real()) << "," << fmt_double(s.lambda.imag()) << ","
            << fmt_double(s.zeta_sq) << "," << fmt_double(s.resolvent_norm) << "\n";
    }
    return out.str();
}

std::string solve_report_json(const linear::SolveReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"p\": " << fmt_double(report.p) << ",\n";
    append_double_array(out, "t", report.t, true);
    append_double_array(out, "l2_U", report.l2_U, true);
    append_double_array(out, "lp_U", report.lp_U, true);
    append_double_array(out, "l2_AU", report.l2_AU, true);
    append_double_array(out, "lp_AU", report.lp_AU, true);
    append_double_array(out, "l2_Ut", report.l2_Ut, true);
    append_double_array(out, "lp_Ut", report.lp_Ut, true);
    append_double_array(out, "l2_F", report.l2_F, true);
    append_double_array(out, "lp_F", report.lp_F, true);
    append_double_array(out, "dissipation_residual", report.dissipation_residual, true);
    out << "  \"max_reg_ratio\": "
        << (report.max_reg_ratio ? json_number(*report.max_reg_ratio) : "null") << "\n";
    out << "}\n";
    return out.str();
}

std::string picard_trace_json(const nonlinear::PicardTrace& trace, std::uint64_t seed) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"seed\": " << seed << ",\n";
    out << "  \"converged\": " << (trace.converged ? "true" : "false") << ",\n";
    out << "  \"windows_used\": " << trace.windows_used << ",\n";
    out << "  \"final_window\": " << fmt_double(trace.final_window) << ",\n";
    out << "  \"iterations\": [\n";
    for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
        const auto& it = trace.iterations[i];
        out << "    {\"window\": " << it.window_index << ", \"iteration\": " << it.iteration
            << ", \"increment_norm\": " << json_number(it.increment_norm)
            << ", \"ratio\": " << json_number(it.ratio)
            << ", \"window_length\": " << json_number(it.window_length) << "}"
            << (i + 1 < trace.iterations.size() ? "," : "") << "\n";
    }
    out << "  ]\n";
    out << "}\n";
    return out.str();
}

std::string rbound_json(const RBoundReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"seed\": " << report.seed << ",\n";
    out << "  \"p\": " << fmt_double(report.p) << ",\n";
    out << "  \"n_draws\": " << report.n_draws << ",\n";
    append_double_array(out, "nested_estimates", report.nested_estimates, true);
    out << "  \"estimate\": " << json_number(report.estimate) << ",\n";
    out << "  \"kahane\": {\"ok\": " << (report.kahane.ok ? "true" : "false")
        << ", \"lhs\": " << json_number(report.kahane.lhs)
        << ", \"rhs\": " << json_number(report.kahane.rhs)
        << ", \"ratio\": " << json_number(report.kahane.ratio) << "}\n";
    out << "}\n";
    return out.str();
}

std::string michlin_csv(const std::vector<multiplier::MichlinTable>& tables,
                        const std::vector<std::string>& alphas) {
    if (alphas.size() != tables.size()) {
        throw ShapeMismatch("michlin_csv: one alpha label per table required");
    }
    std::ostringstream out;
    out << "family,alpha,gamma,sup,grid_level,lambda_samples\n";
    for (std::size_t t = 0; t < tables.size(); ++t) {
        const auto& table = tables[t];
        for (const auto& row : table.rows) {
            out << table.family << "," << alphas[t] << ",";
            for (int g : row.gamma) out << g;
            out << "," << fmt_double(row.sup) << "," << table.grid_level << ","
                << table.lambda_samples << "\n";
        }
    }
    return out.str();
}

std::string trajectory_csv(const linear::Trajectory& traj, int stride) {
    if (stride < 1) {
        throw ConfigInvalid("trajectory_csv: stride >= 1 required");
    }
    const int nd = traj.space.ndim();
    std::ostringstream out;
    out << "t";
    for (int d = 0; d < nd; ++d) out << ",i" << d;
    for (int d = 0; d < nd; ++d) out << ",x" << d;
    out << ",U1,U2,U3\n";
    std::vector<int> idx(static_cast<std::size_t>(nd));
    for (int n = 0; n < traj.time.n_nodes(); n += stride) {
        const grid::PhysField phys =
            grid::inverse_transform(traj.nodes[static_cast<std::size_t>(n)]);
        for (std::size_t flat = 0; flat < phys.comp[0].size(); ++flat) {
            grid::unflatten(traj.space, flat, idx);
            out << fmt_double(traj.time.node(n));
            for (int d = 0; d < nd; ++d) out << "," << idx[static_cast<std::size_t>(d)];
            for (int d = 0; d < nd; ++d) {
                out << ","
                    << fmt_double(traj.space.point_coord(d, idx[static_cast<std::size_t>(d)]));
            }
            out << "," << fmt_double(phys.comp[0][flat]) << "," << fmt_double(phys.comp[1][flat])
                << "," << fmt_double(phys.comp[2][flat]) << "\n";
        }
    }
    return out.str();
}

std::string phys_field_csv(const grid::PhysField& field) {
    const int nd = field.grid.ndim();
    std::ostringstream out;
    for (int d = 0; d < nd; ++d) out << (d > 0 ? "," : "") << "x" << d;
    out << ",U1,U2,U3\n";
    std::vector<int> idx(static_cast<std::size_t>(nd));
    for (std::size_t flat = 0; flat < field.comp[0].size(); ++flat) {
        grid::unflatten(field.grid, flat, idx);
        for (int d = 0; d < nd; ++d) {
            out << (d > 0 ? "," : "")
                << fmt_double(field.grid.point_coord(d, idx[static_cast<std::size_t>(d)]));
        }
        out << "," << fmt_double(field.comp[0][flat]) << "," << fmt_double(field.comp[1][flat])
            << "," << fmt_double(field.comp[2][flat]) << "\n";
    }
    return out.str();
}

std::string coeff_field_csv(const grid::CoeffField& field) {
    const int nd = field.grid.ndim();
    std::ostringstream out;
    for (int d = 0; d < nd; ++d) out << (d > 0 ? "," : "") << "k" << d;
    out << ",re1,im1,re2,im2,re3,im3\n";
    std::vector<int> idx(static_cast<std::size_t>(nd));
    for (std::size_t flat = 0; flat < field.comp[0].size(); ++flat) {
        grid::unflatten(field.grid, flat, idx);
        for (int d = 0; d < nd; ++d) out << (d > 0 ? "," : "") << idx[static_cast<std::size_t>(d)];
        for (int c = 0; c < 3; ++c) {
            const cx v = field.comp[static_cast<std::size_t>(c)][flat];
            out << "," << fmt_double(v.real()) << "," << fmt_double(v.imag());
        }
        out << "\n";
    }
    return out.str();
}

std::string energy_csv(const nonlinear::EnergySeries& series) {
    std::ostringstream out;
    out << "t,E,dissipation,residual\n";
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        out << fmt_double(series.t[i]) << "," << fmt_double(series.energy[i]) << ","
            << fmt_double(series.dissipation[i]) << "," << fmt_double(series.residual[i]) << "\n";
    }
    return out.str();
}

std::string residual_csv(const backtransform::ResidualSeries& series) {
    std::ostringstream out;
    out << "t,r1,r2\n";
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        out << fmt_double(series.t[i]) << "," << fmt_double(series.r1[i]) << ","
            << fmt_double(series.r2[i]) << "\n";
    }
    return out.str();
}

}  // namespace thermoplate::io
