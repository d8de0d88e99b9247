#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "thermoplate/io.hpp"
#include "thermoplate/rng.hpp"

using namespace thermoplate;
namespace g = thermoplate::grid;

namespace {

g::Grid small_grid() {
    g::DomainSpec spec;
    spec.n2 = 2;
    spec.modes = {4, 4};
    return g::Grid::from_domain(spec);
}

}  // namespace

TEST_CASE("doubles are printed with 17 significant digits and round-trip") {
    const double v = 0.1234567890123456789;
    const std::string s = fmt_double(v);
    CHECK(std::stod(s) == v);
    CHECK(fmt_double(1.0) == "1");
    CHECK(fmt_double(kPi) == "3.1415926535897931");
}

TEST_CASE("sector report serialization carries the sweep columns") {
    symbol::SectorSweepParams params;
    params.lambda_radii = 3;
    params.lambda_angles = 3;
    params.zeta_points = 3;
    const auto report = symbol::compute_sector_report(params);
    const std::string json = io::sector_report_json(report);
    CHECK(json.find("\"spectral_angle\"") != std::string::npos);
    CHECK(json.find("\"resolvent_sup\"") != std::string::npos);
    const std::string csv = io::resolvent_sweep_csv(report);
    CHECK(csv.rfind("re_lambda,im_lambda,abs_zeta_sq,resolvent_norm\n", 0) == 0);
    // header + one row per sample
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 27);
}

TEST_CASE("trajectory, field and series CSV layouts") {
    const g::Grid grid = small_grid();
    g::CoeffField u0 = g::CoeffField::zeros(grid);
    u0.comp[0][0] = 1.0;
    const linear::Trajectory traj = linear::solve_linear_core(u0, {}, linear::TimeGrid{0.1, 2});

    const std::string tcsv = io::trajectory_csv(traj, 2);
    CHECK(tcsv.rfind("t,i0,i1,x0,x1,U1,U2,U3\n", 0) == 0);
    // nodes 0 and 2 written, 16 points each
    CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 1 + 2 * 16);
    CHECK_THROWS_AS((void)io::trajectory_csv(traj, 0), ConfigInvalid);

    const std::string pcsv = io::phys_field_csv(g::inverse_transform(u0));
    CHECK(pcsv.rfind("x0,x1,U1,U2,U3\n", 0) == 0);

    const std::string ccsv = io::coeff_field_csv(u0);
    CHECK(ccsv.rfind("k0,k1,re1,im1,re2,im2,re3,im3\n", 0) == 0);
    CHECK(std::count(ccsv.begin(), ccsv.end(), '\n') == 1 + 16);

    backtransform::ResidualSeries series;
    series.t = {0.0, 0.1};
    series.r1 = {1e-7, 2e-7};
    series.r2 = {0.5e-7, 1.5e-7};
    CHECK(io::residual_csv(series).rfind("t,r1,r2\n", 0) == 0);
}

TEST_CASE("picard trace JSON encodes the undefined first ratio as null") {
    nonlinear::PicardTrace trace;
    trace.converged = true;
    trace.windows_used = 1;
    trace.final_window = 0.5;
    trace.iterations.push_back(
        {0, 1, 1e-3, std::numeric_limits<double>::quiet_NaN(), 0.5});
    trace.iterations.push_back({0, 2, 1e-4, 0.1, 0.5});
    const std::string json = io::picard_trace_json(trace, 7);
    CHECK(json.find("\"ratio\": null") != std::string::npos);
    CHECK(json.find("\"seed\": 7") != std::string::npos);
}

TEST_CASE("identical inputs serialize byte-identically") {
    const g::Grid grid = small_grid();
    const CounterRng rng(3);
    g::CoeffField u = g::CoeffField::zeros(grid);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u.comp[static_cast<std::size_t>(c)][i] = rng.complex_sym(c, i);
        }
    }
    CHECK(io::coeff_field_csv(u) == io::coeff_field_csv(u));
}
