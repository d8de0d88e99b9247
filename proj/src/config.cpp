#include "thermoplate/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermoplate/rng.hpp"

namespace thermoplate::config {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        throw ConfigInvalid(path + ": expected an object");
    }
    for (const auto& [key, unused] : j.items()) {
        (void)unused;
        if (allowed.find(key) == allowed.end()) {
            throw ConfigInvalid(path + ": unknown field '" + key + "'");
        }
    }
}

template <typename T>
void read_field(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + "." + key + ": " + e.what());
    }
}

void read_int_vector(const json& j, const std::string& path, const char* key,
                     std::vector<int>& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + "." + key + ": " + e.what());
    }
}

void read_array3(const json& j, const std::string& path, const char* key,
                 std::array<double, 3>& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        const auto v = j.at(key).get<std::vector<double>>();
        if (v.size() != 3) {
            throw ConfigInvalid(path + "." + key + ": exactly 3 entries required");
        }
        out = {v[0], v[1], v[2]};
    } catch (const json::exception& e) {
        throw ConfigInvalid(path + "." + key + ": " + e.what());
    }
}

}  // namespace

void SweepConfig::validate() const {
    if (xi_points < 2 || k_max < 2 || lambda_radii < 1 || lambda_angles < 1) {
        throw ConfigInvalid("sweep: grid counts too small");
    }
    if (!(xi_min > 0.0) || !(xi_max > xi_min)) {
        throw ConfigInvalid("sweep: 0 < xi_min < xi_max required");
    }
    if (!(phi_margin > 0.0)) {
        throw ConfigInvalid("sweep: phi_margin > 0 required");
    }
    if (!(lambda_r_min > 0.0) || !(lambda_r_max > lambda_r_min)) {
        throw ConfigInvalid("sweep: 0 < lambda_r_min < lambda_r_max required");
    }
    if (hf_nodes < 8) {
        throw ConfigInvalid("sweep: hf_nodes >= 8 required");
    }
    if (!(fd_rel_step > 0.0) || !(fd_rel_step < 0.1)) {
        throw ConfigInvalid("sweep: fd_rel_step in (0, 0.1) required");
    }
}

void RBoundConfig::validate() const {
    if (n_ops < 1) {
        throw ConfigInvalid("rbound: n_ops >= 1 required");
    }
    if (n_draws < 100) {
        throw ConfigInvalid("rbound: n_draws >= 100 required");
    }
    if (!(p >= 1.0)) {
        throw ConfigInvalid("rbound: p >= 1 required");
    }
}

void InitialConfig::validate() const {
    if (kind != "single_mode" && kind != "smooth_random" && kind != "rough_random") {
        throw ConfigInvalid("initial.kind: one of single_mode | smooth_random | rough_random");
    }
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw ConfigInvalid("initial.amplitude: finite and >= 0 required");
    }
    if (!(decay >= 0.0)) {
        throw ConfigInvalid("initial.decay: >= 0 required");
    }
}

void ForcingConfig::validate() const {
    if (kind != "none" && kind != "constant_mode" && kind != "random_smooth") {
        throw ConfigInvalid("forcing.kind: one of none | constant_mode | random_smooth");
    }
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw ConfigInvalid("forcing.amplitude: finite and >= 0 required");
    }
    if (!(decay >= 0.0)) {
        throw ConfigInvalid("forcing.decay: >= 0 required");
    }
}

void Config::validate() const {
    domain.validate();
    time.validate();
    nonlinear.validate();
    sweep.validate();
    rbound.validate();
    initial.validate();
    forcing.validate();
    if (output_stride < 1) {
        throw ConfigInvalid("output_stride: >= 1 required");
    }
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw ConfigInvalid("p: exponent in (1, inf) required");
    }
}

Config default_config() {
    Config cfg;
    cfg.sweep.xi_points = 8;
    cfg.sweep.k_max = 12;
    cfg.sweep.lambda_radii = 6;
    cfg.sweep.hf_nodes = 64;
    cfg.domain.n2 = 2;
    cfg.domain.modes = {16, 16};
    cfg.time = {0.5, 100};
    cfg.nonlinear.a = 1.0;
    cfg.nonlinear.T = 0.5;
    cfg.initial.kind = "smooth_random";
    cfg.initial.amplitude = 0.05;
    cfg.initial.decay = 1.0;
    return cfg;
}

Config parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("JSON parse error: ") + e.what());
    }
    expect_keys(root, "config",
                {"domain", "time", "nonlinear", "sweep", "rbound", "initial", "forcing", "rng",
                 "output"});

    Config cfg = default_config();
    if (root.contains("domain")) {
        const auto& j = root.at("domain");
        expect_keys(j, "domain", {"n1", "n2", "n3", "L_r", "L_h", "modes"});
        read_field(j, "domain", "n1", cfg.domain.n1);
        read_field(j, "domain", "n2", cfg.domain.n2);
        read_field(j, "domain", "n3", cfg.domain.n3);
        read_field(j, "domain", "L_r", cfg.domain.L_r);
        read_field(j, "domain", "L_h", cfg.domain.L_h);
        read_int_vector(j, "domain", "modes", cfg.domain.modes);
    }
    if (root.contains("time")) {
        const auto& j = root.at("time");
        expect_keys(j, "time", {"t_end", "n_steps"});
        read_field(j, "time", "t_end", cfg.time.t_end);
        read_field(j, "time", "n_steps", cfg.time.n_steps);
        cfg.nonlinear.T = cfg.time.t_end;
    }
    if (root.contains("nonlinear")) {
        const auto& j = root.at("nonlinear");
        expect_keys(j, "nonlinear",
                    {"a", "T", "max_picard_iters", "contraction_tol", "dealias_factor",
                     "shrink_factor"});
        read_field(j, "nonlinear", "a", cfg.nonlinear.a);
        read_field(j, "nonlinear", "T", cfg.nonlinear.T);
        read_field(j, "nonlinear", "max_picard_iters", cfg.nonlinear.max_picard_iters);
        read_field(j, "nonlinear", "contraction_tol", cfg.nonlinear.contraction_tol);
        read_field(j, "nonlinear", "dealias_factor", cfg.nonlinear.dealias_factor);
        read_field(j, "nonlinear", "shrink_factor", cfg.nonlinear.shrink_factor);
        if (j.contains("a") && j.at("a").is_number() && j.at("a").get<double>() < 0.0) {
            throw ConfigInvalid("nonlinear.a: the material constant must be positive");
        }
    }
    if (root.contains("sweep")) {
        const auto& j = root.at("sweep");
        expect_keys(j, "sweep",
                    {"xi_points", "xi_min", "xi_max", "k_max", "lambda_radii", "lambda_angles",
                     "phi_margin", "lambda_r_min", "lambda_r_max", "hf_nodes", "fd_rel_step"});
        read_field(j, "sweep", "xi_points", cfg.sweep.xi_points);
        read_field(j, "sweep", "xi_min", cfg.sweep.xi_min);
        read_field(j, "sweep", "xi_max", cfg.sweep.xi_max);
        read_field(j, "sweep", "k_max", cfg.sweep.k_max);
        read_field(j, "sweep", "lambda_radii", cfg.sweep.lambda_radii);
        read_field(j, "sweep", "lambda_angles", cfg.sweep.lambda_angles);
        read_field(j, "sweep", "phi_margin", cfg.sweep.phi_margin);
        read_field(j, "sweep", "lambda_r_min", cfg.sweep.lambda_r_min);
        read_field(j, "sweep", "lambda_r_max", cfg.sweep.lambda_r_max);
        read_field(j, "sweep", "hf_nodes", cfg.sweep.hf_nodes);
        read_field(j, "sweep", "fd_rel_step", cfg.sweep.fd_rel_step);
    }
    if (root.contains("rbound")) {
        const auto& j = root.at("rbound");
        expect_keys(j, "rbound", {"n_ops", "n_draws", "p"});
        read_field(j, "rbound", "n_ops", cfg.rbound.n_ops);
        read_field(j, "rbound", "n_draws", cfg.rbound.n_draws);
        read_field(j, "rbound", "p", cfg.rbound.p);
    }
    if (root.contains("initial")) {
        const auto& j = root.at("initial");
        expect_keys(j, "initial", {"kind", "mode", "amplitude", "components", "decay"});
        read_field(j, "initial", "kind", cfg.initial.kind);
        read_int_vector(j, "initial", "mode", cfg.initial.mode);
        read_field(j, "initial", "amplitude", cfg.initial.amplitude);
        read_array3(j, "initial", "components", cfg.initial.components);
        read_field(j, "initial", "decay", cfg.initial.decay);
    }
    if (root.contains("forcing")) {
        const auto& j = root.at("forcing");
        expect_keys(j, "forcing", {"kind", "mode", "amplitude", "components", "decay"});
        read_field(j, "forcing", "kind", cfg.forcing.kind);
        read_int_vector(j, "forcing", "mode", cfg.forcing.mode);
        read_field(j, "forcing", "amplitude", cfg.forcing.amplitude);
        read_array3(j, "forcing", "components", cfg.forcing.components);
        read_field(j, "forcing", "decay", cfg.forcing.decay);
    }
    if (root.contains("rng")) {
        const auto& j = root.at("rng");
        expect_keys(j, "rng", {"seed"});
        read_field(j, "rng", "seed", cfg.seed);
    }
    if (root.contains("output")) {
        const auto& j = root.at("output");
        expect_keys(j, "output", {"stride", "p"});
        read_field(j, "output", "stride", cfg.output_stride);
        read_field(j, "output", "p", cfg.p);
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw ConfigInvalid("config file not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string default_config_json() {
    // Mirrors default_config(); shipped as configs/default.json.
    std::ostringstream out;
    out << "{\n"
        << "  \"domain\": {\"n1\": 0, \"n2\": 2, \"n3\": 0, \"modes\": [16, 16]},\n"
        << "  \"time\": {\"t_end\": 0.5, \"n_steps\": 100},\n"
        << "  \"nonlinear\": {\"a\": 1.0, \"T\": 0.5},\n"
        << "  \"initial\": {\"kind\": \"smooth_random\", \"amplitude\": 0.05, \"decay\": 1.0},\n"
        << "  \"forcing\": {\"kind\": \"none\"},\n"
        << "  \"rng\": {\"seed\": 20240101},\n"
        << "  \"output\": {\"stride\": 10}\n"
        << "}\n";
    return out.str();
}

std::uint64_t mode_key(const grid::Grid& g, std::size_t flat) {
    std::vector<int> idx(static_cast<std::size_t>(g.ndim()));
    grid::unflatten(g, flat, idx);
    std::uint64_t h = 0x6d6f64656b657931ULL;
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    for (int d = 0; d < g.ndim(); ++d) {
        const auto& dir = g.dirs[static_cast<std::size_t>(d)];
        std::int64_t signed_index;
        if (dir.kind == grid::DirectionKind::fourier) {
            const int t = idx[static_cast<std::size_t>(d)];
            signed_index = (t < dir.modes / 2) ? t : t - dir.modes;
        } else {
            signed_index = idx[static_cast<std::size_t>(d)] + 1;
        }
        h = mix(h ^ static_cast<std::uint64_t>(signed_index + 0x10000));
        h = mix(h ^ static_cast<std::uint64_t>(dir.kind == grid::DirectionKind::fourier ? 1 : 2));
    }
    return h;
}

grid::CoeffField build_initial(const InitialConfig& cfg, const grid::Grid& g,
                               std::uint64_t seed) {
    cfg.validate();
    grid::CoeffField u0 = grid::CoeffField::zeros(g);
    if (cfg.kind == "single_mode") {
        if (static_cast<int>(cfg.mode.size()) != g.ndim()) {
            throw ConfigInvalid("initial.mode: one index per direction required");
        }
        const auto st = grid::strides(g);
        std::size_t flat = 0;
        for (int d = 0; d < g.ndim(); ++d) {
            const auto& dir = g.dirs[static_cast<std::size_t>(d)];
            const int k = cfg.mode[static_cast<std::size_t>(d)];
            int t;
            if (dir.kind == grid::DirectionKind::fourier) {
                t = (k >= 0) ? k : k + dir.modes;
                if (k < -dir.modes / 2 || k >= dir.modes / 2) {
                    throw ConfigInvalid("initial.mode: Fourier index out of range");
                }
            } else {
                t = k - 1;
                if (k < 1 || k > dir.modes) {
                    throw ConfigInvalid("initial.mode: sine index out of range");
                }
            }
            flat += static_cast<std::size_t>(t) * st[static_cast<std::size_t>(d)];
        }
        for (int c = 0; c < 3; ++c) {
            u0.comp[static_cast<std::size_t>(c)][flat] =
                cfg.amplitude * cfg.components[static_cast<std::size_t>(c)];
        }
        return u0;
    }

    const CounterRng rng(seed);
    for (int c = 0; c < 3; ++c) {
        auto& vals = u0.comp[static_cast<std::size_t>(c)];
        const double w = cfg.amplitude * cfg.components[static_cast<std::size_t>(c)];
        if (w == 0.0) continue;
        for (std::size_t m = 0; m < vals.size(); ++m) {
            const double zabs = std::sqrt(grid::laplacian_symbol(g, m));
            const double draw =
                rng.uniform_sym(static_cast<std::uint64_t>(c) + 1, mode_key(g, m));
            if (cfg.kind == "smooth_random") {
                vals[m] = w * draw * std::exp(-cfg.decay * zabs);
            } else {  // rough_random: coefficients ~ 1/|zeta|
                vals[m] = w * draw / (1.0 + zabs);
            }
        }
        vals = grid::hermitian_symmetrize(g, vals);
    }
    return u0;
}

std::vector<grid::CoeffField> build_forcing(const ForcingConfig& cfg, const grid::Grid& g,
                                            const linear::TimeGrid& tgrid, std::uint64_t seed) {
    cfg.validate();
    if (cfg.kind == "none") {
        return {};
    }
    InitialConfig shape;
    shape.kind = cfg.kind == "constant_mode" ? "single_mode" : "smooth_random";
    shape.mode = cfg.mode;
    shape.amplitude = cfg.amplitude;
    shape.components = cfg.components;
    shape.decay = cfg.decay;
    const grid::CoeffField base = build_initial(shape, g, seed ^ 0xf00dULL);

    std::vector<grid::CoeffField> out;
    out.reserve(static_cast<std::size_t>(tgrid.n_nodes()));
    for (int n = 0; n < tgrid.n_nodes(); ++n) {
        if (cfg.kind == "constant_mode") {
            out.push_back(base);
        } else {
            const double gmod = 1.0 + 0.5 * std::sin(2.0 * kPi * tgrid.node(n) / tgrid.t_end);
            out.push_back(cx(gmod, 0.0) * base);
        }
    }
    return out;
}

}  // namespace thermoplate::config
