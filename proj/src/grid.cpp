#include "thermoplate/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace thermoplate::grid {

namespace {

void check_size(const Grid& g, std::size_t n, const char* what) {
    if (g.size() != n) {
        throw ShapeMismatch(std::string(what) + ": field size does not match grid");
    }
}

}  // namespace

void DomainSpec::validate() const {
    if (n1 < 0 || n2 < 0 || n3 < 0 || n1 + n2 + n3 < 1) {
        throw ConfigInvalid("domain: n1, n2, n3 >= 0 with n1+n2+n3 >= 1 required");
    }
    if (!(L_r > 0.0) || !(L_h > 0.0)) {
        throw ConfigInvalid("domain: truncation lengths must be positive");
    }
    if (static_cast<int>(modes.size()) != n1 + n2 + n3) {
        throw ConfigInvalid("domain: one mode count per direction required");
    }
    for (int m : modes) {
        if (m < 4 || m % 2 != 0) {
            throw ConfigInvalid("domain: mode counts must be even and >= 4");
        }
    }
}

Grid Grid::from_domain(const DomainSpec& spec) {
    spec.validate();
    Grid g;
    g.dirs.reserve(spec.modes.size());
    int d = 0;
    for (int i = 0; i < spec.n1; ++i, ++d) {
        g.dirs.push_back({DirectionKind::fourier, spec.L_r, spec.modes[static_cast<std::size_t>(d)]});
    }
    for (int i = 0; i < spec.n2; ++i, ++d) {
        g.dirs.push_back({DirectionKind::sine_box, kPi, spec.modes[static_cast<std::size_t>(d)]});
    }
    for (int i = 0; i < spec.n3; ++i, ++d) {
        g.dirs.push_back({DirectionKind::sine_half, spec.L_h, spec.modes[static_cast<std::size_t>(d)]});
    }
    return g;
}

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (const auto& dir : dirs) n *= static_cast<std::size_t>(dir.modes);
    return n;
}

double Grid::point_coord(int d, int i) const {
    const auto& dir = dirs[static_cast<std::size_t>(d)];
    if (dir.kind == DirectionKind::fourier) {
        return dir.length * i / dir.modes;
    }
    return dir.length * (i + 1) / (dir.modes + 1);
}

double Grid::zeta_component(int d, int t) const {
    const auto& dir = dirs[static_cast<std::size_t>(d)];
    if (dir.kind == DirectionKind::fourier) {
        const int j = (t < dir.modes / 2) ? t : t - dir.modes;
        return 2.0 * kPi * j / dir.length;
    }
    return (t + 1) * kPi / dir.length;
}

double Grid::quad_weight(int d) const {
    const auto& dir = dirs[static_cast<std::size_t>(d)];
    if (dir.kind == DirectionKind::fourier) {
        return dir.length / dir.modes;
    }
    return dir.length / (dir.modes + 1);
}

double Grid::parseval_weight(int d) const {
    const auto& dir = dirs[static_cast<std::size_t>(d)];
    return dir.kind == DirectionKind::fourier ? dir.length : 0.5 * dir.length;
}

std::vector<std::size_t> strides(const Grid& g) {
    std::vector<std::size_t> s(g.dirs.size());
    std::size_t acc = 1;
    for (int d = g.ndim() - 1; d >= 0; --d) {
        s[static_cast<std::size_t>(d)] = acc;
        acc *= static_cast<std::size_t>(g.dirs[static_cast<std::size_t>(d)].modes);
    }
    return s;
}

void unflatten(const Grid& g, std::size_t flat, std::span<int> out) {
    for (int d = g.ndim() - 1; d >= 0; --d) {
        const auto m = static_cast<std::size_t>(g.dirs[static_cast<std::size_t>(d)].modes);
        out[static_cast<std::size_t>(d)] = static_cast<int>(flat % m);
        flat /= m;
    }
}

ModeIndex mode_index(const Grid& g, std::size_t flat) {
    ModeIndex mi;
    mi.indices.resize(static_cast<std::size_t>(g.ndim()));
    unflatten(g, flat, mi.indices);
    mi.zeta.resize(mi.indices.size());
    for (int d = 0; d < g.ndim(); ++d) {
        mi.zeta[static_cast<std::size_t>(d)] =
            g.zeta_component(d, mi.indices[static_cast<std::size_t>(d)]);
    }
    return mi;
}

double laplacian_symbol(const Grid& g, std::size_t flat) {
    double s = 0.0;
    for (int d = g.ndim() - 1; d >= 0; --d) {
        const auto m = static_cast<std::size_t>(g.dirs[static_cast<std::size_t>(d)].modes);
        const int t = static_cast<int>(flat % m);
        flat /= m;
        const double z = g.zeta_component(d, t);
        s += z * z;
    }
    return s;
}

bool has_zero_mode(const Grid& g) {
    return std::all_of(g.dirs.begin(), g.dirs.end(), [](const Direction& d) {
        return d.kind == DirectionKind::fourier;
    });
}

CoeffField CoeffField::zeros(const Grid& g) {
    CoeffField f;
    f.grid = g;
    for (auto& c : f.comp) c.assign(g.size(), cx(0.0, 0.0));
    return f;
}

PhysField PhysField::zeros(const Grid& g) {
    PhysField f;
    f.grid = g;
    for (auto& c : f.comp) c.assign(g.size(), 0.0);
    return f;
}

ScalarCoeff ScalarCoeff::zeros(const Grid& g) {
    ScalarCoeff f;
    f.grid = g;
    f.values.assign(g.size(), cx(0.0, 0.0));
    return f;
}

// ---------------------------------------------------------------------------
// Per-direction transform matrices, cached. The sine matrix is symmetric with
// S^2 = (m+1)/2 I, so forward = (2/(m+1)) S and inverse = S invert exactly.
// ---------------------------------------------------------------------------

namespace {

struct DirMatrices {
    int m = 0;
    std::vector<cx> fwd;  // row-major m x m, coeffs = fwd * values
    std::vector<cx> inv;  // values = inv * coeffs
};

const DirMatrices& dir_matrices(const Direction& dir) {
    using Key = std::tuple<int, double, int>;
    static std::map<Key, DirMatrices> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    const Key key{static_cast<int>(dir.kind), dir.length, dir.modes};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    DirMatrices dm;
    const int m = dir.modes;
    dm.m = m;
    dm.fwd.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    dm.inv.resize(dm.fwd.size());
    if (dir.kind == DirectionKind::fourier) {
        for (int t = 0; t < m; ++t) {
            for (int i = 0; i < m; ++i) {
                const double phase = 2.0 * kPi * t * i / m;
                dm.fwd[static_cast<std::size_t>(t * m + i)] = std::polar(1.0 / m, -phase);
                dm.inv[static_cast<std::size_t>(i * m + t)] = std::polar(1.0, phase);
            }
        }
    } else {
        for (int k = 0; k < m; ++k) {
            for (int i = 0; i < m; ++i) {
                const double s = std::sin(kPi * (k + 1) * (i + 1) / (m + 1));
                dm.fwd[static_cast<std::size_t>(k * m + i)] = 2.0 / (m + 1) * s;
                dm.inv[static_cast<std::size_t>(i * m + k)] = s;
            }
        }
    }
    auto [pos, ok] = cache.emplace(key, std::move(dm));
    (void)ok;
    return pos->second;
}

// Applies an m x m matrix along direction d of a flat array (separable
// transform step). Lines are independent; chunked loop writes disjoint data.
void apply_dir(std::vector<cx>& data, const Grid& g, int d, const std::vector<cx>& mat) {
    const auto m = static_cast<std::size_t>(g.dirs[static_cast<std::size_t>(d)].modes);
    const auto st = strides(g)[static_cast<std::size_t>(d)];
    const std::size_t n_lines = data.size() / m;
    parallel_for_chunked(n_lines, 32, [&](std::size_t lo, std::size_t hi) {
        std::vector<cx> line(m), out(m);
        for (std::size_t li = lo; li < hi; ++li) {
            const std::size_t outer = li / st;
            const std::size_t inner = li % st;
            const std::size_t base = outer * m * st + inner;
            for (std::size_t t = 0; t < m; ++t) line[t] = data[base + t * st];
            for (std::size_t r = 0; r < m; ++r) {
                cx acc = 0.0;
                const cx* row = &mat[r * m];
                for (std::size_t t = 0; t < m; ++t) acc += row[t] * line[t];
                out[r] = acc;
            }
            for (std::size_t t = 0; t < m; ++t) data[base + t * st] = out[t];
        }
    });
}

}  // namespace

std::vector<cx> scalar_forward_complex(const Grid& g, const std::vector<cx>& values) {
    check_size(g, values.size(), "scalar_forward");
    std::vector<cx> data = values;
    for (int d = 0; d < g.ndim(); ++d) {
        apply_dir(data, g, d, dir_matrices(g.dirs[static_cast<std::size_t>(d)]).fwd);
    }
    return data;
}

std::vector<cx> scalar_forward(const Grid& g, const std::vector<double>& values) {
    check_size(g, values.size(), "scalar_forward");
    std::vector<cx> data(values.begin(), values.end());
    for (int d = 0; d < g.ndim(); ++d) {
        apply_dir(data, g, d, dir_matrices(g.dirs[static_cast<std::size_t>(d)]).fwd);
    }
    return data;
}

std::vector<cx> scalar_inverse_complex(const Grid& g, const std::vector<cx>& coeffs) {
    check_size(g, coeffs.size(), "scalar_inverse");
    std::vector<cx> data = coeffs;
    for (int d = 0; d < g.ndim(); ++d) {
        apply_dir(data, g, d, dir_matrices(g.dirs[static_cast<std::size_t>(d)]).inv);
    }
    return data;
}

std::vector<double> scalar_inverse(const Grid& g, const std::vector<cx>& coeffs) {
    const std::vector<cx> data = scalar_inverse_complex(g, coeffs);
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
    return out;
}

CoeffField forward_transform(const PhysField& field) {
    CoeffField out;
    out.grid = field.grid;
    for (int c = 0; c < 3; ++c) {
        out.comp[static_cast<std::size_t>(c)] =
            scalar_forward(field.grid, field.comp[static_cast<std::size_t>(c)]);
    }
    return out;
}

PhysField inverse_transform(const CoeffField& coeffs) {
    PhysField out;
    out.grid = coeffs.grid;
    for (int c = 0; c < 3; ++c) {
        out.comp[static_cast<std::size_t>(c)] =
            scalar_inverse(coeffs.grid, coeffs.comp[static_cast<std::size_t>(c)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Padding / truncation.
// ---------------------------------------------------------------------------

Grid refined_grid(const Grid& g, int factor) {
    if (factor < 1) {
        throw PreconditionViolated("refined_grid: factor >= 1 required");
    }
    Grid big = g;
    for (auto& dir : big.dirs) dir.modes *= factor;
    return big;
}

namespace {

// Maps a small-grid mode storage index to the storage index of the identical
// frequency on the big grid.
int map_mode_index(const Direction& small, const Direction& big, int t) {
    if (small.kind == DirectionKind::fourier) {
        const int j = (t < small.modes / 2) ? t : t - small.modes;
        return j >= 0 ? j : j + big.modes;
    }
    return t;
}

}  // namespace

std::vector<cx> pad_coeffs(const Grid& g, const std::vector<cx>& coeffs, int factor) {
    check_size(g, coeffs.size(), "pad_coeffs");
    const Grid big = refined_grid(g, factor);
    std::vector<cx> out(big.size(), cx(0.0, 0.0));
    const auto small_strides = strides(g);
    const auto big_strides = strides(big);
    std::vector<int> idx(static_cast<std::size_t>(g.ndim()));
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
        unflatten(g, flat, idx);
        std::size_t big_flat = 0;
        for (int d = 0; d < g.ndim(); ++d) {
            const int bt = map_mode_index(g.dirs[static_cast<std::size_t>(d)],
                                          big.dirs[static_cast<std::size_t>(d)],
                                          idx[static_cast<std::size_t>(d)]);
            big_flat += static_cast<std::size_t>(bt) * big_strides[static_cast<std::size_t>(d)];
        }
        out[big_flat] = coeffs[flat];
    }
    (void)small_strides;
    return out;
}

std::vector<cx> truncate_coeffs(const Grid& big, const std::vector<cx>& big_coeffs,
                                const Grid& small) {
    check_size(big, big_coeffs.size(), "truncate_coeffs");
    if (big.ndim() != small.ndim()) {
        throw ShapeMismatch("truncate_coeffs: dimension mismatch");
    }
    std::vector<cx> out(small.size());
    const auto big_strides = strides(big);
    std::vector<int> idx(static_cast<std::size_t>(small.ndim()));
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        unflatten(small, flat, idx);
        std::size_t big_flat = 0;
        for (int d = 0; d < small.ndim(); ++d) {
            const int bt = map_mode_index(small.dirs[static_cast<std::size_t>(d)],
                                          big.dirs[static_cast<std::size_t>(d)],
                                          idx[static_cast<std::size_t>(d)]);
            big_flat += static_cast<std::size_t>(bt) * big_strides[static_cast<std::size_t>(d)];
        }
        out[flat] = big_coeffs[big_flat];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Norms.
// ---------------------------------------------------------------------------

namespace {

double total_parseval_weight(const Grid& g) {
    double w = 1.0;
    for (int d = 0; d < g.ndim(); ++d) w *= g.parseval_weight(d);
    return w;
}

double total_quad_weight(const Grid& g) {
    double w = 1.0;
    for (int d = 0; d < g.ndim(); ++d) w *= g.quad_weight(d);
    return w;
}

}  // namespace

double coeff_l2_norm(const CoeffField& f) {
    double s = 0.0;
    for (const auto& c : f.comp) {
        for (const auto& v : c) s += std::norm(v);
    }
    return std::sqrt(s * total_parseval_weight(f.grid));
}

double scalar_coeff_l2_norm(const ScalarCoeff& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * total_parseval_weight(f.grid));
}

double grad_l2_sq(const Grid& g, const std::vector<cx>& coeffs) {
    check_size(g, coeffs.size(), "grad_l2_sq");
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        s += laplacian_symbol(g, i) * std::norm(coeffs[i]);
    }
    return s * total_parseval_weight(g);
}

double phys_lp_norm(const PhysField& f, double p) {
    for (const auto& c : f.comp) check_size(f.grid, c.size(), "phys_lp_norm");
    double s = 0.0;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i) {
        const double v2 = f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] +
                          f.comp[2][i] * f.comp[2][i];
        s += std::pow(v2, 0.5 * p);
    }
    return std::pow(s * total_quad_weight(f.grid), 1.0 / p);
}

double lp_norm(const CoeffField& f, double p, int refine) {
    if (p == 2.0 && refine <= 1) {
        return coeff_l2_norm(f);
    }
    const Grid big = refined_grid(f.grid, refine);
    PhysField phys;
    phys.grid = big;
    for (int c = 0; c < 3; ++c) {
        phys.comp[static_cast<std::size_t>(c)] = scalar_inverse(
            big, pad_coeffs(f.grid, f.comp[static_cast<std::size_t>(c)], refine));
    }
    return phys_lp_norm(phys, p);
}

double scalar_lp_norm(const ScalarCoeff& f, double p, int refine) {
    const Grid big = refined_grid(f.grid, refine);
    const std::vector<double> vals = scalar_inverse(big, pad_coeffs(f.grid, f.values, refine));
    double s = 0.0;
    for (double v : vals) s += std::pow(std::abs(v), p);
    return std::pow(s * total_quad_weight(big), 1.0 / p);
}

std::vector<cx> hermitian_symmetrize(const Grid& g, const std::vector<cx>& coeffs) {
    check_size(g, coeffs.size(), "hermitian_symmetrize");
    std::vector<cx> out(coeffs.size());
    const auto st = strides(g);
    std::vector<int> idx(static_cast<std::size_t>(g.ndim()));
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
        unflatten(g, flat, idx);
        std::size_t mirror = 0;
        for (int d = 0; d < g.ndim(); ++d) {
            const auto& dir = g.dirs[static_cast<std::size_t>(d)];
            int mi = idx[static_cast<std::size_t>(d)];
            if (dir.kind == DirectionKind::fourier && mi != 0) {
                mi = dir.modes - mi;
            }
            mirror += static_cast<std::size_t>(mi) * st[static_cast<std::size_t>(d)];
        }
        out[flat] = 0.5 * (coeffs[flat] + std::conj(coeffs[mirror]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dirichlet inverse Laplacian.
// ---------------------------------------------------------------------------

ScalarCoeff dirichlet_inverse_laplacian(const ScalarCoeff& f) {
    check_size(f.grid, f.values.size(), "dirichlet_inverse_laplacian");
    ScalarCoeff out;
    out.grid = f.grid;
    out.values.resize(f.values.size());
    double scale = 0.0;
    for (const auto& v : f.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double zsq = laplacian_symbol(f.grid, i);
        if (zsq == 0.0) {
            if (std::abs(f.values[i]) > 1e-14 * std::max(scale, 1.0)) {
                throw ZeroModeNotInvertible(
                    "dirichlet_inverse_laplacian: nonzero coefficient on the zero frequency");
            }
            out.values[i] = 0.0;
        } else {
            out.values[i] = -f.values[i] / zsq;
        }
    }
    return out;
}

ScalarCoeff apply_laplacian(const ScalarCoeff& f) {
    check_size(f.grid, f.values.size(), "apply_laplacian");
    ScalarCoeff out;
    out.grid = f.grid;
    out.values.resize(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        out.values[i] = -laplacian_symbol(f.grid, i) * f.values[i];
    }
    return out;
}

}  // namespace thermoplate::grid
