#include "thermoplate/extension.hpp"

#include <algorithm>
#include <cmath>

namespace thermoplate::extension {

using grid::CoeffField;
using grid::Direction;
using grid::DirectionKind;
using grid::Grid;
using grid::PhysField;
using grid::ScalarCoeff;

namespace {

Direction reflected_direction(const Direction& d) {
    return {DirectionKind::fourier, 2.0 * d.length, 2 * (d.modes + 1)};
}

// Maps coefficients along one reflected direction; all other directions are
// untouched. Returns values on the grid with direction d replaced.
std::vector<cx> extend_along(const Grid& src, int d, const std::vector<cx>& in, Grid& out_grid) {
    out_grid = src;
    out_grid.dirs[static_cast<std::size_t>(d)] =
        reflected_direction(src.dirs[static_cast<std::size_t>(d)]);

    const auto m = static_cast<std::size_t>(src.dirs[static_cast<std::size_t>(d)].modes);
    const auto mt = static_cast<std::size_t>(out_grid.dirs[static_cast<std::size_t>(d)].modes);
    const auto st_in = grid::strides(src)[static_cast<std::size_t>(d)];
    const auto st_out = grid::strides(out_grid)[static_cast<std::size_t>(d)];

    std::vector<cx> out(out_grid.size(), cx(0.0, 0.0));
    const std::size_t n_lines = in.size() / m;
    const cx half_i(0.0, 0.5);
    for (std::size_t li = 0; li < n_lines; ++li) {
        const std::size_t outer = li / st_in;
        const std::size_t inner = li % st_in;
        const std::size_t base_in = outer * m * st_in + inner;
        const std::size_t base_out = outer * mt * st_out + inner;
        for (std::size_t t = 0; t < m; ++t) {
            const cx v = in[base_in + t * st_in];
            const std::size_t k = t + 1;
            out[base_out + k * st_out] = -half_i * v;
            out[base_out + (mt - k) * st_out] = half_i * v;
        }
    }
    return out;
}

}  // namespace

ReflectionPlan make_reflection_plan(const Grid& source, std::vector<int> dirs) {
    std::sort(dirs.begin(), dirs.end());
    if (std::adjacent_find(dirs.begin(), dirs.end()) != dirs.end()) {
        throw PreconditionViolated("reflection plan: directions must be disjoint");
    }
    ReflectionPlan plan;
    plan.source = source;
    plan.target = source;
    for (int d : dirs) {
        if (d < 0 || d >= source.ndim()) {
            throw PreconditionViolated("reflection plan: direction index out of range");
        }
        const auto& dir = source.dirs[static_cast<std::size_t>(d)];
        if (dir.kind == DirectionKind::fourier) {
            throw BoundaryViolation(
                "reflection plan: periodic direction carries no Dirichlet hyperplane");
        }
        plan.target.dirs[static_cast<std::size_t>(d)] = reflected_direction(dir);
    }
    plan.dirs = std::move(dirs);
    return plan;
}

ReflectionPlan full_reflection_plan(const Grid& source) {
    std::vector<int> dirs;
    for (int d = 0; d < source.ndim(); ++d) {
        if (source.dirs[static_cast<std::size_t>(d)].kind != DirectionKind::fourier) {
            dirs.push_back(d);
        }
    }
    return make_reflection_plan(source, dirs);
}

ScalarCoeff odd_extend_coeffs(const ScalarCoeff& f, const ReflectionPlan& plan) {
    if (!(f.grid == plan.source)) {
        throw ShapeMismatch("odd_extend_coeffs: field grid does not match plan source");
    }
    Grid cur_grid = f.grid;
    std::vector<cx> cur = f.values;
    for (int d : plan.dirs) {
        Grid next;
        cur = extend_along(cur_grid, d, cur, next);
        cur_grid = next;
    }
    return {cur_grid, std::move(cur)};
}

CoeffField odd_extend_coeffs(const CoeffField& f, const ReflectionPlan& plan) {
    CoeffField out;
    out.grid = plan.target;
    for (int c = 0; c < 3; ++c) {
        ScalarCoeff s{f.grid, f.comp[static_cast<std::size_t>(c)]};
        out.comp[static_cast<std::size_t>(c)] = odd_extend_coeffs(s, plan).values;
    }
    return out;
}

PhysField odd_extend(const PhysField& f, const ReflectionPlan& plan) {
    if (!(f.grid == plan.source)) {
        throw ShapeMismatch("odd_extend: field grid does not match plan source");
    }
    const CoeffField coeffs = grid::forward_transform(f);
    return grid::inverse_transform(odd_extend_coeffs(coeffs, plan));
}

PhysField restrict_field(const PhysField& f, const ReflectionPlan& plan) {
    if (!(f.grid == plan.target)) {
        throw ShapeMismatch("restrict_field: field grid does not match plan target");
    }
    PhysField out = PhysField::zeros(plan.source);
    const int nd = plan.source.ndim();
    std::vector<int> idx(static_cast<std::size_t>(nd));
    const auto target_strides = grid::strides(plan.target);
    std::vector<bool> reflected(static_cast<std::size_t>(nd), false);
    for (int d : plan.dirs) reflected[static_cast<std::size_t>(d)] = true;
    for (std::size_t flat = 0; flat < out.comp[0].size(); ++flat) {
        grid::unflatten(plan.source, flat, idx);
        std::size_t tflat = 0;
        for (int d = 0; d < nd; ++d) {
            // Source interior point i sits at target index i + 1 along a
            // reflected direction (index 0 is the x = 0 hyperplane point).
            const int ti = reflected[static_cast<std::size_t>(d)]
                               ? idx[static_cast<std::size_t>(d)] + 1
                               : idx[static_cast<std::size_t>(d)];
            tflat += static_cast<std::size_t>(ti) * target_strides[static_cast<std::size_t>(d)];
        }
        for (int c = 0; c < 3; ++c) {
            out.comp[static_cast<std::size_t>(c)][flat] =
                f.comp[static_cast<std::size_t>(c)][tflat];
        }
    }
    return out;
}

}  // namespace thermoplate::extension
