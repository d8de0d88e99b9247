#pragma once

#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"

namespace thermoplate::extension {

// Odd reflection of Dirichlet data onto the doubled periodic cell: sine
// directions reflect about x = 0 (half-space truncations) or x = pi / x = L
// (box directions); either way sin(k pi x / L) continues to the exponential
// pair at frequencies +-k pi / L on the cell of length 2L.
struct ReflectionPlan {
    std::vector<int> dirs;  // directions to reflect, ascending
    grid::Grid source;
    grid::Grid target;
};

// Builds the plan for reflecting the given directions. Directions must be
// distinct and in range; reflecting a periodic direction has no Dirichlet
// hyperplane and throws BoundaryViolation.
ReflectionPlan make_reflection_plan(const grid::Grid& source, std::vector<int> dirs);

// Plan that reflects every sine direction (the full extension to the
// periodic cylinder).
ReflectionPlan full_reflection_plan(const grid::Grid& source);

// Coefficient-space extension: sine coefficient u_k maps to -i/2 at +k and
// +i/2 at -k on the doubled Fourier direction. Exact, no grid interpolation.
grid::ScalarCoeff odd_extend_coeffs(const grid::ScalarCoeff& f, const ReflectionPlan& plan);
grid::CoeffField odd_extend_coeffs(const grid::CoeffField& f, const ReflectionPlan& plan);

// Physical-space entry points (transform, map, transform back).
grid::PhysField odd_extend(const grid::PhysField& f, const ReflectionPlan& plan);

// Pointwise restriction to the source grid; the source points are a subset
// of the target points, so this is pure indexing.
grid::PhysField restrict_field(const grid::PhysField& f, const ReflectionPlan& plan);

}  // namespace thermoplate::extension
