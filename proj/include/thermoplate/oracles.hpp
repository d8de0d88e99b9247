#pragma once

#include <array>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/grid.hpp"
#include "thermoplate/mat3.hpp"

namespace thermoplate::oracles {

// Independent reference routes used by the verification suite. Each one
// deliberately avoids the code path it is used to check: the cubic solver is
// closed-form (no Newton), the exponential is scaling-and-squaring (no
// diagonalization), the transform oracle is a dense summation (no separable
// line transforms).

// Roots of a monic cubic with real coefficients (c[0] = 1), sorted by
// (Re, Im). Trigonometric/Cardano closed form.
std::array<cx, 3> cubic_roots_closed_form(const std::array<double, 4>& coeffs);

// exp(A) by scaling-and-squaring with a Taylor kernel.
Mat3 expm(const Mat3& a);

// Physical value of a scalar coefficient field at one grid point by direct
// summation over the full mode lattice. O(size) per point; small grids only.
double dense_inverse_value(const grid::Grid& g, const std::vector<cx>& coeffs,
                           const std::vector<int>& point);

// Full dense evaluation at every grid point.
std::vector<double> dense_inverse(const grid::Grid& g, const std::vector<cx>& coeffs);

}  // namespace thermoplate::oracles
