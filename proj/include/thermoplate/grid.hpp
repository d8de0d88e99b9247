#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "thermoplate/common.hpp"

namespace thermoplate::grid {

// ---------------------------------------------------------------------------
// Rectangular product domains. Unbounded factors are truncated: R-directions
// become a periodic box of length L_r, half-space directions a Dirichlet box
// of length L_h. (0,pi)-directions keep their exact length.
// ---------------------------------------------------------------------------

enum class DirectionKind { fourier, sine_box, sine_half };

struct Direction {
    DirectionKind kind;
    double length;
    int modes;  // coefficient count == grid point count along this direction

    bool operator==(const Direction&) const = default;
};

struct DomainSpec {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
    double L_r = 8.0 * kPi;
    double L_h = 8.0 * kPi;
    std::vector<int> modes;  // per direction, ordered n1 | n2 | n3

    void validate() const;
};

struct Grid {
    std::vector<Direction> dirs;

    static Grid from_domain(const DomainSpec& spec);

    int ndim() const { return static_cast<int>(dirs.size()); }
    std::size_t size() const;
    bool operator==(const Grid&) const = default;

    // Physical coordinate of storage index i along direction d. Sine
    // directions store interior points only; hyperplane points are not part
    // of the grid (Dirichlet values are identically zero in the basis).
    double point_coord(int d, int i) const;

    // Frequency of mode storage index t along direction d: 2*pi*j/L for
    // Fourier (j the signed wrap of t), k*pi/L for sine bases.
    double zeta_component(int d, int t) const;

    double quad_weight(int d) const;      // dx of the rectangle rule
    double parseval_weight(int d) const;  // L (Fourier), L/2 (sine)
};

std::vector<std::size_t> strides(const Grid& g);
void unflatten(const Grid& g, std::size_t flat, std::span<int> out);

struct ModeIndex {
    std::vector<int> indices;
    std::vector<double> zeta;
};

ModeIndex mode_index(const Grid& g, std::size_t flat);

// |zeta|^2 of a mode; the coefficient-space action of -Laplace is
// multiplication by this value.
double laplacian_symbol(const Grid& g, std::size_t flat);

// True when the grid has a zero frequency (all directions Fourier); its flat
// index is 0 by the storage convention.
bool has_zero_mode(const Grid& g);

// ---------------------------------------------------------------------------
// Fields: three components in coefficient or physical representation.
// ---------------------------------------------------------------------------

struct CoeffField {
    Grid grid;
    std::array<std::vector<cx>, 3> comp;

    static CoeffField zeros(const Grid& g);
};

struct PhysField {
    Grid grid;
    std::array<std::vector<double>, 3> comp;

    static PhysField zeros(const Grid& g);
};

struct ScalarCoeff {
    Grid grid;
    std::vector<cx> values;

    static ScalarCoeff zeros(const Grid& g);
};

inline CoeffField operator+(CoeffField a, const CoeffField& b) {
    if (!(a.grid == b.grid)) throw ShapeMismatch("CoeffField +: grid mismatch");
    for (int c = 0; c < 3; ++c) {
        auto& x = a.comp[static_cast<std::size_t>(c)];
        const auto& y = b.comp[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    }
    return a;
}

inline CoeffField operator-(CoeffField a, const CoeffField& b) {
    if (!(a.grid == b.grid)) throw ShapeMismatch("CoeffField -: grid mismatch");
    for (int c = 0; c < 3; ++c) {
        auto& x = a.comp[static_cast<std::size_t>(c)];
        const auto& y = b.comp[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
    }
    return a;
}

inline CoeffField operator*(cx s, CoeffField a) {
    for (auto& c : a.comp) {
        for (auto& v : c) v *= s;
    }
    return a;
}

// ---------------------------------------------------------------------------
// Transforms. Type-I discrete sine basis sin(k pi x / L) on interior points
// for Dirichlet directions, uniform-grid DFT for periodic directions; applied
// separably one direction at a time.
// ---------------------------------------------------------------------------

std::vector<cx> scalar_forward(const Grid& g, const std::vector<double>& values);
std::vector<double> scalar_inverse(const Grid& g, const std::vector<cx>& coeffs);
std::vector<cx> scalar_inverse_complex(const Grid& g, const std::vector<cx>& coeffs);
std::vector<cx> scalar_forward_complex(const Grid& g, const std::vector<cx>& values);

CoeffField forward_transform(const PhysField& field);
PhysField inverse_transform(const CoeffField& coeffs);

// Zero-padding of coefficients to a grid refined by an integer factor per
// direction, and its left inverse.
Grid refined_grid(const Grid& g, int factor);
std::vector<cx> pad_coeffs(const Grid& g, const std::vector<cx>& coeffs, int factor);
std::vector<cx> truncate_coeffs(const Grid& big, const std::vector<cx>& big_coeffs,
                                const Grid& small);

// ---------------------------------------------------------------------------
// Norms. L2 in coefficient space by Parseval weights; Lp by grid quadrature
// on a refined grid (exact for band-limited fields and even integer p).
// ---------------------------------------------------------------------------

double coeff_l2_norm(const CoeffField& f);
double scalar_coeff_l2_norm(const ScalarCoeff& f);
double grad_l2_sq(const Grid& g, const std::vector<cx>& coeffs);
double phys_lp_norm(const PhysField& f, double p);
double lp_norm(const CoeffField& f, double p, int refine = 2);
double scalar_lp_norm(const ScalarCoeff& f, double p, int refine = 2);

// Projects coefficients onto those of a real-valued field: conjugate
// symmetry j -> -j in Fourier directions, real coefficients in sine
// directions. Idempotent.
std::vector<cx> hermitian_symmetrize(const Grid& g, const std::vector<cx>& coeffs);

// ---------------------------------------------------------------------------
// Dirichlet inverse Laplacian: coefficient-wise multiplication by -1/|zeta|^2.
// ---------------------------------------------------------------------------

ScalarCoeff dirichlet_inverse_laplacian(const ScalarCoeff& f);
ScalarCoeff apply_laplacian(const ScalarCoeff& f);

}  // namespace thermoplate::grid
