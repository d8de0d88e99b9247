#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/mat3.hpp"
#include "thermoplate/symbol.hpp"

namespace thermoplate::multiplier {

// ---------------------------------------------------------------------------
// Discrete differences Delta^{e_j} M(k) = M(k) - M(k - e_j), iterated per the
// multi-index gamma <= 1.
// ---------------------------------------------------------------------------

template <typename T>
using LatticeMap = std::map<std::vector<int>, T>;

// Iterated difference at one lattice point; throws MissingIndex when a
// shifted value is absent.
template <typename T>
T discrete_difference_at(const LatticeMap<T>& values, const std::vector<int>& k,
                         const std::vector<int>& gamma) {
    if (k.size() != gamma.size()) {
        throw ShapeMismatch("discrete_difference: gamma must match lattice dimension");
    }
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
        if (gamma[j] != 0 && gamma[j] != 1) {
            throw PreconditionViolated("discrete_difference: gamma entries must be 0 or 1");
        }
        if (gamma[j] == 1) active.push_back(j);
    }
    T acc{};
    std::vector<int> shifted(k);
    const std::size_t n_subsets = std::size_t{1} << active.size();
    for (std::size_t mask = 0; mask < n_subsets; ++mask) {
        shifted = k;
        int sign = 1;
        for (std::size_t b = 0; b < active.size(); ++b) {
            if ((mask >> b) & 1u) {
                shifted[active[b]] -= 1;
                sign = -sign;
            }
        }
        const auto it = values.find(shifted);
        if (it == values.end()) {
            throw MissingIndex("discrete_difference: value missing at a shifted index");
        }
        if (sign > 0) {
            acc += it->second;
        } else {
            acc += cx(-1.0, 0.0) * it->second;
        }
    }
    return acc;
}

// Difference map on every key whose shifted neighbors are all present.
template <typename T>
LatticeMap<T> discrete_difference(const LatticeMap<T>& values, const std::vector<int>& gamma) {
    LatticeMap<T> out;
    for (const auto& [k, unused] : values) {
        (void)unused;
        try {
            out.emplace(k, discrete_difference_at(values, k, gamma));
        } catch (const MissingIndex&) {
            // trimmed at the boundary of the supplied domain
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Combined Michlin-condition sweeps: sup over (lambda, xi, k) of
// |xi^{g1} k^{g2} d_xi^{g1} Delta_k^{g2} m_lambda(xi, k)| per gamma <= 1,
// with xi over a signed log grid and k over the integer lattice (outside
// [-1,1]^{n2} whenever g2 != 0).
// ---------------------------------------------------------------------------

// m_lambda(zeta) with zeta the concatenation of xi (n1 entries) and k
// (n2 entries, evaluated at integers but continuous in principle).
using SymbolEval = std::function<Mat3(cx lambda, std::span<const double> zeta)>;

SymbolEval make_kappa_eval(std::vector<int> alpha);
SymbolEval make_hf_eval(symbol::TestFunction f, symbol::ContourSpec contour);

struct MichlinSweepSpec {
    std::string family;
    int n1 = 1;
    int n2 = 1;
    std::vector<cx> lambdas;  // empty for lambda-free families (h_f)
    // When set, the lambda samples are ratios: the evaluation uses
    // lambda * |zeta|^2, so every fiber sees the same resolvent-peak
    // geometry and the sampled sups stabilize under grid refinement.
    bool lambda_relative = false;
    int xi_points = 32;  // log-spaced magnitudes per sign
    double xi_min = 1e-2;
    double xi_max = 1e2;
    int k_max = 32;
    double fd_rel_step = 1e-3;  // central differences with Richardson refinement
};

// Sector samples for sweeps: log-spaced radii augmented with a graded
// cluster around the spectral ratios |lambda_i| of the coupling matrix
// (where the resolvent peaks live), times uniform angles just inside
// Sigma_{pi - phi}.
std::vector<cx> sweep_lambda_set(double phi, int n_radii, int n_angles, double r_min,
                                 double r_max);

struct GammaSup {
    std::vector<int> gamma;  // n1 + n2 entries in {0,1}
    double sup;
};

struct MichlinTable {
    std::string family;
    int grid_level = 0;
    std::size_t lambda_samples = 0;
    int xi_points = 0;
    int k_max = 0;
    std::vector<GammaSup> rows;
};

MichlinTable michlin_sweep(const MichlinSweepSpec& spec, const SymbolEval& eval);

// Same sweep with xi density, k range and lambda samples doubled; stable
// means every per-gamma sup changed by less than a factor of two.
struct MichlinStability {
    MichlinTable base;
    MichlinTable refined;
    bool stable;
    double worst_ratio;
};

MichlinStability michlin_stability(const MichlinSweepSpec& spec, const SymbolEval& eval,
                                   std::span<const cx> refined_lambdas);

// ---------------------------------------------------------------------------
// Monte-Carlo R-bound estimation and the Kahane contraction check.
// ---------------------------------------------------------------------------

struct RBoundSample {
    std::vector<Mat3> operators;
    std::vector<Vec3> vectors;
    int n_draws = 512;
    std::uint64_t seed = 0;
};

// (E ||sum_j eps_j T_j x_j||^p)^{1/p} / (E ||sum_j eps_j x_j||^p)^{1/p} with
// the expectation sampled over seeded sign draws; a lower-bound style
// estimate for the R-bound of the family. N = 1 is evaluated exactly.
double rbound_estimate(const RBoundSample& sample, double p);

// Running estimate over nested prefix families {T_1..T_m}, sharing draws;
// monotone nondecreasing by construction.
std::vector<double> rbound_nested_scan(const RBoundSample& sample, double p);

struct KahaneResult {
    bool ok;
    double lhs;
    double rhs;
    double ratio;  // lhs / rhs
};

// Checks ||sum a_j eps_j x_j||_p <= 2 ||sum b_j eps_j x_j||_p on shared
// Monte-Carlo draws with slack factor 1.05 for sampling noise. Requires
// |a_j| <= |b_j| for all j.
KahaneResult kahane_check(std::span<const cx> a, std::span<const cx> b,
                          std::span<const Vec3> x, double p, int n_draws,
                          std::uint64_t seed);

}  // namespace thermoplate::multiplier
