#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermoplate/common.hpp"
#include "thermoplate/mat3.hpp"

namespace thermoplate::symbol {

// ---------------------------------------------------------------------------
// The coupling matrix of the first-order formulation and its spectrum.
// ---------------------------------------------------------------------------

// Fixed 3x3 coupling matrix, rows (0,1,0), (-1,0,-1), (0,1,1).
// det = 1, trace = 1, characteristic polynomial x^3 - x^2 + 2x - 1.
Mat3 coupling_matrix();
Mat3 coupling_matrix_inverse();

// Monic characteristic polynomial coefficients (c3, c2, c1, c0) of the
// coupling matrix, computed from traces (Faddeev-LeVerrier), not hardcoded.
std::array<double, 4> char_poly_coeffs();

struct EigenSystem {
    std::array<cx, 3> eigenvalues;  // sorted by (Re, Im)
    Mat3 vectors;                   // columns are right eigenvectors
    Mat3 vectors_inverse;
};

// Eigen-decomposition of the coupling matrix: Newton on the characteristic
// polynomial for the real root, quadratic deflation for the complex pair,
// eigenvectors in closed form. Computed once and cached.
const EigenSystem& eigen_decompose_M();

// max_i |arg lambda_i|; strictly below pi/2 for this system.
double spectral_angle();

// pi/2 - spectral_angle().
double spectral_margin();

// ---------------------------------------------------------------------------
// The Fourier symbol a(zeta) = |zeta|^2 M and derived quantities.
// ---------------------------------------------------------------------------

struct SymbolPoint {
    std::vector<double> zeta;
    Mat3 matrix;  // |zeta|^2 * M exactly
};

SymbolPoint symbol_at(std::span<const double> zeta);

// (lambda I + a(zeta))^{-1} by cofactor inversion. Throws SingularResolvent
// when lambda is within relative tolerance 1e-14 of -spectrum(a(zeta)).
Mat3 resolvent_at(cx lambda, std::span<const double> zeta);
Mat3 resolvent_at_sq(cx lambda, double zeta_sq);

// lambda^{1-|alpha|/2} zeta^alpha (lambda + a(zeta))^{-1} with the principal
// branch of the square root. Quasi-homogeneous of degree (2,1):
// kappa(r^2 lambda, r zeta, alpha) = kappa(lambda, zeta, alpha).
Mat3 kappa(cx lambda, std::span<const double> zeta, std::span<const int> alpha);

// ---------------------------------------------------------------------------
// Holomorphic calculus on the sector.
// ---------------------------------------------------------------------------

// A bounded holomorphic function on the sector |arg z| < sigma, decaying at
// 0 and infinity (up to the shifted-resolvent member, which only decays at
// infinity; the closed quadrature contour below handles it as well).
struct TestFunction {
    std::string id;
    double sigma;  // sup of admissible sector half-angles
    std::function<cx(cx)> f;

    cx operator()(cx z) const { return f(z); }
};

TestFunction tf_rho();                           // z / (1+z)^2
TestFunction tf_sqrt_exp();                      // z^{1/2} e^{-z}, sigma just below pi/2
TestFunction tf_shifted_inverse(double lambda0); // lambda0 / (lambda0 + z)

// Truncated integration path: rays at angles +-psi between radii r_min and
// r_max, joined by circular arcs at both radii so the quadrature contour is
// closed around the spectrum. n_nodes counts quadrature nodes per ray
// (rounded up to whole Gauss-Legendre panels).
struct ContourSpec {
    double psi;
    double r_min = 1e-6;
    double r_max = 1e6;
    int n_nodes = 200;

    void validate(double sigma) const;
};

// Contour placed midway between the spectral angle and the test function's
// sector bound, with the default truncation radii and node count.
ContourSpec default_contour(const TestFunction& f);

// h_f(zeta): Cauchy integral of f(mu)(mu - a(zeta))^{-1} over the contour,
// by composite Gauss-Legendre after log-radial substitution on the rays.
// Throws DegenerateSymbol for zeta = 0.
Mat3 holomorphic_calculus(const TestFunction& f, std::span<const double> zeta,
                          const ContourSpec& contour);
Mat3 holomorphic_calculus_sq(const TestFunction& f, double zeta_sq,
                             const ContourSpec& contour);

// Independent spectral route: f(a(zeta)) = V diag(f(|zeta|^2 lambda_i)) V^{-1}.
Mat3 matrix_function_oracle(const std::function<cx(cx)>& f, double zeta_sq);

// ---------------------------------------------------------------------------
// Sector diagnostics.
// ---------------------------------------------------------------------------

struct ResolventSample {
    cx lambda;
    double zeta_sq;
    double resolvent_norm;  // ||lambda (lambda + a)^{-1}||_2
};

struct SectorSweepParams {
    double phi_margin = 0.05;   // sector Sigma_{pi - phi}, phi = angle + margin
    int lambda_radii = 16;      // log-spaced in [lambda_r_min, lambda_r_max]
    int lambda_angles = 9;
    double lambda_r_min = 1e-3;
    double lambda_r_max = 1e3;
    int zeta_points = 25;       // |zeta| log-spaced in [zeta_min, zeta_max]
    double zeta_min = 1e-3;
    double zeta_max = 1e3;
};

struct SectorReport {
    std::array<cx, 3> eigenvalues_of_M;
    double spectral_angle;
    double margin;
    double resolvent_sup;
    SectorSweepParams params;
    std::vector<ResolventSample> sweep;
};

SectorReport compute_sector_report(const SectorSweepParams& params = {});

// Samples of lambda inside Sigma_{pi - phi} on a log-radial grid; shared by
// the sector sweep and the multiplier module.
std::vector<cx> sample_sector_lambdas(double phi, int n_radii, int n_angles,
                                      double r_min, double r_max);

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

}  // namespace thermoplate::symbol
