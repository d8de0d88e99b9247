#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thermoplate/oracles.hpp"
#include "thermoplate/rng.hpp"
#include "thermoplate/symbol.hpp"

using namespace thermoplate;
namespace sym = thermoplate::symbol;

namespace {

Mat3 plus_identity(Mat3 m, cx lambda) {
    m(0, 0) += lambda;
    m(1, 1) += lambda;
    m(2, 2) += lambda;
    return m;
}

}  // namespace

TEST_CASE("coupling matrix invariants") {
    const Mat3 m = sym::coupling_matrix();
    CHECK(m.det().real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.trace().real() == doctest::Approx(1.0).epsilon(1e-15));
    const Mat3 prod = m * sym::coupling_matrix_inverse();
    CHECK(max_abs(prod - Mat3::identity()) <= 1e-15);
}

TEST_CASE("characteristic polynomial matches the hand derivation") {
    // Cofactor expansion of det(xI - M) gives x^3 - x^2 + 2x - 1.
    const auto c = sym::char_poly_coeffs();
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -1.0);
    CHECK(c[2] == 2.0);
    CHECK(c[3] == -1.0);
}

TEST_CASE("eigen decomposition: values, sorting, reconstruction") {
    const auto& sys = sym::eigen_decompose_M();

    // Frozen anchors from the closed-form cubic oracle.
    CHECK(sys.eigenvalues[0].real() == doctest::Approx(0.2150798545009732).epsilon(1e-12));
    CHECK(sys.eigenvalues[0].imag() == doctest::Approx(-1.3071412786820462).epsilon(1e-12));
    CHECK(sys.eigenvalues[1].imag() == doctest::Approx(1.3071412786820462).epsilon(1e-12));
    CHECK(sys.eigenvalues[2].real() == doctest::Approx(0.5698402909980534).epsilon(1e-12));
    CHECK(sys.eigenvalues[2].imag() == 0.0);

    const auto oracle = oracles::cubic_roots_closed_form(sym::char_poly_coeffs());
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(sys.eigenvalues[i] - oracle[i]) <= 1e-12);
    }

    // Product of eigenvalues = det M = 1.
    const cx prod = sys.eigenvalues[0] * sys.eigenvalues[1] * sys.eigenvalues[2];
    CHECK(std::abs(prod - 1.0) <= 1e-13);

    // Reconstruction error <= 1e-12 in max norm.
    Mat3 recon = Mat3::zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            cx s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += sys.vectors(i, k) * sys.eigenvalues[k] * sys.vectors_inverse(k, j);
            }
            recon(i, j) = s;
        }
    }
    CHECK(max_abs(recon - sym::coupling_matrix()) <= 1e-12);
}

TEST_CASE("spectral angle and margin") {
    CHECK(sym::spectral_angle() == doctest::Approx(1.4077154426029532).epsilon(1e-12));
    CHECK(sym::spectral_margin() == doctest::Approx(0.16308088419194333).epsilon(1e-10));
    CHECK(sym::spectral_margin() > 0.1);

    // The angle is scale-invariant: arg(|zeta|^2 lambda) = arg(lambda).
    for (const double zsq : {1e-2, 1.0, 1e2}) {
        double a = 0.0;
        for (const auto& ev : sym::eigen_decompose_M().eigenvalues) {
            a = std::max(a, std::abs(std::arg(zsq * ev)));
        }
        CHECK(a == doctest::Approx(sym::spectral_angle()).epsilon(1e-14));
    }
    for (const auto& ev : sym::eigen_decompose_M().eigenvalues) {
        CHECK(ev.real() > 0.0);
    }
}

TEST_CASE("symbol point is |zeta|^2 M exactly") {
    const std::vector<double> zeta = {1.5, -2.0, 0.5};
    const auto p = sym::symbol_at(zeta);
    const double zsq = 1.5 * 1.5 + 4.0 + 0.25;
    CHECK(max_abs(p.matrix - sym::coupling_matrix() * cx(zsq, 0.0)) == 0.0);
    CHECK(max_abs(sym::symbol_at(std::vector<double>{0.0}).matrix) == 0.0);
}

TEST_CASE("resolvent: identity at zeta = 0, multiply-back, singularity") {
    const std::vector<double> zero = {0.0, 0.0};
    CHECK(max_abs(sym::resolvent_at(cx(1.0, 0.0), zero) - Mat3::identity()) <= 1e-15);

    // (I + M)^{-1} via multiply-back.
    const Mat3 r = sym::resolvent_at_sq(cx(1.0, 0.0), 1.0);
    const Mat3 back = plus_identity(sym::coupling_matrix(), 1.0) * r;
    CHECK(max_abs(back - Mat3::identity()) <= 1e-12);

    // lambda on -spectrum(a(zeta)) is rejected.
    const cx bad = -2.0 * sym::eigen_decompose_M().eigenvalues[2];
    CHECK_THROWS_AS((void)sym::resolvent_at_sq(bad, 2.0), SingularResolvent);
    CHECK_THROWS_AS((void)sym::resolvent_at_sq(cx(0.0, 0.0), 0.0), SingularResolvent);
}

TEST_CASE("norm of the inverse symbol scales like ||M^{-1}|| / |zeta|^2") {
    const double m_inv_norm = op2_norm(sym::coupling_matrix_inverse());
    for (const double zsq : {1e-3, 1.0, 47.0, 1e3}) {
        const Mat3 a_inv = cofactor_inverse(sym::coupling_matrix() * cx(zsq, 0.0));
        CHECK(op2_norm(a_inv) == doctest::Approx(m_inv_norm / zsq).epsilon(1e-12));
    }
}

TEST_CASE("resolvent identity at random sample points") {
    const CounterRng rng(1234);
    const double phi = sym::spectral_angle() + 0.05;
    for (int s = 0; s < 50; ++s) {
        const double r1 = std::pow(10.0, -1.0 + 2.0 * rng.uniform01(1, s));
        const double r2 = std::pow(10.0, -1.0 + 2.0 * rng.uniform01(2, s));
        const cx lambda = std::polar(r1, (kPi - phi) * 0.9 * rng.uniform_sym(3, s));
        const cx mu = std::polar(r2, (kPi - phi) * 0.9 * rng.uniform_sym(4, s));
        const double zsq = std::pow(10.0, -1.0 + 2.0 * rng.uniform01(5, s));
        const Mat3 rl = sym::resolvent_at_sq(lambda, zsq);
        const Mat3 rm = sym::resolvent_at_sq(mu, zsq);
        const Mat3 lhs = rl - rm;
        const Mat3 rhs = (mu - lambda) * (rl * rm);
        CHECK(max_abs(lhs - rhs) <= 1e-11 * std::max(1.0, max_abs(lhs)));
    }
}

TEST_CASE("resolvent sup sweep is finite and refinement-stable") {
    // The sup sits on the sector boundary near |lambda| = |zeta|^2 |lam_i|,
    // a peak of log-radial width comparable to the 0.05 angular margin; the
    // radial grid must resolve it before the sampled sup stabilizes.
    sym::SectorSweepParams coarse;
    coarse.lambda_radii = 301;
    coarse.lambda_angles = 9;
    coarse.zeta_points = 13;
    const auto rep_c = sym::compute_sector_report(coarse);
    // Nested refinement: 2n-1 points keep the coarse samples, so the sup
    // cannot decrease.
    sym::SectorSweepParams fine = coarse;
    fine.lambda_radii = 2 * fine.lambda_radii - 1;
    fine.lambda_angles = 2 * fine.lambda_angles - 1;
    fine.zeta_points = 2 * fine.zeta_points - 1;
    const auto rep_f = sym::compute_sector_report(fine);
    CHECK(std::isfinite(rep_c.resolvent_sup));
    CHECK(std::isfinite(rep_f.resolvent_sup));
    CHECK(rep_f.resolvent_sup >= rep_c.resolvent_sup * (1.0 - 1e-12));
    CHECK(rep_f.resolvent_sup <= rep_c.resolvent_sup * 1.25);
}

TEST_CASE("kappa: trivial values and quasi-homogeneity") {
    const std::vector<double> zero = {0.0};
    const std::vector<int> a0 = {0};
    CHECK(max_abs(sym::kappa(cx(1.0, 0.0), zero, a0) - Mat3::identity()) <= 1e-15);

    const CounterRng rng(77);
    const double phi = sym::spectral_angle() + 0.05;
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
        const cx lambda =
            std::polar(std::pow(10.0, -1.5 + 3.0 * rng.uniform01(1, s)),
                       (kPi - phi) * 0.95 * rng.uniform_sym(2, s));
        const std::vector<double> zeta = {2.0 * rng.uniform_sym(3, s) + 0.1,
                                          2.0 * rng.uniform_sym(4, s)};
        for (const auto& alpha :
             {std::vector<int>{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}) {
            const Mat3 base = sym::kappa(lambda, zeta, alpha);
            for (const double r : {2.0, 10.0}) {
                const std::vector<double> rz = {r * zeta[0], r * zeta[1]};
                worst = std::max(worst, max_abs(sym::kappa(r * r * lambda, rz, alpha) - base));
            }
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("kappa sup over samples is bounded and refinement-stable") {
    const double phi = sym::spectral_angle() + 0.05;
    auto sup_for = [&](int radii, int zetas) {
        const auto lambdas = sym::sample_sector_lambdas(phi, radii, 7, 1e-3, 1e3);
        double sup = 0.0;
        const std::vector<int> alpha = {1, 1};
        for (const auto& lambda : lambdas) {
            for (int i = 0; i < zetas; ++i) {
                const double zabs = std::pow(10.0, -2.0 + 4.0 * i / (zetas - 1.0));
                const std::vector<double> zeta = {zabs * 0.6, zabs * 0.8};
                sup = std::max(sup, op2_norm(sym::kappa(lambda, zeta, alpha)));
            }
        }
        return sup;
    };
    const double coarse = sup_for(8, 13);
    const double fine = sup_for(16, 25);
    CHECK(std::isfinite(coarse));
    CHECK(fine <= coarse * 1.5);
    CHECK(fine >= coarse * (1.0 - 1e-12));
}

TEST_CASE("holomorphic calculus agrees with the diagonalization oracle") {
    const auto rho = sym::tf_rho();
    const auto shifted = sym::tf_shifted_inverse(1.0);

    const Mat3 h_rho = sym::holomorphic_calculus_sq(rho, 1.0, sym::default_contour(rho));
    CHECK(frobenius_norm(h_rho - sym::matrix_function_oracle(rho.f, 1.0)) <=
          1e-6 * frobenius_norm(sym::matrix_function_oracle(rho.f, 1.0)));

    // lambda0/(lambda0+z) at |zeta|^2 = 1 equals (I + M)^{-1}: direct
    // inversion oracle.
    const Mat3 want = cofactor_inverse(plus_identity(sym::coupling_matrix(), 1.0));
    const Mat3 got = sym::holomorphic_calculus_sq(shifted, 1.0, sym::default_contour(shifted));
    CHECK(frobenius_norm(got - want) <= 1e-6 * frobenius_norm(want));
}

TEST_CASE("holomorphic calculus scaling substitution") {
    // h_f at zeta equals h_{f(c .)} at zeta / sqrt(c).
    const auto rho = sym::tf_rho();
    const double c = 4.0;
    sym::TestFunction scaled{"rho_scaled", rho.sigma, [c](cx z) {
                                 const cx w = 1.0 + c * z;
                                 return c * z / (w * w);
                             }};
    const Mat3 lhs = sym::holomorphic_calculus_sq(rho, 1.0, sym::default_contour(rho));
    const Mat3 rhs = sym::holomorphic_calculus_sq(scaled, 1.0 / c, sym::default_contour(scaled));
    CHECK(frobenius_norm(lhs - rhs) <= 1e-7 * frobenius_norm(lhs));
}

TEST_CASE("holomorphic calculus error and contour validation") {
    const auto rho = sym::tf_rho();
    CHECK_THROWS_AS((void)sym::holomorphic_calculus_sq(rho, 0.0, sym::default_contour(rho)),
                    DegenerateSymbol);

    sym::ContourSpec bad = sym::default_contour(rho);
    bad.psi = 0.5;  // below the spectral angle
    CHECK_THROWS_AS((void)sym::holomorphic_calculus_sq(rho, 1.0, bad), PreconditionViolated);
    bad = sym::default_contour(rho);
    bad.n_nodes = 1;
    CHECK_THROWS_AS((void)sym::holomorphic_calculus_sq(rho, 1.0, bad), PreconditionViolated);
    bad = sym::default_contour(rho);
    bad.r_min = 10.0;
    bad.r_max = 20.0;  // spectrum not enclosed
    CHECK_THROWS_AS((void)sym::holomorphic_calculus_sq(rho, 1.0, bad), PreconditionViolated);
}

TEST_CASE("matrix function oracle: zeros, exponential, multiplicativity") {
    const auto rho = sym::tf_rho();
    CHECK(max_abs(sym::matrix_function_oracle(rho.f, 0.0)) <= 1e-15);

    // f(z) = e^{-t z} with t = 1 at |zeta|^2 = 1 is expm(-M).
    const Mat3 via_spec = sym::matrix_function_oracle([](cx z) { return std::exp(-z); }, 1.0);
    const Mat3 via_ss = oracles::expm(sym::coupling_matrix() * cx(-1.0, 0.0));
    CHECK(frobenius_norm(via_spec - via_ss) <= 1e-10 * frobenius_norm(via_ss));

    const auto g = [](cx z) { return z / ((1.0 + z) * (1.0 + z)); };
    const Mat3 fg = sym::matrix_function_oracle([&](cx z) { return g(z) * g(z); }, 2.5);
    const Mat3 f_times_g =
        sym::matrix_function_oracle(g, 2.5) * sym::matrix_function_oracle(g, 2.5);
    CHECK(frobenius_norm(fg - f_times_g) <= 1e-10 * std::max(1.0, frobenius_norm(fg)));
}

TEST_CASE("test function family is bounded on its sector and decays") {
    for (const auto& f : {sym::tf_rho(), sym::tf_sqrt_exp()}) {
        const double theta = std::min(f.sigma * 0.9, 2.5);
        double sup = 0.0;
        for (int i = 0; i <= 60; ++i) {
            const double r = std::pow(10.0, -6.0 + 12.0 * i / 60.0);
            sup = std::max({sup, std::abs(f(std::polar(r, theta))),
                            std::abs(f(std::polar(r, -theta)))});
        }
        CHECK(std::isfinite(sup));
        CHECK(sup < 50.0);
        CHECK(std::abs(f(cx(1e-9, 0.0))) < 1e-4);   // decay at 0
        CHECK(std::abs(f(cx(1e9, 0.0))) < 1e-4);    // decay at infinity
    }
}
