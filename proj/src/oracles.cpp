#include "thermoplate/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace thermoplate::oracles {

std::array<cx, 3> cubic_roots_closed_form(const std::array<double, 4>& coeffs) {
    if (coeffs[0] != 1.0) {
        throw PreconditionViolated("cubic_roots_closed_form: monic cubic required");
    }
    const double a = coeffs[1];
    const double b = coeffs[2];
    const double c = coeffs[3];
    // Depressed cubic t^3 + p t + q with x = t - a/3.
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::array<cx, 3> roots;
    if (disc > 0.0) {
        // One real root (Cardano), complex pair from quadratic deflation.
        const double sd = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sd);
        const double v = std::cbrt(-q / 2.0 - sd);
        const double t0 = u + v;
        const double x0 = t0 + shift;
        // x^3 + a x^2 + b x + c = (x - x0)(x^2 + B x + C).
        const double bq = a + x0;
        const double cq = -c / x0;
        const double qd = bq * bq - 4.0 * cq;
        const double re = -bq / 2.0;
        const double im = std::sqrt(std::max(-qd, 0.0)) / 2.0;
        roots = {cx(x0, 0.0), cx(re, im), cx(re, -im)};
    } else {
        // Three real roots, trigonometric form.
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-q / (2.0 * r), -1.0, 1.0));
        const double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k) {
            roots[static_cast<std::size_t>(k)] =
                cx(m * std::cos((phi + 2.0 * kPi * k) / 3.0) + shift, 0.0);
        }
    }
    std::sort(roots.begin(), roots.end(), [](cx x, cx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return roots;
}

Mat3 expm(const Mat3& a) {
    // Scale so the Taylor kernel converges fast, then square back up.
    const double nrm = frobenius_norm(a);
    int s = 0;
    double scaled = nrm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++s;
    }
    Mat3 x = a;
    if (s > 0) {
        x *= cx(std::ldexp(1.0, -s), 0.0);
    }
    Mat3 result = Mat3::identity();
    Mat3 term = Mat3::identity();
    for (int k = 1; k <= 24; ++k) {
        term = term * x;
        term *= cx(1.0 / k, 0.0);
        result += term;
    }
    for (int k = 0; k < s; ++k) {
        result = result * result;
    }
    return result;
}

double dense_inverse_value(const grid::Grid& g, const std::vector<cx>& coeffs,
                           const std::vector<int>& point) {
    if (coeffs.size() != g.size() || static_cast<int>(point.size()) != g.ndim()) {
        throw ShapeMismatch("dense_inverse_value: size mismatch");
    }
    cx acc = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(g.ndim()));
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
        grid::unflatten(g, flat, idx);
        cx basis = 1.0;
        for (int d = 0; d < g.ndim(); ++d) {
            const double x = g.point_coord(d, point[static_cast<std::size_t>(d)]);
            const double z = g.zeta_component(d, idx[static_cast<std::size_t>(d)]);
            if (g.dirs[static_cast<std::size_t>(d)].kind == grid::DirectionKind::fourier) {
                basis *= std::polar(1.0, z * x);
            } else {
                basis *= std::sin(z * x);
            }
        }
        acc += coeffs[flat] * basis;
    }
    return acc.real();
}

std::vector<double> dense_inverse(const grid::Grid& g, const std::vector<cx>& coeffs) {
    std::vector<double> out(g.size());
    std::vector<int> point(static_cast<std::size_t>(g.ndim()));
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        grid::unflatten(g, flat, point);
        out[flat] = dense_inverse_value(g, coeffs, point);
    }
    return out;
}

}  // namespace thermoplate::oracles
