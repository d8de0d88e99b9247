#pragma once

#include <array>
#include <cmath>
#include <algorithm>

#include "thermoplate/common.hpp"

namespace thermoplate {

using Vec3 = std::array<cx, 3>;

// Dense complex 3x3 matrix. The state space of the first-order system is
// three-dimensional, so everything fiberwise reduces to this type; inversion
// is explicit cofactor inversion (deterministic, branch-free).
struct Mat3 {
    std::array<cx, 9> a{};

    cx& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
    const cx& operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

    static Mat3 zero() { return Mat3{}; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    static Mat3 from_rows(const std::array<std::array<double, 3>, 3>& rows) {
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        return m;
    }

    Mat3& operator+=(const Mat3& o) {
        for (int i = 0; i < 9; ++i) a[static_cast<std::size_t>(i)] += o.a[static_cast<std::size_t>(i)];
        return *this;
    }
    Mat3& operator-=(const Mat3& o) {
        for (int i = 0; i < 9; ++i) a[static_cast<std::size_t>(i)] -= o.a[static_cast<std::size_t>(i)];
        return *this;
    }
    Mat3& operator*=(cx s) {
        for (auto& v : a) v *= s;
        return *this;
    }

    friend Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
    friend Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
    friend Mat3 operator*(cx s, Mat3 x) { return x *= s; }
    friend Mat3 operator*(Mat3 x, cx s) { return x *= s; }

    friend Mat3 operator*(const Mat3& x, const Mat3& y) {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                cx s = 0.0;
                for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
                r(i, j) = s;
            }
        }
        return r;
    }

    friend Vec3 operator*(const Mat3& x, const Vec3& v) {
        Vec3 r{};
        for (int i = 0; i < 3; ++i) {
            r[static_cast<std::size_t>(i)] =
                x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
        }
        return r;
    }

    Mat3 adjoint() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) r(i, j) = std::conj((*this)(j, i));
        }
        return r;
    }

    cx det() const {
        const Mat3& m = *this;
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    cx trace() const { return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2); }
};

inline Mat3 cofactor_inverse(const Mat3& m, cx* det_out = nullptr) {
    Mat3 adj;
    adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const cx d = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
    if (det_out != nullptr) {
        *det_out = d;
    }
    const cx inv_d = 1.0 / d;
    for (auto& v : adj.a) v *= inv_d;
    return adj;
}

inline double frobenius_norm(const Mat3& m) {
    double s = 0.0;
    for (const auto& v : m.a) s += std::norm(v);
    return std::sqrt(s);
}

inline double max_abs(const Mat3& m) {
    double s = 0.0;
    for (const auto& v : m.a) s = std::max(s, std::abs(v));
    return s;
}

inline double max_abs(const Vec3& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

inline double norm2(const Vec3& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

// Operator 2-norm: sqrt of the largest eigenvalue of A^H A, computed by the
// closed-form trigonometric solution of the Hermitian 3x3 eigenproblem.
inline double op2_norm(const Mat3& m) {
    const Mat3 h = m.adjoint() * m;
    const double h00 = h(0, 0).real(), h11 = h(1, 1).real(), h22 = h(2, 2).real();
    const double p1 = std::norm(h(0, 1)) + std::norm(h(0, 2)) + std::norm(h(1, 2));
    if (p1 == 0.0) {
        return std::sqrt(std::max({h00, h11, h22, 0.0}));
    }
    const double q = (h00 + h11 + h22) / 3.0;
    const double p2 = (h00 - q) * (h00 - q) + (h11 - q) * (h11 - q) +
                      (h22 - q) * (h22 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat3 b = h;
    b(0, 0) -= q;
    b(1, 1) -= q;
    b(2, 2) -= q;
    b *= cx(1.0 / p, 0.0);
    double r = 0.5 * b.det().real();
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double eig_max = q + 2.0 * p * std::cos(phi);
    return std::sqrt(std::max(eig_max, 0.0));
}

}  // namespace thermoplate
