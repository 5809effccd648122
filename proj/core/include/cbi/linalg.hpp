#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace cbi {

struct Vec2 {
    double v[2]{0.0, 0.0};

    constexpr double& operator[](int i) { return v[i]; }
    constexpr double operator[](int i) const { return v[i]; }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return Vec2{{a[0] + b[0], a[1] + b[1]}}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return Vec2{{a[0] - b[0], a[1] - b[1]}}; }
constexpr Vec2 operator*(double s, Vec2 a) { return Vec2{{s * a[0], s * a[1]}}; }
constexpr Vec2& operator+=(Vec2& a, Vec2 b) { a[0] += b[0]; a[1] += b[1]; return a; }

constexpr double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double m[2][2]{{0.0, 0.0}, {0.0, 0.0}};

    constexpr double& operator()(int r, int c) { return m[r][c]; }
    constexpr double operator()(int r, int c) const { return m[r][c]; }

    static constexpr Mat2 identity() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }
};

constexpr Mat2 operator+(Mat2 a, Mat2 b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

constexpr Mat2 operator-(Mat2 a, Mat2 b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

constexpr Mat2 operator*(double s, Mat2 a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = s * a(i, j);
    return r;
}

constexpr Mat2& operator+=(Mat2& a, Mat2 b) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) += b(i, j);
    return a;
}

constexpr Vec2 operator*(Mat2 a, Vec2 x) {
    return Vec2{{a(0, 0) * x[0] + a(0, 1) * x[1], a(1, 0) * x[0] + a(1, 1) * x[1]}};
}

constexpr Mat2 operator*(Mat2 a, Mat2 b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

constexpr Mat2 outer(Vec2 a, Vec2 b) {
    return Mat2{{{a[0] * b[0], a[0] * b[1]}, {a[1] * b[0], a[1] * b[1]}}};
}

constexpr Mat2 transpose(Mat2 a) {
    return Mat2{{{a(0, 0), a(1, 0)}, {a(0, 1), a(1, 1)}}};
}

constexpr double quad_form(Mat2 a, Vec2 x, Vec2 y) { return dot(a * y, x); }

double max_abs(Mat2 a);

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
std::array<double, 2> sym_eigenvalues(Mat2 a);

/// Symmetric PSD square root; eigenvalues below zero are clipped to zero.
Mat2 sym_sqrt_psd(Mat2 a);

using Mat4 = std::array<std::array<double, 4>, 4>;

/// Kahan-compensated running sum.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct GaussLegendre {
    std::vector<double> nodes;    // on (0,1)
    std::vector<double> weights;  // summing to 1
};

/// Gauss-Legendre rule with n nodes mapped to the unit interval.
GaussLegendre gauss_legendre_unit(int n);

}  // namespace cbi
