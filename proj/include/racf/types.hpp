#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace racf {

template <typename Scalar>
using Grid = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Spectrum = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Vec2<double>;

// Pixel coordinates are continuous with pixel (row i, col j) covering
// [j, j+1) x [i, i+1), so its center sits at (j + 0.5, i + 0.5).
// Points are (x, y) with y growing downward.

struct Size {
    double width = 0.0;
    double height = 0.0;
};

struct Image {
    Grid<double> pixels;  // rows = height, cols = width

    Image() = default;
    explicit Image(Grid<double> p) : pixels(std::move(p)) {}
    Image(int width, int height, double fill = 0.0)
        : pixels(Grid<double>::Constant(height, width, fill)) {}

    int width() const { return static_cast<int>(pixels.cols()); }
    int height() const { return static_cast<int>(pixels.rows()); }
    double operator()(int row, int col) const { return pixels(row, col); }
    double& operator()(int row, int col) { return pixels(row, col); }
};

class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileNotFoundError : public IoError {
public:
    using IoError::IoError;
};

class UnsupportedFormatError : public IoError {
public:
    using IoError::IoError;
};

class CorruptImageError : public IoError {
public:
    using IoError::IoError;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-180, 180].
inline double normalize_degrees(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

/// cos/sin of an angle in degrees, exact at multiples of 90.
inline std::pair<double, double> cos_sin_deg(double deg) {
    const double a = normalize_degrees(deg);
    if (a == 0.0) return {1.0, 0.0};
    if (a == 90.0) return {0.0, 1.0};
    if (a == 180.0) return {-1.0, 0.0};
    if (a == -90.0) return {0.0, -1.0};
    const double r = deg2rad(a);
    return {std::cos(r), std::sin(r)};
}

/// Rotates a vector anticlockwise on screen (y axis pointing down).
template <typename Scalar>
Vec2<Scalar> rotate_on_screen(const Vec2<Scalar>& v, double deg) {
    const auto [c, s] = cos_sin_deg(deg);
    return {Scalar(c) * v.x() + Scalar(s) * v.y(), -Scalar(s) * v.x() + Scalar(c) * v.y()};
}

/// Signed offset of index i from the origin on a ring of length n, in [-n/2, n/2).
inline double wrap_offset(double i, double n) {
    double r = std::fmod(i, n);
    if (r < 0) r += n;
    if (r >= n / 2.0) r -= n;
    return r;
}

}  // namespace racf
