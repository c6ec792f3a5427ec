#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>

namespace projflow {

using Vector = Eigen::VectorXd;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Row-major 2x2 tensor; `grad[i][j]` is d(component i)/d(x_j).
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Scalar field of (t, x, y).
using ScalarFn = std::function<double(double, double, double)>;
/// Vector field of (t, x, y).
using VectorFn = std::function<Vec2(double, double, double)>;
/// Gradient of a vector field of (t, x, y).
using TensorFn = std::function<Mat2(double, double, double)>;

}  // namespace projflow
