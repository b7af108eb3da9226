#pragma once

#include <Eigen/Core>

#include <numbers>
#include <stdexcept>
#include <string>

namespace gscm {

using Index = Eigen::Index;

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using VecXT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatXT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Point = Vec2T<double>;
using VecX = VecXT<double>;
using MatX = MatXT<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Absolute incidence tolerance in unit-square model space.
inline constexpr double kGeomTol = 1e-9;

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or degenerate geometry (non-simple, zero area, too few points).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A starting point that is not admissible: outside the polygon, or outside
/// the kernel when an exact star representation was requested.
class StartPointError : public Error {
 public:
  using Error::Error;
};

/// Raster window does not cover the polygon being rasterized.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// Invalid model parameters (covariance, positivity, line sets).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Fitting could not proceed (empty admissible region, line cap reached).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gscm
