#include "gscm/simlab.hpp"

#include <array>

namespace gscm {

namespace {

constexpr int kShapeLines = 50;

constexpr std::array<double, kShapeLines> kTheta{
    0.063, 0.188, 0.314, 0.44, 0.565, 0.691, 0.817, 0.942, 1.068, 1.194,
    1.319, 1.445, 1.571, 1.696, 1.822, 1.948, 2.073, 2.199, 2.325, 2.45,
    2.576, 2.702, 2.827, 2.953, 3.079, 3.204, 3.33, 3.456, 3.581, 3.707,
    3.833, 3.958, 4.084, 4.21, 4.335, 4.461, 4.587, 4.712, 4.838, 4.964,
    5.089, 5.215, 5.341, 5.466, 5.592, 5.718, 5.843, 5.969, 6.095, 6.22,
};

constexpr std::array<double, kShapeLines> kSigma{
    0.035, 0.044, 0.053, 0.062, 0.071, 0.08, 0.08, 0.073, 0.065, 0.058,
    0.05, 0.042, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035,
    0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.044, 0.053, 0.062, 0.071,
    0.08, 0.08, 0.073, 0.065, 0.058, 0.05, 0.042, 0.035, 0.035, 0.035,
    0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035, 0.035,
};

constexpr std::array<double, kShapeLines> kMuA{
    0.294, 0.304, 0.306, 0.29, 0.264, 0.241, 0.22, 0.213, 0.219, 0.239,
    0.259, 0.282, 0.298, 0.3, 0.276, 0.254, 0.236, 0.216, 0.211, 0.217,
    0.212, 0.206, 0.2, 0.192, 0.195, 0.239, 0.287, 0.313, 0.318, 0.321,
    0.322, 0.321, 0.319, 0.316, 0.312, 0.308, 0.28, 0.24, 0.197, 0.197,
    0.214, 0.231, 0.247, 0.264, 0.263, 0.256, 0.249, 0.244, 0.27, 0.283,
};

constexpr std::array<double, kShapeLines> kMuC{
    0.3, 0.263, 0.225, 0.188, 0.15, 0.15, 0.187, 0.225, 0.262, 0.3,
    0.29, 0.243, 0.197, 0.15, 0.15, 0.2, 0.25, 0.3, 0.3, 0.274,
    0.248, 0.222, 0.196, 0.17, 0.17, 0.2, 0.23, 0.26, 0.29, 0.32,
    0.32, 0.298, 0.275, 0.253, 0.23, 0.15, 0.2, 0.25, 0.3, 0.35,
    0.36, 0.312, 0.265, 0.218, 0.17, 0.17, 0.203, 0.235, 0.268, 0.3,
};

VecX to_vec(const std::array<double, kShapeLines>& a) { return Eigen::Map<const VecX>(a.data(), kShapeLines); }

}  // namespace

GscmParams builtin_shape(const std::string& name) {
  VecX mu;
  if (name == "A") {
    mu = to_vec(kMuA);
  } else if (name == "B") {
    mu = VecX::Constant(kShapeLines, 0.3);
  } else if (name == "C") {
    mu = to_vec(kMuC);
  } else {
    throw ModelError("unknown shape '" + name + "' (expected A, B or C)");
  }
  GscmParams params = GscmParams::unchecked(LineSet({0.5, 0.5}, to_vec(kTheta)), mu, to_vec(kSigma), 2.0);
  // Shape C puts about 3% of its normal mass below zero on its narrowest lines.
  params.validate(name == "C" ? 0.05 : 0.01);
  return params;
}

}  // namespace gscm
