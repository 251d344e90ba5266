#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string_view>

namespace actgate {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// One 6-axis IMU reading: 3 accelerations and 3 angular velocities in
/// whatever units the device reports. `t` is the sample index within the
/// stream and increments by one per reading.
template <typename Scalar>
struct Sample {
  std::int64_t t{0};
  Vec3<Scalar> acc{Vec3<Scalar>::Zero()};
  Vec3<Scalar> gyro{Vec3<Scalar>::Zero()};
};

inline constexpr int kFeatureCount = 12;

/// Index into a FeatureVector. The order is fixed; serialized outputs and
/// the selected-feature fields of verdicts refer to these indices.
enum FeatureId : int {
  kNormA = 0,   // |acc|
  kNormW,       // |gyro|
  kDerAx,       // first difference of acc.x
  kDerWy,       // first difference of gyro.y
  kDerNormW,    // first difference of |gyro|
  kGravX,       // gravity direction from roll/pitch Euler angles
  kGravY,
  kGravZ,
  kMcWx,        // hysteretic mean-crossing amplitude of gyro.x
  kMcWy,        // same for gyro.y
  kP2pNormA,    // recursive peak-to-peak of |acc|
  kP2pWx,       // recursive peak-to-peak of gyro.x
};

template <typename Scalar>
using FeatureVector = Eigen::Matrix<Scalar, kFeatureCount, 1>;

constexpr std::string_view feature_name(int id) {
  constexpr std::string_view names[kFeatureCount] = {
      "norm_a", "norm_w",  "der_ax", "der_wy", "der_normw", "g_x",
      "g_y",    "g_z",     "mc_wx",  "mc_wy",  "p2p_norma", "p2p_wx"};
  return (id >= 0 && id < kFeatureCount) ? names[id] : "?";
}

}  // namespace actgate
