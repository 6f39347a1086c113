#ifndef OCCMAP_RAYSAMPLE_H
#define OCCMAP_RAYSAMPLE_H

#include <Eigen/Core>

#include <cstdint>

namespace occmap
{
/// One sensor ray. `has_sample` is true iff `end` is a real return; miss-only rays (clipped rays and
/// non-final segments) only carry free-space evidence.
struct RaySample
{
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
  float intensity = 0.0f;
  bool has_sample = true;
  bool second_return = false;
  double timestamp = 0.0;

  double length() const { return (end - origin).norm(); }
  bool isFinite() const { return origin.allFinite() && end.allFinite(); }
};
}  // namespace occmap

#endif  // OCCMAP_RAYSAMPLE_H
