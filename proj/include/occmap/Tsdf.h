#ifndef OCCMAP_TSDF_H
#define OCCMAP_TSDF_H

#include "Layers.h"
#include "MapConfig.h"
#include "OccupancyMap.h"

#include <Eigen/Core>

#include <optional>

namespace occmap
{
/// Weighted running average of a new signed distance observation; weight saturates at max_weight.
inline TsdfVoxel tsdfMerge(const TsdfVoxel &voxel, double observed, double observed_weight, double max_weight)
{
  const double w = voxel.weight;
  const double total = w + observed_weight;
  TsdfVoxel out;
  out.distance = static_cast<float>((w * voxel.distance + observed_weight * observed) / total);
  out.weight = static_cast<float>(total < max_weight ? total : max_weight);
  return out;
}

/// Projective signed distance of a voxel centre: range of the sample minus the centre's projection onto the
/// ray, clamped to +/- truncation. Positive between sensor and surface. nullopt when the projection lies
/// outside the truncation band.
std::optional<double> tsdfProjectiveDistance(const Eigen::Vector3d &sensor, const Eigen::Vector3d &unit_dir,
                                             double sample_range, const Eigen::Vector3d &voxel_centre,
                                             double truncation);

/// Value of the voxel containing @p point; nullopt when never observed.
std::optional<TsdfVoxel> tsdfQuery(OccupancyMap &map, const Eigen::Vector3d &point);
}  // namespace occmap

#endif  // OCCMAP_TSDF_H
