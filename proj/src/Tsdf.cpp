#include "occmap/Tsdf.h"

#include <cmath>

namespace occmap
{
std::optional<double> tsdfProjectiveDistance(const Eigen::Vector3d &sensor, const Eigen::Vector3d &unit_dir,
                                             double sample_range, const Eigen::Vector3d &voxel_centre,
                                             double truncation)
{
  const double projection = (voxel_centre - sensor).dot(unit_dir);
  const double distance = sample_range - projection;
  if (std::abs(distance) > truncation)
  {
    return std::nullopt;
  }
  return distance;
}


std::optional<TsdfVoxel> tsdfQuery(OccupancyMap &map, const Eigen::Vector3d &point)
{
  if (!point.allFinite())
  {
    return std::nullopt;
  }
  const VoxelRef ref = findVoxel(map, keyForPoint(point, map.config()));
  if (!ref || ref.region->tsdf.empty())
  {
    return std::nullopt;
  }
  const TsdfVoxel voxel = ref.region->tsdf[ref.index];
  if (voxel.weight <= 0.0f)
  {
    return std::nullopt;
  }
  return voxel;
}
}  // namespace occmap
