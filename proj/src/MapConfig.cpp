#include "occmap/MapConfig.h"

#include <cmath>

namespace occmap
{
namespace
{
void require(bool condition, const std::string &what)
{
  if (!condition)
  {
    throw ConfigError("invalid map configuration: " + what);
  }
}
}  // namespace

void MapConfig::validate() const
{
  require(std::isfinite(voxel_size) && voxel_size > 0.0, "voxel_size must be > 0");
  require(region_dim >= 1 && region_dim <= 1024, "region_dim must be in [1, 1024]");
  require(clamp_min < 0.0 && clamp_max > 0.0, "clamp range must straddle zero");
  require(hit_probability > 0.5 && hit_probability < 1.0, "hit probability must be in (0.5, 1)");
  require(miss_probability > 0.0 && miss_probability < 0.5, "miss probability must be in (0, 0.5)");
  require(occupied_threshold > 0.0 && occupied_threshold < 1.0, "occupied threshold must be in (0, 1)");
  require(max_ray_range > 0.0, "max_ray_range must be > 0");
  require(segment_length > voxel_size, "segment_length must exceed voxel_size");
  require(tsdf_truncation >= voxel_size, "tsdf truncation must be >= voxel_size");
  require(tsdf_max_weight > 0.0, "tsdf max weight must be > 0");
  require(ndt_sensor_noise > 0.0, "ndt sensor noise must be > 0");
  require(ndt_miss_check_threshold >= 0.0 && ndt_miss_check_threshold <= 1.0,
          "ndt miss check threshold must be in [0, 1]");
}
}  // namespace occmap
