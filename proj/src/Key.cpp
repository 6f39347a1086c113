#include "occmap/Key.h"

#include <cmath>
#include <stdexcept>

namespace occmap
{
Coord3 globalVoxel(const Eigen::Vector3d &p, double voxel_size)
{
  if (!p.allFinite())
  {
    throw std::domain_error("voxel key requested for a non-finite point");
  }
  return Coord3{ static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
                 static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
                 static_cast<std::int64_t>(std::floor(p.z() / voxel_size)) };
}


VoxelKey keyFromGlobal(const Coord3 &global, int region_dim)
{
  VoxelKey key;
  key.region = Coord3{ floorDiv(global.x, region_dim), floorDiv(global.y, region_dim), floorDiv(global.z, region_dim) };
  key.lx = static_cast<std::int32_t>(global.x - key.region.x * region_dim);
  key.ly = static_cast<std::int32_t>(global.y - key.region.y * region_dim);
  key.lz = static_cast<std::int32_t>(global.z - key.region.z * region_dim);
  return key;
}


Coord3 globalFromKey(const VoxelKey &key, int region_dim)
{
  return Coord3{ key.region.x * region_dim + key.lx, key.region.y * region_dim + key.ly,
                 key.region.z * region_dim + key.lz };
}


VoxelKey keyForPoint(const Eigen::Vector3d &p, const MapConfig &cfg)
{
  return keyFromGlobal(globalVoxel(p, cfg.voxel_size), cfg.region_dim);
}


Eigen::Vector3d voxelCenter(const Coord3 &global, double voxel_size)
{
  return Eigen::Vector3d((static_cast<double>(global.x) + 0.5) * voxel_size,
                         (static_cast<double>(global.y) + 0.5) * voxel_size,
                         (static_cast<double>(global.z) + 0.5) * voxel_size);
}


Eigen::Vector3d voxelCenter(const VoxelKey &key, const MapConfig &cfg)
{
  return voxelCenter(globalFromKey(key, cfg.region_dim), cfg.voxel_size);
}
}  // namespace occmap
