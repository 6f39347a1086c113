#ifndef OCCMAP_KEY_H
#define OCCMAP_KEY_H

#include "MapConfig.h"

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace occmap
{
/// Integer coordinate of a region (or a global voxel) in grid units.
struct Coord3
{
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  std::int64_t &operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
  std::int64_t operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend auto operator<=>(const Coord3 &, const Coord3 &) = default;
};

using RegionCoord = Coord3;

struct Coord3Hash
{
  std::size_t operator()(const Coord3 &c) const noexcept
  {
    // Spatial hash with large primes; collisions resolve in the hash map buckets.
    const auto h = static_cast<std::uint64_t>(c.x) * 73856093ull ^ static_cast<std::uint64_t>(c.y) * 19349663ull ^
                   static_cast<std::uint64_t>(c.z) * 83492791ull;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Addresses a single voxel: the owning region plus a local index in [0, region_dim) per axis.
struct VoxelKey
{
  RegionCoord region;
  std::int32_t lx = 0;
  std::int32_t ly = 0;
  std::int32_t lz = 0;

  friend auto operator<=>(const VoxelKey &, const VoxelKey &) = default;
};

/// Floor division with a non-negative remainder for positive divisors.
inline std::int64_t floorDiv(std::int64_t value, std::int64_t divisor)
{
  std::int64_t q = value / divisor;
  if ((value % divisor) != 0 && ((value < 0) != (divisor < 0)))
  {
    --q;
  }
  return q;
}

/// Global voxel coordinate containing @p p. Throws std::domain_error for non-finite input.
Coord3 globalVoxel(const Eigen::Vector3d &p, double voxel_size);

VoxelKey keyFromGlobal(const Coord3 &global, int region_dim);
Coord3 globalFromKey(const VoxelKey &key, int region_dim);

VoxelKey keyForPoint(const Eigen::Vector3d &p, const MapConfig &cfg);
Eigen::Vector3d voxelCenter(const VoxelKey &key, const MapConfig &cfg);
Eigen::Vector3d voxelCenter(const Coord3 &global, double voxel_size);

/// Linear index of the key's voxel within its region buffer (x fastest).
inline std::size_t localIndex(const VoxelKey &key, int region_dim)
{
  const auto d = static_cast<std::size_t>(region_dim);
  return static_cast<std::size_t>(key.lx) +
         d * (static_cast<std::size_t>(key.ly) + d * static_cast<std::size_t>(key.lz));
}
}  // namespace occmap

template <>
struct std::hash<occmap::VoxelKey>
{
  std::size_t operator()(const occmap::VoxelKey &k) const noexcept
  {
    const std::size_t h = occmap::Coord3Hash{}(k.region);
    return h ^ (static_cast<std::size_t>(k.lx) * 2654435761u + static_cast<std::size_t>(k.ly) * 40503u +
                static_cast<std::size_t>(k.lz) * 97u + (h << 6) + (h >> 2));
  }
};

#endif  // OCCMAP_KEY_H
