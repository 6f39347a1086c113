#ifndef OCCMAP_TRAVERSAL_H
#define OCCMAP_TRAVERSAL_H

#include "Key.h"
#include "MapConfig.h"
#include "RaySample.h"

#include <Eigen/Core>

#include <cstdlib>
#include <vector>

namespace occmap
{
/// A voxel crossed by a ray. entry_t/exit_t are ray parameters in [0, 1].
struct VoxelVisit
{
  VoxelKey key;
  double entry_t = 0.0;
  double exit_t = 0.0;
  double path_length = 0.0;
};

namespace detail
{
/// Amanatides-Woo line walk over an integer grid whose cell edge is `scale * voxel_size`.
///
/// Cell boundaries are evaluated as `double(boundary_index * scale) * voxel_size`, so voxel walks
/// (scale 1) and region walks (scale region_dim) compute bit-identical crossing parameters at shared
/// faces. Exactly one axis steps per iteration; ties break x, then y, then z. Only axes with remaining
/// steps towards `end_cell` are considered, so the walk always terminates in `end_cell`.
///
/// @p fn is called as fn(const Coord3 &cell, double entry_t, double exit_t) in order from origin to end.
template <typename Fn>
void walkCells(const Eigen::Vector3d &origin, const Eigen::Vector3d &end, Coord3 cell, const Coord3 &end_cell,
               double voxel_size, std::int64_t scale, Fn &&fn)
{
  const Eigen::Vector3d dir = end - origin;
  std::int64_t step[3];
  std::int64_t remaining[3];
  double t_max[3];

  const auto boundary_t = [&](int axis) {
    const std::int64_t boundary = cell[axis] + (step[axis] > 0 ? 1 : 0);
    return (static_cast<double>(boundary * scale) * voxel_size - origin[axis]) / dir[axis];
  };

  for (int a = 0; a < 3; ++a)
  {
    const std::int64_t delta = end_cell[a] - cell[a];
    step[a] = (delta > 0) - (delta < 0);
    remaining[a] = delta < 0 ? -delta : delta;
    t_max[a] = step[a] != 0 ? boundary_t(a) : 0.0;
  }

  double entry = 0.0;
  for (;;)
  {
    int axis = -1;
    for (int a = 0; a < 3; ++a)
    {
      if (remaining[a] > 0 && (axis < 0 || t_max[a] < t_max[axis]))
      {
        axis = a;
      }
    }
    if (axis < 0)
    {
      fn(static_cast<const Coord3 &>(cell), entry, 1.0);
      return;
    }

    double exit = t_max[axis];
    exit = exit < entry ? entry : (exit > 1.0 ? 1.0 : exit);
    fn(static_cast<const Coord3 &>(cell), entry, exit);
    cell[axis] += step[axis];
    --remaining[axis];
    entry = exit;
    t_max[axis] = boundary_t(axis);
  }
}
}  // namespace detail

/// Walk voxels from origin to end, calling fn(const VoxelKey &, double entry_t, double exit_t).
template <typename Fn>
void forEachVoxel(const Eigen::Vector3d &origin, const Eigen::Vector3d &end, const MapConfig &cfg, Fn &&fn)
{
  const Coord3 start = globalVoxel(origin, cfg.voxel_size);
  const Coord3 stop = globalVoxel(end, cfg.voxel_size);
  detail::walkCells(origin, end, start, stop, cfg.voxel_size, 1,
                    [&](const Coord3 &g, double t0, double t1) { fn(keyFromGlobal(g, cfg.region_dim), t0, t1); });
}

/// Exact voxel sequence crossed by the ray, including the end voxel. Zero-length rays yield one visit.
std::vector<VoxelVisit> walkVoxels(const RaySample &ray, const MapConfig &cfg);

/// Same walk at region resolution. Every region holding a walkVoxels() visit appears in the result.
std::vector<RegionCoord> walkRegions(const RaySample &ray, const MapConfig &cfg);

/// Split into contiguous pieces no longer than segment_length. Only the final piece keeps has_sample.
std::vector<RaySample> segmentRay(const RaySample &ray, const MapConfig &cfg);

/// Number of segments segmentRay() produces for a ray of @p length.
std::size_t segmentCount(double length, double segment_length);

/// Shorten rays longer than max_ray_range; a clipped ray becomes miss-only.
RaySample clipRay(const RaySample &ray, const MapConfig &cfg);
}  // namespace occmap

#endif  // OCCMAP_TRAVERSAL_H
