#include "occmap/Traversal.h"

#include <cmath>
#include <stdexcept>

namespace occmap
{
std::vector<VoxelVisit> walkVoxels(const RaySample &ray, const MapConfig &cfg)
{
  if (!ray.isFinite())
  {
    throw std::domain_error("walkVoxels: non-finite ray");
  }
  const double length = ray.length();
  std::vector<VoxelVisit> visits;
  forEachVoxel(ray.origin, ray.end, cfg, [&](const VoxelKey &key, double t0, double t1) {
    visits.push_back(VoxelVisit{ key, t0, t1, (t1 - t0) * length });
  });
  return visits;
}


std::vector<RegionCoord> walkRegions(const RaySample &ray, const MapConfig &cfg)
{
  if (!ray.isFinite())
  {
    throw std::domain_error("walkRegions: non-finite ray");
  }
  const RegionCoord start = keyForPoint(ray.origin, cfg).region;
  const RegionCoord stop = keyForPoint(ray.end, cfg).region;
  std::vector<RegionCoord> regions;
  detail::walkCells(ray.origin, ray.end, start, stop, cfg.voxel_size, cfg.region_dim,
                    [&](const Coord3 &r, double, double) { regions.push_back(r); });
  return regions;
}


std::size_t segmentCount(double length, double segment_length)
{
  if (!(length > 0.0))
  {
    return 1;
  }
  // A ray that is an exact multiple of the segment length gets no empty trailing segment.
  const double pieces = std::ceil(length / segment_length - 1e-9);
  return pieces < 1.0 ? 1 : static_cast<std::size_t>(pieces);
}


std::vector<RaySample> segmentRay(const RaySample &ray, const MapConfig &cfg)
{
  const double length = ray.length();
  const std::size_t count = segmentCount(length, cfg.segment_length);
  std::vector<RaySample> segments;
  segments.reserve(count);
  if (count == 1)
  {
    segments.push_back(ray);
    return segments;
  }

  const Eigen::Vector3d dir = ray.end - ray.origin;
  Eigen::Vector3d start = ray.origin;
  for (std::size_t i = 0; i < count; ++i)
  {
    RaySample seg = ray;
    seg.origin = start;
    if (i + 1 == count)
    {
      seg.end = ray.end;
    }
    else
    {
      seg.end = ray.origin + dir * (static_cast<double>(i + 1) * cfg.segment_length / length);
      seg.has_sample = false;
    }
    start = seg.end;
    segments.push_back(seg);
  }
  return segments;
}


RaySample clipRay(const RaySample &ray, const MapConfig &cfg)
{
  const double length = ray.length();
  if (length <= cfg.max_ray_range)
  {
    return ray;
  }
  RaySample clipped = ray;
  clipped.end = ray.origin + (ray.end - ray.origin) * (cfg.max_ray_range / length);
  clipped.has_sample = false;
  return clipped;
}
}  // namespace occmap
