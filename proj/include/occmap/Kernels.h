#ifndef OCCMAP_KERNELS_H
#define OCCMAP_KERNELS_H

// Per-segment integration kernels shared by the sequential reference and the OpenMP executor. Each kernel is
// templated on a write policy (AtomicAccess for concurrent workers, PlainAccess for single-writer paths).

#include "Cas.h"
#include "Ndt.h"
#include "Occupancy.h"
#include "OccupancyMap.h"
#include "RaySample.h"
#include "Traversal.h"
#include "Tsdf.h"
#include "VoxelMean.h"

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace occmap
{
/// One unit of parallel work: a clipped ray segment plus its position within the source ray.
struct SegmentTask
{
  RaySample ray;
  /// Index of the source ray in the submitted batch.
  std::uint32_t source = 0;
  /// Distance from the source ray origin to this segment's origin.
  double start_range = 0.0;
  /// True for every segment except the last of its ray. The final voxel of such a segment is the first voxel
  /// of the next one and is left to that segment.
  bool continues = false;
};

/// Values derived from MapConfig once per batch.
struct KernelParams
{
  MapConfig cfg;
  double hit = 0.0;
  double miss = 0.0;

  explicit KernelParams(const MapConfig &config)
    : cfg(config)
    , hit(hitDelta(config))
    , miss(missDelta(config))
  {}
};

/// Per-worker tallies merged into BatchStats.
struct KernelTally
{
  CasCounters cas;
  std::uint64_t voxel_visits = 0;
  std::uint64_t unprefetched = 0;
};

namespace detail
{
/// Caches the last looked-up region; consecutive visits along a ray mostly share a region.
class RegionCursor
{
public:
  explicit RegionCursor(const OccupancyMap &map)
    : map_(map)
  {}

  Region *get(const RegionCoord &coord)
  {
    if (!region_ || coord != coord_)
    {
      coord_ = coord;
      region_ = map_.residentRegion(coord);
    }
    return region_;
  }

private:
  const OccupancyMap &map_;
  RegionCoord coord_;
  Region *region_ = nullptr;
};

inline Eigen::Vector3d voxelOffset(const Eigen::Vector3d &point, const VoxelKey &key, const MapConfig &cfg)
{
  const Eigen::Vector3d centre = voxelCenter(key, cfg);
  return (point - centre) / cfg.voxel_size + Eigen::Vector3d::Constant(0.5);
}
}  // namespace detail

/// Occupancy miss pass for one segment: one miss for every crossed voxel except the sample voxel, and the
/// decay layer's path length through every voxel (sample voxel included).
///
/// Batches run this pass over all segments before integrateOccupancyHit(). Within a pass every update moves
/// log-odds the same way, so clamping commutes and the batch result does not depend on segment order.
template <typename Access>
void integrateOccupancyMisses(const OccupancyMap &map, const SegmentTask &task, const KernelParams &params,
                              Access &access, KernelTally &tally)
{
  const MapConfig &cfg = params.cfg;
  const RaySample &ray = task.ray;
  const double length = ray.length();
  const VoxelKey end_key = keyForPoint(ray.end, cfg);
  detail::RegionCursor cursor(map);

  forEachVoxel(ray.origin, ray.end, cfg, [&](const VoxelKey &key, double t0, double t1) {
    ++tally.voxel_visits;
    Region *region = cursor.get(key.region);
    if (!region)
    {
      ++tally.unprefetched;
      return;
    }
    const std::size_t idx = localIndex(key, cfg.region_dim);
    const bool final_voxel = t1 >= 1.0 && key == end_key;

    if (!region->decay.empty())
    {
      const double path = (t1 - t0) * length;
      access.update(region->decay[idx].distance_sum, [path](double d) { return d + path; });
    }
    if (!(final_voxel && (ray.has_sample || task.continues)))
    {
      access.update(region->occupancy[idx], [&](float l) { return applyOccupancyUpdate(l, params.miss, cfg); });
    }
  });
}

/// Occupancy hit pass for one segment: hit, voxel mean and decay return count in the sample voxel.
template <typename Access>
void integrateOccupancyHit(const OccupancyMap &map, const SegmentTask &task, const KernelParams &params,
                           Access &access, KernelTally &tally)
{
  const RaySample &ray = task.ray;
  if (!ray.has_sample)
  {
    return;
  }
  const MapConfig &cfg = params.cfg;
  const VoxelKey key = keyForPoint(ray.end, cfg);
  Region *region = map.residentRegion(key.region);
  if (!region)
  {
    ++tally.unprefetched;
    return;
  }
  const std::size_t idx = localIndex(key, cfg.region_dim);
  access.update(region->occupancy[idx], [&](float l) { return applyOccupancyUpdate(l, params.hit, cfg); });
  if (!region->mean.empty())
  {
    const Eigen::Vector3d offset = detail::voxelOffset(ray.end, key, cfg);
    access.update(region->mean[idx], [&](const VoxelMean &m) { return updatePackedMean(m, offset); });
  }
  if (!region->decay.empty())
  {
    access.increment(region->decay[idx].hits);
  }
}

/// NDT phase 1: likelihood-scaled misses along one segment. The sample voxel is left for phase 2. Voxels holding
/// samples whose occupancy drops below the reset threshold are appended to @p reset_candidates.
template <typename Access>
void integrateNdtMissSegment(const OccupancyMap &map, const SegmentTask &task, const KernelParams &params,
                             Access &access, KernelTally &tally, std::vector<VoxelKey> &reset_candidates)
{
  const MapConfig &cfg = params.cfg;
  const RaySample &ray = task.ray;
  const VoxelKey end_key = keyForPoint(ray.end, cfg);
  detail::RegionCursor cursor(map);

  forEachVoxel(ray.origin, ray.end, cfg, [&](const VoxelKey &key, double, double t1) {
    ++tally.voxel_visits;
    const bool final_voxel = t1 >= 1.0 && key == end_key;
    if (final_voxel && (ray.has_sample || task.continues))
    {
      return;
    }
    Region *region = cursor.get(key.region);
    if (!region)
    {
      ++tally.unprefetched;
      return;
    }
    const std::size_t idx = localIndex(key, cfg.region_dim);
    // Gaussian state is only written in phase 2, so plain reads are race free here.
    const std::uint32_t count = region->mean[idx].count;
    const double scale = ndtMissScale(region->covariance[idx], count, ray.origin, ray.end, cfg);
    const double delta = scale * params.miss;
    const float updated =
      access.update(region->occupancy[idx], [&](float l) { return applyOccupancyUpdate(l, delta, cfg); });
    const bool counted_miss = !region->traversal.empty() && scale >= cfg.ndt_miss_check_threshold;
    if (counted_miss)
    {
      access.increment(region->traversal[idx].misses);
    }
    // Only voxels holding a Gaussian need a reset pass.
    if (count > 0 && static_cast<double>(updated) < cfg.ndt_reset_threshold)
    {
      reset_candidates.push_back(key);
    }
  });
}

/// NDT phase 2 for a single voxel owned exclusively by the caller: apply every sample that fell in it, in order.
template <typename SampleRange>
void integrateNdtHits(Region &region, const VoxelKey &key, const SampleRange &samples, const KernelParams &params)
{
  const MapConfig &cfg = params.cfg;
  const std::size_t idx = localIndex(key, cfg.region_dim);
  float &occupancy = region.occupancy[idx];
  VoxelMean &mean = region.mean[idx];
  NdtCovariance &cov = region.covariance[idx];
  TraversalVoxel *traversal = region.traversal.empty() ? nullptr : &region.traversal[idx];
  const Eigen::Vector3d voxel_min = voxelCenter(key, cfg) - Eigen::Vector3d::Constant(0.5 * cfg.voxel_size);

  for (const RaySample *sample : samples)
  {
    occupancy = applyOccupancyUpdate(occupancy, params.hit, cfg);
    if (mean.count < std::numeric_limits<std::uint32_t>::max())
    {
      ndtAddSample(cov, mean.count, sample->end);
      ++mean.count;
      mean.coord = packMean((ndtMean(cov) - voxel_min) / cfg.voxel_size);
    }
    if (traversal)
    {
      ndtTmCountsUpdate(*traversal, RayEvent::kHit, 1.0, cfg);
      intensityUpdate(*traversal, sample->intensity);
    }
  }
}

/// Endpoints of the TSDF band walk for a segment carrying a sample: from min(truncation, range) before the
/// sample to truncation past it.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> tsdfBand(const SegmentTask &task, double truncation)
{
  const Eigen::Vector3d dir = task.ray.end - task.ray.origin;
  const double seg_length = dir.norm();
  const Eigen::Vector3d unit = dir / seg_length;
  const double range = task.start_range + seg_length;
  const double behind = truncation < range ? truncation : range;
  return { task.ray.end - unit * behind, task.ray.end + unit * truncation };
}

/// Projective TSDF update around the sample of one segment. Distance and weight change together via one
/// 64-bit CAS.
template <typename Access>
void integrateTsdfSegment(const OccupancyMap &map, const SegmentTask &task, const KernelParams &params,
                          Access &access, KernelTally &tally)
{
  const MapConfig &cfg = params.cfg;
  const RaySample &ray = task.ray;
  const Eigen::Vector3d dir = ray.end - ray.origin;
  const double seg_length = dir.norm();
  if (!ray.has_sample || !(seg_length > 0.0))
  {
    return;
  }
  const Eigen::Vector3d unit = dir / seg_length;
  const Eigen::Vector3d sensor = ray.origin - unit * task.start_range;
  const double range = task.start_range + seg_length;
  const auto [band_start, band_end] = tsdfBand(task, cfg.tsdf_truncation);
  detail::RegionCursor cursor(map);

  forEachVoxel(band_start, band_end, cfg, [&](const VoxelKey &key, double, double) {
    ++tally.voxel_visits;
    const auto distance = tsdfProjectiveDistance(sensor, unit, range, voxelCenter(key, cfg), cfg.tsdf_truncation);
    if (!distance)
    {
      return;
    }
    Region *region = cursor.get(key.region);
    if (!region)
    {
      ++tally.unprefetched;
      return;
    }
    const std::size_t idx = localIndex(key, cfg.region_dim);
    const double observed = *distance;
    access.update(region->tsdf[idx],
                  [&](const TsdfVoxel &v) { return tsdfMerge(v, observed, 1.0, cfg.tsdf_max_weight); });
  });
}
}  // namespace occmap

#endif  // OCCMAP_KERNELS_H
