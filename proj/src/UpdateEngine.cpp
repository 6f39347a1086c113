#include "occmap/UpdateEngine.h"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <sstream>

namespace occmap
{
namespace
{
using Clock = std::chrono::steady_clock;

}  // namespace

void requireLayers(const OccupancyMap &map, IntegratorMode mode)
{
  const LayerSet required = requiredLayers(mode);
  if (!map.layers().containsAll(required))
  {
    std::string missing;
    for (Layer l : kAllLayers)
    {
      if (required.has(l) && !map.layers().has(l))
      {
        missing += (missing.empty() ? "" : ", ") + std::string(layerName(l));
      }
    }
    throw ConfigError("map lacks layers required by " + std::string(modeName(mode)) + ": " + missing);
  }
}

namespace
{

void mergeTally(BatchStats &stats, const KernelTally &tally)
{
  stats.cas_retries += tally.cas.retries;
  stats.cas_failures += tally.cas.failures;
  stats.voxel_visits += tally.voxel_visits;
  stats.unprefetched_visits += tally.unprefetched;
}

/// Run @p kernel over every segment either serially or across OpenMP workers.
template <typename Kernel>
void dispatchSegments(std::span<const SegmentTask> tasks, const ExecutorOptions &opts, bool parallel, BatchStats &stats,
                      Kernel &&kernel)
{
  if (!parallel)
  {
    KernelTally tally;
    PlainAccess access;
    for (const SegmentTask &task : tasks)
    {
      kernel(task, access, tally);
    }
    mergeTally(stats, tally);
    return;
  }

  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel num_threads(static_cast<int>(opts.worker_count))
  {
    KernelTally tally;
    AtomicAccess access(opts.cas_retry_limit, tally.cas);
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t i = 0; i < count; ++i)
    {
      kernel(tasks[static_cast<std::size_t>(i)], access, tally);
    }
#pragma omp critical(occmap_merge_tally)
    mergeTally(stats, tally);
  }
}

void runOccupancy(OccupancyMap &map, std::span<const SegmentTask> tasks, const KernelParams &params,
                  const ExecutorOptions &opts, bool parallel, BatchStats &stats)
{
  dispatchSegments(tasks, opts, parallel, stats, [&](const SegmentTask &task, auto &access, KernelTally &tally) {
    integrateOccupancyMisses(map, task, params, access, tally);
  });
  dispatchSegments(tasks, opts, parallel, stats, [&](const SegmentTask &task, auto &access, KernelTally &tally) {
    integrateOccupancyHit(map, task, params, access, tally);
  });
}

void runTsdf(OccupancyMap &map, std::span<const SegmentTask> tasks, const KernelParams &params,
             const ExecutorOptions &opts, bool parallel, BatchStats &stats)
{
  dispatchSegments(tasks, opts, parallel, stats, [&](const SegmentTask &task, auto &access, KernelTally &tally) {
    integrateTsdfSegment(map, task, params, access, tally);
  });
}

void runNdt(OccupancyMap &map, std::span<const SegmentTask> tasks, const KernelParams &params,
            const ExecutorOptions &opts, bool parallel, BatchStats &stats)
{
  const MapConfig &cfg = params.cfg;

  // Phase 1: misses, concurrent over segments.
  std::vector<VoxelKey> reset_candidates;
  if (!parallel)
  {
    KernelTally tally;
    PlainAccess access;
    for (const SegmentTask &task : tasks)
    {
      integrateNdtMissSegment(map, task, params, access, tally, reset_candidates);
    }
    mergeTally(stats, tally);
  }
  else
  {
    const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel num_threads(static_cast<int>(opts.worker_count))
    {
      KernelTally tally;
      AtomicAccess access(opts.cas_retry_limit, tally.cas);
      std::vector<VoxelKey> local_candidates;
#pragma omp for schedule(dynamic, 64) nowait
      for (std::int64_t i = 0; i < count; ++i)
      {
        integrateNdtMissSegment(map, tasks[static_cast<std::size_t>(i)], params, access, tally, local_candidates);
      }
#pragma omp critical(occmap_merge_tally)
      {
        mergeTally(stats, tally);
        reset_candidates.insert(reset_candidates.end(), local_candidates.begin(), local_candidates.end());
      }
    }
  }

  // Reset pass between phases (single writer).
  std::sort(reset_candidates.begin(), reset_candidates.end());
  reset_candidates.erase(std::unique(reset_candidates.begin(), reset_candidates.end()), reset_candidates.end());
  for (const VoxelKey &key : reset_candidates)
  {
    if (Region *region = map.residentRegion(key.region))
    {
      const std::size_t idx = localIndex(key, cfg.region_dim);
      maybeResetNdt(region->occupancy[idx], region->mean[idx], region->covariance[idx],
                    region->traversal.empty() ? nullptr : &region->traversal[idx], cfg);
    }
  }

  // Phase 2: bucket samples by voxel (sorted by key, ray order within a bucket), one owner per bucket.
  std::vector<std::pair<VoxelKey, const RaySample *>> samples;
  for (const SegmentTask &task : tasks)
  {
    if (task.ray.has_sample)
    {
      samples.emplace_back(keyForPoint(task.ray.end, cfg), &task.ray);
    }
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });

  std::vector<std::size_t> bucket_starts;
  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    if (i == 0 || samples[i].first != samples[i - 1].first)
    {
      bucket_starts.push_back(i);
    }
  }
  bucket_starts.push_back(samples.size());
  std::vector<const RaySample *> sample_ptrs(samples.size());
  std::transform(samples.begin(), samples.end(), sample_ptrs.begin(), [](const auto &s) { return s.second; });

  const auto bucket_count = static_cast<std::int64_t>(bucket_starts.size()) - 1;
  std::uint64_t unprefetched = 0;
  const auto apply_bucket = [&](std::int64_t b) -> bool {
    const std::size_t begin = bucket_starts[static_cast<std::size_t>(b)];
    const std::size_t end = bucket_starts[static_cast<std::size_t>(b) + 1];
    const VoxelKey &key = samples[begin].first;
    Region *region = map.residentRegion(key.region);
    if (!region)
    {
      return false;
    }
    integrateNdtHits(*region, key, std::span<const RaySample *const>(sample_ptrs.data() + begin, end - begin),
                     params);
    return true;
  };

  if (!parallel)
  {
    for (std::int64_t b = 0; b < bucket_count; ++b)
    {
      unprefetched += apply_bucket(b) ? 0u : 1u;
    }
  }
  else
  {
#pragma omp parallel for schedule(dynamic, 16) num_threads(static_cast<int>(opts.worker_count)) \
  reduction(+ : unprefetched)
    for (std::int64_t b = 0; b < bucket_count; ++b)
    {
      unprefetched += apply_bucket(b) ? 0u : 1u;
    }
  }
  stats.unprefetched_visits += unprefetched;
}

BatchStats runBatch(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode,
                    const ExecutorOptions &opts, bool parallel)
{
  requireLayers(map, mode);
  if (opts.worker_count < 1)
  {
    throw ConfigError("worker_count must be >= 1");
  }

  BatchStats stats;
  stats.rays_in = rays.size();
  const auto start = Clock::now();

  map.beginBatch();
  const std::vector<SegmentTask> tasks = prepareSegments(rays, map.config(), &stats.rays_skipped);
  stats.rays_processed = stats.rays_in - stats.rays_skipped;
  stats.segments = tasks.size();
  prefetchRegions(map, std::span<const SegmentTask>(tasks), mode);

  const KernelParams params(map.config());
  switch (mode)
  {
  case IntegratorMode::kOccupancy:
  case IntegratorMode::kDecay:
    runOccupancy(map, tasks, params, opts, parallel, stats);
    break;
  case IntegratorMode::kNdtOm:
  case IntegratorMode::kNdtTm:
    runNdt(map, tasks, params, opts, parallel, stats);
    break;
  case IntegratorMode::kTsdf:
    runTsdf(map, tasks, params, opts, parallel, stats);
    break;
  }

  stats.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  stats.rays_per_second = stats.wall_time > 0.0 ? static_cast<double>(stats.rays_processed) / stats.wall_time : 0.0;
  return stats;
}
}  // namespace

IntegratorMode parseMode(std::string_view name)
{
  if (name == "occupancy")
  {
    return IntegratorMode::kOccupancy;
  }
  if (name == "ndt-om")
  {
    return IntegratorMode::kNdtOm;
  }
  if (name == "ndt-tm")
  {
    return IntegratorMode::kNdtTm;
  }
  if (name == "decay")
  {
    return IntegratorMode::kDecay;
  }
  if (name == "tsdf")
  {
    return IntegratorMode::kTsdf;
  }
  throw ConfigError("unknown integrator mode '" + std::string(name) + "'");
}


std::string_view modeName(IntegratorMode mode)
{
  switch (mode)
  {
  case IntegratorMode::kOccupancy:
    return "occupancy";
  case IntegratorMode::kNdtOm:
    return "ndt-om";
  case IntegratorMode::kNdtTm:
    return "ndt-tm";
  case IntegratorMode::kDecay:
    return "decay";
  case IntegratorMode::kTsdf:
    return "tsdf";
  }
  return "unknown";
}


LayerSet requiredLayers(IntegratorMode mode)
{
  switch (mode)
  {
  case IntegratorMode::kOccupancy:
    return { Layer::kOccupancy };
  case IntegratorMode::kDecay:
    return { Layer::kOccupancy, Layer::kDecay };
  case IntegratorMode::kNdtOm:
    return { Layer::kOccupancy, Layer::kMean, Layer::kCovariance };
  case IntegratorMode::kNdtTm:
    return { Layer::kOccupancy, Layer::kMean, Layer::kCovariance, Layer::kTraversal };
  case IntegratorMode::kTsdf:
    return { Layer::kTsdf };
  }
  return {};
}


LayerSet defaultLayers(IntegratorMode mode)
{
  LayerSet layers = requiredLayers(mode);
  if (mode == IntegratorMode::kOccupancy || mode == IntegratorMode::kDecay)
  {
    layers.add(Layer::kMean);
  }
  return layers;
}


void BatchStats::merge(const BatchStats &other)
{
  rays_in += other.rays_in;
  rays_processed += other.rays_processed;
  rays_skipped += other.rays_skipped;
  segments += other.segments;
  voxel_visits += other.voxel_visits;
  cas_retries += other.cas_retries;
  cas_failures += other.cas_failures;
  unprefetched_visits += other.unprefetched_visits;
  wall_time += other.wall_time;
  rays_per_second = wall_time > 0.0 ? static_cast<double>(rays_processed) / wall_time : 0.0;
}


std::string BatchStats::csvHeader()
{
  return "rays_in,rays_processed,rays_skipped,segments,voxel_visits,cas_retries,cas_failures,wall_time_s,"
         "rays_per_second";
}


std::string BatchStats::csvRow() const
{
  std::ostringstream out;
  out << rays_in << ',' << rays_processed << ',' << rays_skipped << ',' << segments << ',' << voxel_visits << ','
      << cas_retries << ',' << cas_failures << ',' << wall_time << ',' << rays_per_second;
  return out.str();
}


std::vector<SegmentTask> prepareSegments(std::span<const RaySample> rays, const MapConfig &cfg,
                                         std::uint64_t *skipped)
{
  std::vector<SegmentTask> tasks;
  tasks.reserve(rays.size());
  std::uint64_t rejected = 0;
  for (std::size_t i = 0; i < rays.size(); ++i)
  {
    const RaySample &ray = rays[i];
    if (!ray.isFinite())
    {
      ++rejected;
      continue;
    }
    const RaySample clipped = clipRay(ray, cfg);
    const double length = clipped.length();
    const std::size_t pieces = segmentCount(length, cfg.segment_length);
    if (pieces == 1)
    {
      tasks.push_back(SegmentTask{ clipped, static_cast<std::uint32_t>(i), 0.0, false });
      continue;
    }
    double start_range = 0.0;
    for (const RaySample &seg : segmentRay(clipped, cfg))
    {
      tasks.push_back(SegmentTask{ seg, static_cast<std::uint32_t>(i), start_range, false });
      start_range += seg.length();
    }
    for (std::size_t k = tasks.size() - pieces; k + 1 < tasks.size(); ++k)
    {
      tasks[k].continues = true;
    }
  }
  if (skipped)
  {
    *skipped = rejected;
  }
  return tasks;
}


std::size_t prefetchRegions(OccupancyMap &map, std::span<const SegmentTask> segments, IntegratorMode mode)
{
  const MapConfig &cfg = map.config();
  const std::size_t before = map.regionCount();
  RegionCoord last{ INT64_MIN, INT64_MIN, INT64_MIN };
  const auto touch = [&](const Coord3 &r, double, double) {
    if (r != last)
    {
      map.getOrCreateRegion(r);
      last = r;
    }
  };

  for (const SegmentTask &task : segments)
  {
    Eigen::Vector3d from = task.ray.origin;
    Eigen::Vector3d to = task.ray.end;
    if (mode == IntegratorMode::kTsdf)
    {
      if (!task.ray.has_sample || !(task.ray.length() > 0.0))
      {
        continue;
      }
      std::tie(from, to) = tsdfBand(task, cfg.tsdf_truncation);
    }
    detail::walkCells(from, to, keyForPoint(from, cfg).region, keyForPoint(to, cfg).region, cfg.voxel_size,
                      cfg.region_dim, touch);
  }
  return map.regionCount() - before;
}


std::size_t prefetchRegions(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode)
{
  const std::vector<SegmentTask> tasks = prepareSegments(rays, map.config());
  return prefetchRegions(map, std::span<const SegmentTask>(tasks), mode);
}


BatchStats submitBatch(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode,
                       const ExecutorOptions &opts)
{
  if (opts.kind == ExecutorKind::kSequential)
  {
    if (opts.worker_count != 1)
    {
      throw ConfigError("the sequential executor runs with exactly one worker");
    }
    return runBatch(map, rays, mode, opts, false);
  }
  return runBatch(map, rays, mode, opts, true);
}


BatchStats sequentialReference(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode)
{
  ExecutorOptions opts;
  opts.kind = ExecutorKind::kSequential;
  return runBatch(map, rays, mode, opts, false);
}
}  // namespace occmap
