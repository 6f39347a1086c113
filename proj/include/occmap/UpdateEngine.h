#ifndef OCCMAP_UPDATEENGINE_H
#define OCCMAP_UPDATEENGINE_H

#include "Kernels.h"
#include "Layers.h"
#include "OccupancyMap.h"
#include "RaySample.h"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace occmap
{
enum class IntegratorMode
{
  kOccupancy,
  kNdtOm,
  kNdtTm,
  kDecay,
  kTsdf,
};

/// "occupancy", "ndt-om", "ndt-tm", "decay", "tsdf". Throws ConfigError for anything else.
IntegratorMode parseMode(std::string_view name);
std::string_view modeName(IntegratorMode mode);

/// Layers an integrator writes; submitBatch() refuses maps lacking any of them.
LayerSet requiredLayers(IntegratorMode mode);
/// Throws ConfigError naming the missing layers when @p map cannot host @p mode.
void requireLayers(const OccupancyMap &map, IntegratorMode mode);
/// Layers a map built for @p mode is created with (required plus the voxel mean where useful).
LayerSet defaultLayers(IntegratorMode mode);

enum class ExecutorKind
{
  kSequential,
  kParallel,
};

struct ExecutorOptions
{
  unsigned worker_count = 1;
  unsigned cas_retry_limit = 20;
  ExecutorKind kind = ExecutorKind::kParallel;
};

struct BatchStats
{
  std::uint64_t rays_in = 0;
  std::uint64_t rays_processed = 0;
  /// Rays rejected for non-finite coordinates.
  std::uint64_t rays_skipped = 0;
  std::uint64_t segments = 0;
  std::uint64_t voxel_visits = 0;
  std::uint64_t cas_retries = 0;
  std::uint64_t cas_failures = 0;
  /// Visits that found no prefetched region. Always zero unless region walking and voxel walking disagree.
  std::uint64_t unprefetched_visits = 0;
  double wall_time = 0.0;
  double rays_per_second = 0.0;

  void merge(const BatchStats &other);
  static std::string csvHeader();
  std::string csvRow() const;
};

/// Clip to max range and split into bounded segments. Non-finite rays are dropped and counted in @p skipped.
std::vector<SegmentTask> prepareSegments(std::span<const RaySample> rays, const MapConfig &cfg,
                                         std::uint64_t *skipped = nullptr);

/// Create every region the segments can touch for @p mode and mark them accessed. Returns the number of
/// regions created. After this call the region hash map stays untouched until the batch completes.
std::size_t prefetchRegions(OccupancyMap &map, std::span<const SegmentTask> segments, IntegratorMode mode);
std::size_t prefetchRegions(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode);

/// Integrate a batch: clip, segment, prefetch, then dispatch one task per segment. NDT modes run a miss
/// phase over all segments, a reset pass, then a hit phase with each sample voxel owned by one worker. Occupancy
/// and decay run a miss pass then a hit pass.
/// Throws ConfigError before touching the map if the integrator's layers are not enabled.
BatchStats submitBatch(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode,
                       const ExecutorOptions &opts = {});

/// Canonical single-threaded result: same pipeline, rays in input order, plain (non-atomic) writes.
BatchStats sequentialReference(OccupancyMap &map, std::span<const RaySample> rays, IntegratorMode mode);
}  // namespace occmap

#endif  // OCCMAP_UPDATEENGINE_H
