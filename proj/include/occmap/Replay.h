#ifndef OCCMAP_REPLAY_H
#define OCCMAP_REPLAY_H

#include "OccupancyMap.h"
#include "RaySample.h"
#include "UpdateEngine.h"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace occmap
{
struct ReplayOptions
{
  IntegratorMode mode = IntegratorMode::kOccupancy;
  ExecutorOptions executor;
  /// Replay at the file's timestamp rate (dropping batches the engine cannot absorb) instead of as fast as
  /// possible.
  bool online = false;
  /// Online playback speed relative to the recorded timestamps.
  double speed = 1.0;
  /// Seconds of sensor time integrated per submitted batch.
  double batch_duration = 0.1;
  /// Online hand-off queue capacity in batches. A batch arriving at a full queue is dropped.
  std::size_t queue_capacity = 4;
};

/// One row per second of sensor time.
struct ReplaySample
{
  double time = 0.0;
  std::uint64_t rays_in = 0;
  std::uint64_t rays_processed = 0;
  std::uint64_t rays_dropped = 0;
  double integration_time = 0.0;
  double rays_per_second = 0.0;
};

struct ReplaySummary
{
  std::string mode;
  unsigned workers = 1;
  bool online = false;
  std::uint64_t rays_in = 0;
  std::uint64_t rays_processed = 0;
  std::uint64_t rays_dropped = 0;
  double drop_percent = 0.0;
  std::uint64_t cas_retries = 0;
  std::uint64_t cas_failures = 0;
  /// Integration time summed over batches (excludes file I/O and queue waits).
  double integration_time = 0.0;
  double wall_time = 0.0;
  /// rays_processed / integration_time.
  double mean_rays_per_second = 0.0;

  static std::string csvHeader();
  std::string csvRow() const;
};

struct ReplayResult
{
  ReplaySummary summary;
  std::vector<ReplaySample> series;
};

/// Split rays into consecutive batches of `batch_duration` seconds of sensor time.
std::vector<std::span<const RaySample>> splitBatches(std::span<const RaySample> rays, double batch_duration);

ReplayResult replay(OccupancyMap &map, std::span<const RaySample> rays, const ReplayOptions &opts);

std::string seriesCsvHeader();
std::string seriesCsvRow(const ReplaySample &sample);
}  // namespace occmap

#endif  // OCCMAP_REPLAY_H
