#include "occmap/Occupancy.h"

#include <cmath>
#include <stdexcept>

namespace occmap
{
double probabilityToLogOdds(double p)
{
  if (!(p > 0.0 && p < 1.0))
  {
    throw std::domain_error("probability must lie in (0, 1)");
  }
  return std::log(p / (1.0 - p));
}


double logOddsToProbability(double l)
{
  return 1.0 / (1.0 + std::exp(-l));
}


double logOddsDelta(bool hit, const MapConfig &cfg)
{
  return hit ? hitDelta(cfg) : missDelta(cfg);
}


OccupancyState occupancyState(float log_odds, const VoxelMean *mean, const MapConfig &cfg)
{
  if (log_odds == 0.0f && (mean == nullptr || mean->count == 0))
  {
    return OccupancyState::kUnknown;
  }
  return static_cast<double>(log_odds) > probabilityToLogOdds(cfg.occupied_threshold) ? OccupancyState::kOccupied :
                                                                                         OccupancyState::kFree;
}


OccupancyState occupancyState(OccupancyMap &map, const VoxelKey &key)
{
  const VoxelRef ref = findVoxel(map, key);
  if (!ref || ref.region->occupancy.empty())
  {
    return OccupancyState::kUnknown;
  }
  const VoxelMean *mean = ref.region->mean.empty() ? nullptr : &ref.region->mean[ref.index];
  return occupancyState(ref.region->occupancy[ref.index], mean, map.config());
}


std::optional<double> decayRate(const DecayVoxel &voxel)
{
  if (voxel.distance_sum > 0.0)
  {
    return static_cast<double>(voxel.hits) / voxel.distance_sum;
  }
  return std::nullopt;
}


std::optional<float> occupancyAt(OccupancyMap &map, const VoxelKey &key)
{
  const VoxelRef ref = findVoxel(map, key);
  if (!ref || ref.region->occupancy.empty())
  {
    return std::nullopt;
  }
  return ref.region->occupancy[ref.index];
}


std::optional<VoxelMean> meanAt(OccupancyMap &map, const VoxelKey &key)
{
  const VoxelRef ref = findVoxel(map, key);
  if (!ref || ref.region->mean.empty())
  {
    return std::nullopt;
  }
  return ref.region->mean[ref.index];
}


std::optional<DecayVoxel> decayAt(OccupancyMap &map, const VoxelKey &key)
{
  const VoxelRef ref = findVoxel(map, key);
  if (!ref || ref.region->decay.empty())
  {
    return std::nullopt;
  }
  return ref.region->decay[ref.index];
}
}  // namespace occmap
