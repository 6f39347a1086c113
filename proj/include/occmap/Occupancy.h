#ifndef OCCMAP_OCCUPANCY_H
#define OCCMAP_OCCUPANCY_H

#include "Layers.h"
#include "MapConfig.h"
#include "OccupancyMap.h"

#include <optional>

namespace occmap
{
enum class OccupancyState
{
  kUnknown,
  kFree,
  kOccupied,
};

/// log(p / (1 - p)). Throws std::domain_error unless 0 < p < 1.
double probabilityToLogOdds(double p);
double logOddsToProbability(double l);

/// Log-odds increment for a hit or a miss under the configured sensor model.
inline double hitDelta(const MapConfig &cfg)
{
  return probabilityToLogOdds(cfg.hit_probability);
}
inline double missDelta(const MapConfig &cfg)
{
  return probabilityToLogOdds(cfg.miss_probability);
}
double logOddsDelta(bool hit, const MapConfig &cfg);

/// l' = clamp(l + delta, clamp_min, clamp_max).
inline float applyOccupancyUpdate(float log_odds, double delta, const MapConfig &cfg)
{
  double value = static_cast<double>(log_odds) + delta;
  value = value < cfg.clamp_min ? cfg.clamp_min : (value > cfg.clamp_max ? cfg.clamp_max : value);
  return static_cast<float>(value);
}

/// Classify a voxel. A voxel is unknown only if it was never updated: exact zero log-odds and, when the mean
/// layer exists, a zero sample count.
OccupancyState occupancyState(float log_odds, const VoxelMean *mean, const MapConfig &cfg);
OccupancyState occupancyState(OccupancyMap &map, const VoxelKey &key);

/// Reflection rate H / sum(d) in returns per metre; nullopt when no ray has crossed the voxel.
std::optional<double> decayRate(const DecayVoxel &voxel);

/// Convenience lookups; nullopt when the region does not exist or the layer is disabled.
std::optional<float> occupancyAt(OccupancyMap &map, const VoxelKey &key);
std::optional<VoxelMean> meanAt(OccupancyMap &map, const VoxelKey &key);
std::optional<DecayVoxel> decayAt(OccupancyMap &map, const VoxelKey &key);
}  // namespace occmap

#endif  // OCCMAP_OCCUPANCY_H
