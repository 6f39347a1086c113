#include "occmap/VoxelMean.h"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace occmap
{
namespace
{
std::atomic<std::uint64_t> g_clamp_events{ 0 };

std::uint32_t quantise(double value)
{
  double scaled = std::floor(value * 1024.0);
  if (!(scaled >= 0.0 && scaled <= 1023.0))
  {
#ifndef NDEBUG
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
#endif
    scaled = std::isnan(scaled) ? 0.0 : std::clamp(scaled, 0.0, 1023.0);
  }
  return static_cast<std::uint32_t>(scaled);
}
}  // namespace

std::uint32_t packMean(const Eigen::Vector3d &offset)
{
  return quantise(offset.x()) | (quantise(offset.y()) << kMeanBitsPerAxis) |
         (quantise(offset.z()) << (2 * kMeanBitsPerAxis));
}


Eigen::Vector3d unpackMean(std::uint32_t packed)
{
  const auto axis = [packed](unsigned shift) {
    return (static_cast<double>((packed >> shift) & kMeanAxisMask) + 0.5) * kMeanQuantum;
  };
  return Eigen::Vector3d(axis(0), axis(kMeanBitsPerAxis), axis(2 * kMeanBitsPerAxis));
}


VoxelMean updatePackedMean(const VoxelMean &old, const Eigen::Vector3d &sample_offset)
{
  if (old.count == std::numeric_limits<std::uint32_t>::max())
  {
    return old;
  }
  VoxelMean updated;
  if (old.count == 0)
  {
    updated.coord = packMean(sample_offset);
  }
  else
  {
    const Eigen::Vector3d mean = unpackMean(old.coord);
    updated.coord = packMean(mean + (sample_offset - mean) / (static_cast<double>(old.count) + 1.0));
  }
  updated.count = old.count + 1;
  return updated;
}


std::uint64_t packMeanClampEvents()
{
  return g_clamp_events.load(std::memory_order_relaxed);
}
}  // namespace occmap
