#ifndef OCCMAP_VOXELMEAN_H
#define OCCMAP_VOXELMEAN_H

#include <Eigen/Core>

#include <cstdint>
#include <limits>

namespace occmap
{
/// Sub-voxel mean position packed as 10 bits per axis (x in bits 0-9, y 10-19, z 20-29) plus the
/// number of samples contributing to it. Both words are updated together through one 64-bit CAS.
struct alignas(8) VoxelMean
{
  std::uint32_t coord = 0;
  std::uint32_t count = 0;

  friend bool operator==(const VoxelMean &, const VoxelMean &) = default;
};

constexpr unsigned kMeanBitsPerAxis = 10;
constexpr std::uint32_t kMeanAxisMask = (1u << kMeanBitsPerAxis) - 1u;
constexpr double kMeanQuantum = 1.0 / 1024.0;

/// Pack voxel-fraction offsets in [0, 1). Out of range components are clamped; debug builds count
/// those events (see packMeanClampEvents()).
std::uint32_t packMean(const Eigen::Vector3d &offset);
/// Decode to bucket midpoints (q + 0.5) / 1024.
Eigen::Vector3d unpackMean(std::uint32_t packed);

/// Incremental mean m' = m + (s - m) / (n + 1) on the decoded value. Saturates at the counter limit.
VoxelMean updatePackedMean(const VoxelMean &old, const Eigen::Vector3d &sample_offset);

/// Number of clamped pack requests seen since start up. Always zero in release builds.
std::uint64_t packMeanClampEvents();
}  // namespace occmap

#endif  // OCCMAP_VOXELMEAN_H
