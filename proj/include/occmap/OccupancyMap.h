#ifndef OCCMAP_OCCUPANCYMAP_H
#define OCCMAP_OCCUPANCYMAP_H

#include "Key.h"
#include "Layers.h"
#include "MapConfig.h"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace occmap
{
/// Dense block of region_dim^3 voxels. Each enabled layer is one contiguous buffer; disabled layers are empty.
struct Region
{
  RegionCoord coord;
  std::vector<float> occupancy;
  std::vector<VoxelMean> mean;
  std::vector<NdtCovariance> covariance;
  std::vector<DecayVoxel> decay;
  std::vector<TsdfVoxel> tsdf;
  std::vector<TraversalVoxel> traversal;
  /// Batch counter value at the last prefetch that touched this region.
  std::uint64_t last_access = 0;

  Region(const RegionCoord &coord, LayerSet layers, std::size_t voxel_count);

  /// Raw bytes of a layer buffer (empty when the layer is disabled).
  std::span<std::byte> layerBytes(Layer layer);
  std::span<const std::byte> layerBytes(Layer layer) const;

  /// Bit-wise equality of every layer buffer.
  bool sameContent(const Region &other) const;
};

/// Region-hashed voxel store with O(1) voxel addressing.
///
/// Regions are created on demand. Hash map mutation (creation, eviction, reload) must happen from a single
/// control flow; voxel payloads inside existing regions may be updated concurrently. Regions evicted by
/// evictStaleRegions() are written to a spill directory and reloaded transparently by findRegion() and
/// getOrCreateRegion().
class OccupancyMap
{
public:
  OccupancyMap(const MapConfig &config, LayerSet layers);
  ~OccupancyMap();

  OccupancyMap(const OccupancyMap &) = delete;
  OccupancyMap &operator=(const OccupancyMap &) = delete;
  OccupancyMap(OccupancyMap &&) noexcept;
  OccupancyMap &operator=(OccupancyMap &&) noexcept;

  const MapConfig &config() const { return config_; }
  LayerSet layers() const { return layers_; }

  /// Existing region (reloaded if evicted) or a fresh one initialised to unknown. Marks it accessed.
  Region &getOrCreateRegion(const RegionCoord &coord);
  /// Existing region, reloading it if evicted; nullptr when the region has never been created.
  Region *findRegion(const RegionCoord &coord);
  /// Resident region only. Safe to call concurrently with voxel updates.
  Region *residentRegion(const RegionCoord &coord) const;

  /// Total regions known to the map, resident or spilled.
  std::size_t regionCount() const { return regions_.size() + spilled_.size(); }
  std::size_t residentRegionCount() const { return regions_.size(); }
  std::size_t spilledRegionCount() const { return spilled_.size(); }

  /// Advance the batch counter used for region ageing.
  std::uint64_t beginBatch() { return ++batch_; }
  std::uint64_t currentBatch() const { return batch_; }

  /// Spill every region whose last access is at least @p age batches old. Returns the number evicted.
  /// Regions whose spill write fails stay resident and a warning is printed.
  std::size_t evictStaleRegions(std::uint64_t age);
  /// Reload every spilled region.
  void restoreAll();

  /// Directory used for spilled regions. Defaults to a private temporary directory removed with the map.
  void setSpillDirectory(const std::filesystem::path &dir);
  const std::filesystem::path &spillDirectory();

  /// Resident region coordinates in ascending order.
  std::vector<RegionCoord> sortedRegionCoords() const;

  template <typename Fn>
  void forEachRegion(Fn &&fn) const
  {
    for (const RegionCoord &c : sortedRegionCoords())
    {
      fn(*regions_.at(c));
    }
  }

  /// Inserts a region built elsewhere (used by map loading). Replaces any existing region.
  void insertRegion(std::unique_ptr<Region> region);

private:
  std::filesystem::path spillPath(const RegionCoord &coord);
  Region *reload(const RegionCoord &coord);
  void releaseSpillDirectory();

  MapConfig config_;
  LayerSet layers_;
  std::unordered_map<RegionCoord, std::unique_ptr<Region>, Coord3Hash> regions_;
  std::unordered_set<RegionCoord, Coord3Hash> spilled_;
  std::filesystem::path spill_dir_;
  bool owns_spill_dir_ = false;
  std::uint64_t batch_ = 0;
};

/// Voxel buffer index plus owning region for @p key, or nullptr region when not resident.
struct VoxelRef
{
  Region *region = nullptr;
  std::size_t index = 0;

  explicit operator bool() const { return region != nullptr; }
};

inline VoxelRef residentVoxel(const OccupancyMap &map, const VoxelKey &key)
{
  return VoxelRef{ map.residentRegion(key.region), localIndex(key, map.config().region_dim) };
}

inline VoxelRef findVoxel(OccupancyMap &map, const VoxelKey &key)
{
  return VoxelRef{ map.findRegion(key.region), localIndex(key, map.config().region_dim) };
}
}  // namespace occmap

#endif  // OCCMAP_OCCUPANCYMAP_H
