#ifndef OCCMAP_MAPIO_H
#define OCCMAP_MAPIO_H

#include "OccupancyMap.h"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace occmap
{
/// Map file layout (little-endian):
///   "OHMR1" | f64 voxel_size | u32 region_dim | u8 layer_count | u8 layer_id[layer_count] | u64 region_count
///   then per region, in ascending coordinate order: i64 x, i64 y, i64 z | raw buffer of each layer in id order.
void saveMap(OccupancyMap &map, std::ostream &out);
void saveMap(OccupancyMap &map, const std::filesystem::path &path);

/// Loads a map. Geometry (voxel size, region size) and layers come from the file; every other parameter is
/// taken from @p base.
OccupancyMap loadMap(std::istream &in, const MapConfig &base = {});
OccupancyMap loadMap(const std::filesystem::path &path, const MapConfig &base = {});

/// Serialised region record (coordinate + layer buffers) as used in map files.
std::vector<std::byte> encodeRegion(const Region &region, LayerSet layers);
std::unique_ptr<Region> decodeRegion(std::span<const std::byte> bytes, LayerSet layers, std::size_t voxel_count);

/// Lossless zlib wrappers used for the spill store.
std::vector<std::byte> compressBytes(std::span<const std::byte> raw);
std::vector<std::byte> decompressBytes(std::span<const std::byte> packed, std::size_t raw_size);
}  // namespace occmap

#endif  // OCCMAP_MAPIO_H
