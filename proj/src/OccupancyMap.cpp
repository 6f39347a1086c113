#include "occmap/OccupancyMap.h"

#include "occmap/MapIO.h"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <system_error>

#include <unistd.h>

namespace occmap
{
namespace
{
template <typename T>
std::span<std::byte> bytesOf(std::vector<T> &v)
{
  return std::as_writable_bytes(std::span<T>(v));
}

template <typename T>
std::span<const std::byte> bytesOf(const std::vector<T> &v)
{
  return std::as_bytes(std::span<const T>(v));
}

std::atomic<unsigned> g_spill_dir_counter{ 0 };

// Spill files are zlib payloads prefixed with the raw size.
void writeSpillFile(const std::filesystem::path &path, std::span<const std::byte> raw)
{
  const std::vector<std::byte> packed = compressBytes(raw);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::uint64_t raw_size = raw.size();
  out.write(reinterpret_cast<const char *>(&raw_size), sizeof(raw_size));
  out.write(reinterpret_cast<const char *>(packed.data()), static_cast<std::streamsize>(packed.size()));
  out.flush();
  if (!out)
  {
    throw IoError("failed to write spill file " + path.string());
  }
}

std::vector<std::byte> readSpillFile(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  std::uint64_t raw_size = 0;
  in.read(reinterpret_cast<char *>(&raw_size), sizeof(raw_size));
  if (!in)
  {
    throw IoError("failed to read spill file " + path.string());
  }
  const auto packed_size = std::filesystem::file_size(path) - sizeof(raw_size);
  std::vector<std::byte> packed(packed_size);
  in.read(reinterpret_cast<char *>(packed.data()), static_cast<std::streamsize>(packed_size));
  if (!in)
  {
    throw IoError("truncated spill file " + path.string());
  }
  return decompressBytes(packed, raw_size);
}
}  // namespace

Region::Region(const RegionCoord &coord, LayerSet layers, std::size_t voxel_count)
  : coord(coord)
{
  if (layers.has(Layer::kOccupancy))
  {
    occupancy.assign(voxel_count, 0.0f);
  }
  if (layers.has(Layer::kMean))
  {
    mean.assign(voxel_count, VoxelMean{});
  }
  if (layers.has(Layer::kCovariance))
  {
    covariance.assign(voxel_count, NdtCovariance{});
  }
  if (layers.has(Layer::kDecay))
  {
    decay.assign(voxel_count, DecayVoxel{});
  }
  if (layers.has(Layer::kTsdf))
  {
    tsdf.assign(voxel_count, TsdfVoxel{});
  }
  if (layers.has(Layer::kTraversal))
  {
    traversal.assign(voxel_count, TraversalVoxel{});
  }
}


std::span<std::byte> Region::layerBytes(Layer layer)
{
  switch (layer)
  {
  case Layer::kOccupancy:
    return bytesOf(occupancy);
  case Layer::kMean:
    return bytesOf(mean);
  case Layer::kCovariance:
    return bytesOf(covariance);
  case Layer::kDecay:
    return bytesOf(decay);
  case Layer::kTsdf:
    return bytesOf(tsdf);
  case Layer::kTraversal:
    return bytesOf(traversal);
  }
  return {};
}


std::span<const std::byte> Region::layerBytes(Layer layer) const
{
  return const_cast<Region *>(this)->layerBytes(layer);
}


bool Region::sameContent(const Region &other) const
{
  if (coord != other.coord)
  {
    return false;
  }
  for (Layer layer : kAllLayers)
  {
    const auto a = layerBytes(layer);
    const auto b = other.layerBytes(layer);
    if (a.size() != b.size() || (!a.empty() && std::memcmp(a.data(), b.data(), a.size()) != 0))
    {
      return false;
    }
  }
  return true;
}


std::string_view layerName(Layer layer)
{
  switch (layer)
  {
  case Layer::kOccupancy:
    return "occupancy";
  case Layer::kMean:
    return "mean";
  case Layer::kCovariance:
    return "covariance";
  case Layer::kDecay:
    return "decay";
  case Layer::kTsdf:
    return "tsdf";
  case Layer::kTraversal:
    return "traversal";
  }
  return "unknown";
}


OccupancyMap::OccupancyMap(const MapConfig &config, LayerSet layers)
  : config_(config)
  , layers_(layers)
{
  config_.validate();
}


OccupancyMap::~OccupancyMap()
{
  releaseSpillDirectory();
}


void OccupancyMap::releaseSpillDirectory()
{
  if (owns_spill_dir_ && !spill_dir_.empty())
  {
    std::error_code ec;
    std::filesystem::remove_all(spill_dir_, ec);
  }
  owns_spill_dir_ = false;
  spill_dir_.clear();
}


OccupancyMap::OccupancyMap(OccupancyMap &&other) noexcept
  : config_(other.config_)
  , layers_(other.layers_)
  , regions_(std::move(other.regions_))
  , spilled_(std::move(other.spilled_))
  , spill_dir_(std::move(other.spill_dir_))
  , owns_spill_dir_(other.owns_spill_dir_)
  , batch_(other.batch_)
{
  other.owns_spill_dir_ = false;
  other.spill_dir_.clear();
}


OccupancyMap &OccupancyMap::operator=(OccupancyMap &&other) noexcept
{
  if (this != &other)
  {
    releaseSpillDirectory();
    config_ = other.config_;
    layers_ = other.layers_;
    regions_ = std::move(other.regions_);
    spilled_ = std::move(other.spilled_);
    spill_dir_ = std::move(other.spill_dir_);
    owns_spill_dir_ = other.owns_spill_dir_;
    batch_ = other.batch_;
    other.owns_spill_dir_ = false;
    other.spill_dir_.clear();
  }
  return *this;
}


Region &OccupancyMap::getOrCreateRegion(const RegionCoord &coord)
{
  Region *region = findRegion(coord);
  if (!region)
  {
    auto created = std::make_unique<Region>(coord, layers_, config_.voxelsPerRegion());
    region = created.get();
    regions_.emplace(coord, std::move(created));
  }
  region->last_access = batch_;
  return *region;
}


Region *OccupancyMap::findRegion(const RegionCoord &coord)
{
  if (auto it = regions_.find(coord); it != regions_.end())
  {
    return it->second.get();
  }
  if (spilled_.contains(coord))
  {
    return reload(coord);
  }
  return nullptr;
}


Region *OccupancyMap::residentRegion(const RegionCoord &coord) const
{
  auto it = regions_.find(coord);
  return it != regions_.end() ? it->second.get() : nullptr;
}


std::size_t OccupancyMap::evictStaleRegions(std::uint64_t age)
{
  std::vector<RegionCoord> stale;
  for (const auto &[coord, region] : regions_)
  {
    if (batch_ - region->last_access >= age)
    {
      stale.push_back(coord);
    }
  }
  std::sort(stale.begin(), stale.end());

  std::size_t evicted = 0;
  for (const RegionCoord &coord : stale)
  {
    auto it = regions_.find(coord);
    try
    {
      writeSpillFile(spillPath(coord), encodeRegion(*it->second, layers_));
    }
    catch (const std::exception &e)
    {
      std::cerr << "warning: region (" << coord.x << ',' << coord.y << ',' << coord.z
                << ") kept in memory: " << e.what() << '\n';
      continue;
    }
    regions_.erase(it);
    spilled_.insert(coord);
    ++evicted;
  }
  return evicted;
}


void OccupancyMap::restoreAll()
{
  std::vector<RegionCoord> coords(spilled_.begin(), spilled_.end());
  std::sort(coords.begin(), coords.end());
  for (const RegionCoord &c : coords)
  {
    reload(c);
  }
}


Region *OccupancyMap::reload(const RegionCoord &coord)
{
  const std::filesystem::path path = spillPath(coord);
  std::vector<std::byte> raw = readSpillFile(path);
  std::unique_ptr<Region> region = decodeRegion(raw, layers_, config_.voxelsPerRegion());
  region->last_access = batch_;
  Region *ptr = region.get();
  regions_[coord] = std::move(region);
  spilled_.erase(coord);
  std::error_code ec;
  std::filesystem::remove(path, ec);
  return ptr;
}


void OccupancyMap::setSpillDirectory(const std::filesystem::path &dir)
{
  if (!spilled_.empty())
  {
    throw ConfigError("cannot change the spill directory while regions are spilled");
  }
  releaseSpillDirectory();
  spill_dir_ = dir;
}


const std::filesystem::path &OccupancyMap::spillDirectory()
{
  if (spill_dir_.empty())
  {
    spill_dir_ = std::filesystem::temp_directory_path() /
                 ("occmap-spill-" + std::to_string(::getpid()) + "-" + std::to_string(g_spill_dir_counter++));
    owns_spill_dir_ = true;
  }
  return spill_dir_;
}


std::filesystem::path OccupancyMap::spillPath(const RegionCoord &coord)
{
  const std::filesystem::path &dir = spillDirectory();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return dir / ("region_" + std::to_string(coord.x) + "_" + std::to_string(coord.y) + "_" + std::to_string(coord.z) +
                ".bin");
}


std::vector<RegionCoord> OccupancyMap::sortedRegionCoords() const
{
  std::vector<RegionCoord> coords;
  coords.reserve(regions_.size());
  for (const auto &entry : regions_)
  {
    coords.push_back(entry.first);
  }
  std::sort(coords.begin(), coords.end());
  return coords;
}


void OccupancyMap::insertRegion(std::unique_ptr<Region> region)
{
  const RegionCoord coord = region->coord;
  spilled_.erase(coord);
  regions_[coord] = std::move(region);
}
}  // namespace occmap
