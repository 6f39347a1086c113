#include "occmap/MapIO.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace occmap
{
static_assert(std::endian::native == std::endian::little, "map files are written in host order; little-endian only");

namespace
{
constexpr std::array<char, 5> kMapMagic = { 'O', 'H', 'M', 'R', '1' };

template <typename T>
void writePod(std::ostream &out, const T &value)
{
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T readPod(std::istream &in)
{
  T value{};
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in)
  {
    throw IoError("unexpected end of map data");
  }
  return value;
}

std::vector<Layer> enabledLayers(LayerSet layers)
{
  std::vector<Layer> out;
  for (Layer l : kAllLayers)
  {
    if (layers.has(l))
    {
      out.push_back(l);
    }
  }
  return out;
}

void writeRegion(std::ostream &out, const Region &region, LayerSet layers)
{
  writePod(out, region.coord.x);
  writePod(out, region.coord.y);
  writePod(out, region.coord.z);
  for (Layer l : enabledLayers(layers))
  {
    const auto bytes = region.layerBytes(l);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

std::unique_ptr<Region> readRegion(std::istream &in, LayerSet layers, std::size_t voxel_count)
{
  RegionCoord coord;
  coord.x = readPod<std::int64_t>(in);
  coord.y = readPod<std::int64_t>(in);
  coord.z = readPod<std::int64_t>(in);
  auto region = std::make_unique<Region>(coord, layers, voxel_count);
  for (Layer l : enabledLayers(layers))
  {
    auto bytes = region->layerBytes(l);
    in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in)
    {
      throw IoError("truncated region layer buffer");
    }
  }
  return region;
}

// Minimal streambuf over a byte span so the region codec can share the stream path.
class SpanBuf : public std::streambuf
{
public:
  explicit SpanBuf(std::span<const std::byte> bytes)
  {
    char *begin = const_cast<char *>(reinterpret_cast<const char *>(bytes.data()));
    setg(begin, begin, begin + bytes.size());
  }
};

class VectorBuf : public std::streambuf
{
public:
  std::vector<std::byte> bytes;

protected:
  std::streamsize xsputn(const char *s, std::streamsize n) override
  {
    const auto *b = reinterpret_cast<const std::byte *>(s);
    bytes.insert(bytes.end(), b, b + n);
    return n;
  }
  int_type overflow(int_type ch) override
  {
    if (!traits_type::eq_int_type(ch, traits_type::eof()))
    {
      bytes.push_back(static_cast<std::byte>(ch));
    }
    return ch;
  }
};
}  // namespace

void saveMap(OccupancyMap &map, std::ostream &out)
{
  map.restoreAll();
  const MapConfig &cfg = map.config();
  out.write(kMapMagic.data(), kMapMagic.size());
  writePod(out, cfg.voxel_size);
  writePod(out, static_cast<std::uint32_t>(cfg.region_dim));
  const std::vector<Layer> layers = enabledLayers(map.layers());
  writePod(out, static_cast<std::uint8_t>(layers.size()));
  for (Layer l : layers)
  {
    writePod(out, static_cast<std::uint8_t>(l));
  }
  writePod(out, static_cast<std::uint64_t>(map.residentRegionCount()));
  map.forEachRegion([&](const Region &region) { writeRegion(out, region, map.layers()); });
  if (!out)
  {
    throw IoError("failed writing map data");
  }
}


void saveMap(OccupancyMap &map, const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  saveMap(map, out);
  out.flush();
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}


OccupancyMap loadMap(std::istream &in, const MapConfig &base)
{
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMapMagic)
  {
    throw IoError("not a map file (bad magic)");
  }
  MapConfig cfg = base;
  cfg.voxel_size = readPod<double>(in);
  cfg.region_dim = static_cast<int>(readPod<std::uint32_t>(in));
  // Keep derived constraints satisfiable when the file geometry differs from the base config.
  cfg.tsdf_truncation = std::max(cfg.tsdf_truncation, cfg.voxel_size);
  cfg.segment_length = std::max(cfg.segment_length, 2.0 * cfg.voxel_size);
  LayerSet layers;
  const auto layer_count = readPod<std::uint8_t>(in);
  for (unsigned i = 0; i < layer_count; ++i)
  {
    const auto id = readPod<std::uint8_t>(in);
    if (id >= kAllLayers.size())
    {
      throw IoError("unknown layer id in map file");
    }
    layers.add(static_cast<Layer>(id));
  }
  const auto region_count = readPod<std::uint64_t>(in);

  OccupancyMap map(cfg, layers);
  for (std::uint64_t i = 0; i < region_count; ++i)
  {
    map.insertRegion(readRegion(in, layers, cfg.voxelsPerRegion()));
  }
  return map;
}


OccupancyMap loadMap(const std::filesystem::path &path, const MapConfig &base)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open " + path.string());
  }
  return loadMap(in, base);
}


std::vector<std::byte> encodeRegion(const Region &region, LayerSet layers)
{
  VectorBuf buf;
  std::ostream out(&buf);
  writeRegion(out, region, layers);
  return std::move(buf.bytes);
}


std::unique_ptr<Region> decodeRegion(std::span<const std::byte> bytes, LayerSet layers, std::size_t voxel_count)
{
  SpanBuf buf(bytes);
  std::istream in(&buf);
  return readRegion(in, layers, voxel_count);
}


std::vector<std::byte> compressBytes(std::span<const std::byte> raw)
{
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::byte> packed(packed_size);
  const int rc = compress2(reinterpret_cast<Bytef *>(packed.data()), &packed_size,
                           reinterpret_cast<const Bytef *>(raw.data()), static_cast<uLong>(raw.size()), Z_BEST_SPEED);
  if (rc != Z_OK)
  {
    throw IoError("region compression failed");
  }
  packed.resize(packed_size);
  return packed;
}


std::vector<std::byte> decompressBytes(std::span<const std::byte> packed, std::size_t raw_size)
{
  std::vector<std::byte> raw(raw_size);
  uLongf out_size = static_cast<uLongf>(raw_size);
  const int rc = uncompress(reinterpret_cast<Bytef *>(raw.data()), &out_size,
                            reinterpret_cast<const Bytef *>(packed.data()), static_cast<uLong>(packed.size()));
  if (rc != Z_OK || out_size != raw_size)
  {
    throw IoError("region decompression failed");
  }
  return raw;
}
}  // namespace occmap
