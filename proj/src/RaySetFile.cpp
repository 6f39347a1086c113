#include "occmap/RaySetFile.h"

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace occmap
{
namespace
{
constexpr std::array<char, 5> kMagic = { 'O', 'H', 'M', 'B', '1' };

template <typename T>
void put(std::byte *&cursor, T value)
{
  if constexpr (std::endian::native == std::endian::big)
  {
    auto raw = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
    std::reverse(raw.begin(), raw.end());
    std::memcpy(cursor, raw.data(), sizeof(T));
  }
  else
  {
    std::memcpy(cursor, &value, sizeof(T));
  }
  cursor += sizeof(T);
}

template <typename T>
T get(const std::byte *&cursor)
{
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), cursor, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
  {
    std::reverse(raw.begin(), raw.end());
  }
  cursor += sizeof(T);
  return std::bit_cast<T>(raw);
}
}  // namespace

void writeRaySet(std::ostream &out, std::span<const RaySample> rays)
{
  std::array<std::byte, kRaySetHeaderSize> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  std::byte *cursor = header.data() + kMagic.size();
  put(cursor, kRaySetVersion);
  put(cursor, static_cast<std::uint64_t>(rays.size()));
  out.write(reinterpret_cast<const char *>(header.data()), header.size());

  std::array<std::byte, kRaySetRecordSize> record{};
  double last_time = -std::numeric_limits<double>::infinity();
  for (const RaySample &ray : rays)
  {
    if (ray.timestamp < last_time)
    {
      throw IoError("ray timestamps must be non-decreasing");
    }
    last_time = ray.timestamp;
    cursor = record.data();
    put(cursor, ray.timestamp);
    for (int a = 0; a < 3; ++a)
    {
      put(cursor, static_cast<float>(ray.origin[a]));
    }
    for (int a = 0; a < 3; ++a)
    {
      put(cursor, static_cast<float>(ray.end[a]));
    }
    put(cursor, ray.intensity);
    put(cursor, (ray.has_sample ? kRayFlagHasSample : 0u) | (ray.second_return ? kRayFlagSecondReturn : 0u));
    out.write(reinterpret_cast<const char *>(record.data()), record.size());
  }
  if (!out)
  {
    throw IoError("failed writing ray set");
  }
}


void writeRaySet(const std::filesystem::path &path, std::span<const RaySample> rays)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  writeRaySet(out, rays);
}


std::vector<RaySample> readRaySet(std::istream &in)
{
  std::array<std::byte, kRaySetHeaderSize> header{};
  in.read(reinterpret_cast<char *>(header.data()), header.size());
  if (!in || std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0)
  {
    throw IoError("not a ray set file (bad magic)");
  }
  const std::byte *cursor = header.data() + kMagic.size();
  const auto version = get<std::uint32_t>(cursor);
  if (version != kRaySetVersion)
  {
    throw IoError("unsupported ray set version " + std::to_string(version));
  }
  const auto count = get<std::uint64_t>(cursor);

  std::vector<RaySample> rays;
  rays.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  std::array<std::byte, kRaySetRecordSize> record{};
  double last_time = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < count; ++i)
  {
    in.read(reinterpret_cast<char *>(record.data()), record.size());
    if (!in)
    {
      throw IoError("ray set holds fewer records than its header declares");
    }
    cursor = record.data();
    RaySample ray;
    ray.timestamp = get<double>(cursor);
    for (int a = 0; a < 3; ++a)
    {
      ray.origin[a] = get<float>(cursor);
    }
    for (int a = 0; a < 3; ++a)
    {
      ray.end[a] = get<float>(cursor);
    }
    ray.intensity = get<float>(cursor);
    const auto flags = get<std::uint32_t>(cursor);
    ray.has_sample = (flags & kRayFlagHasSample) != 0;
    ray.second_return = (flags & kRayFlagSecondReturn) != 0;
    if (ray.timestamp < last_time)
    {
      throw IoError("ray set timestamps decrease at record " + std::to_string(i));
    }
    last_time = ray.timestamp;
    rays.push_back(ray);
  }
  if (in.peek() != std::char_traits<char>::eof())
  {
    throw IoError("ray set holds more data than its header declares");
  }
  return rays;
}


std::vector<RaySample> readRaySet(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open " + path.string());
  }
  return readRaySet(in);
}
}  // namespace occmap
