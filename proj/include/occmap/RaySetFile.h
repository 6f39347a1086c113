#ifndef OCCMAP_RAYSETFILE_H
#define OCCMAP_RAYSETFILE_H

#include "MapConfig.h"
#include "RaySample.h"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace occmap
{
/// Ray set file, little-endian:
///   header: "OHMB1" | u32 version (1) | u64 record count
///   record (40 bytes): f64 timestamp | f32 origin[3] | f32 end[3] | f32 intensity | u32 flags
/// Flag bit 0 marks a real sample (has_sample), bit 1 a second return.
constexpr std::uint32_t kRaySetVersion = 1;
constexpr std::size_t kRaySetHeaderSize = 17;
constexpr std::size_t kRaySetRecordSize = 40;
constexpr std::uint32_t kRayFlagHasSample = 1u << 0;
constexpr std::uint32_t kRayFlagSecondReturn = 1u << 1;

/// Throws IoError when timestamps decrease.
void writeRaySet(std::ostream &out, std::span<const RaySample> rays);
void writeRaySet(const std::filesystem::path &path, std::span<const RaySample> rays);

/// Throws IoError on bad magic/version, a record count that disagrees with the data, or decreasing timestamps.
std::vector<RaySample> readRaySet(std::istream &in);
std::vector<RaySample> readRaySet(const std::filesystem::path &path);
}  // namespace occmap

#endif  // OCCMAP_RAYSETFILE_H
