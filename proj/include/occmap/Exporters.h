#ifndef OCCMAP_EXPORTERS_H
#define OCCMAP_EXPORTERS_H

#include "OccupancyMap.h"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace occmap
{
enum class ExportFormat
{
  kOccupiedPly,
  kNdtCsv,
  kTsdfCsv,
  kDecayCsv,
};

/// "occupied-ply", "ndt-csv", "tsdf-csv", "decay-csv". Throws ConfigError otherwise.
ExportFormat parseExportFormat(std::string_view name);
std::string_view exportFormatName(ExportFormat format);
LayerSet exportLayers(ExportFormat format);

/// Write @p map in @p format. Voxels are emitted in ascending region coordinate order, then buffer order.
/// Throws ConfigError when the map lacks a layer the format needs.
///
/// - occupied-ply: ASCII PLY, one vertex per occupied voxel at its voxel mean (centre without a mean layer).
/// - ndt-csv: x,y,z,n,mean_x,mean_y,mean_z,cov_xx,cov_xy,cov_xz,cov_yy,cov_yz,cov_zz,log_odds,hits,misses,
///   permeability,intensity_mean,intensity_var for voxels with samples; unknown values are left empty.
/// - tsdf-csv: x,y,z,distance,weight for observed voxels.
/// - decay-csv: x,y,z,hits,distance_sum,decay_rate for voxels crossed by at least one ray.
void exportMap(OccupancyMap &map, ExportFormat format, std::ostream &out);
void exportMap(OccupancyMap &map, ExportFormat format, const std::filesystem::path &path);
}  // namespace occmap

#endif  // OCCMAP_EXPORTERS_H
