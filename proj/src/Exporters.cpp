#include "occmap/Exporters.h"

#include "occmap/Ndt.h"
#include "occmap/Occupancy.h"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

namespace occmap
{
namespace
{
template <typename Fn>
void forEachVoxel(OccupancyMap &map, Fn &&fn)
{
  const int dim = map.config().region_dim;
  map.forEachRegion([&](const Region &region) {
    VoxelKey key;
    key.region = region.coord;
    std::size_t idx = 0;
    for (key.lz = 0; key.lz < dim; ++key.lz)
    {
      for (key.ly = 0; key.ly < dim; ++key.ly)
      {
        for (key.lx = 0; key.lx < dim; ++key.lx, ++idx)
        {
          fn(region, key, idx);
        }
      }
    }
  });
}

void writeXyz(std::ostream &out, const Eigen::Vector3d &p)
{
  out << p.x() << ',' << p.y() << ',' << p.z();
}

void exportPly(OccupancyMap &map, std::ostream &out)
{
  const MapConfig &cfg = map.config();
  std::ostringstream body;
  body << std::fixed << std::setprecision(6);
  std::size_t vertices = 0;
  forEachVoxel(map, [&](const Region &region, const VoxelKey &key, std::size_t idx) {
    const VoxelMean *mean = region.mean.empty() ? nullptr : &region.mean[idx];
    if (occupancyState(region.occupancy[idx], mean, cfg) != OccupancyState::kOccupied)
    {
      return;
    }
    Eigen::Vector3d p = voxelCenter(key, cfg);
    if (mean && mean->count > 0)
    {
      p += (unpackMean(mean->coord) - Eigen::Vector3d::Constant(0.5)) * cfg.voxel_size;
    }
    body << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    ++vertices;
  });
  out << "ply\nformat ascii 1.0\nelement vertex " << vertices
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n"
      << body.str();
}

void exportNdt(OccupancyMap &map, std::ostream &out)
{
  const MapConfig &cfg = map.config();
  out << "x,y,z,n,mean_x,mean_y,mean_z,cov_xx,cov_xy,cov_xz,cov_yy,cov_yz,cov_zz,log_odds,hits,misses,permeability,"
         "intensity_mean,intensity_var\n";
  out << std::setprecision(9);
  forEachVoxel(map, [&](const Region &region, const VoxelKey &key, std::size_t idx) {
    const VoxelMean &mean = region.mean[idx];
    if (mean.count == 0)
    {
      return;
    }
    const NdtCovariance &cov = region.covariance[idx];
    const Eigen::Matrix3d sigma = covarianceMatrix(cov);
    writeXyz(out, voxelCenter(key, cfg));
    out << ',' << mean.count << ',';
    writeXyz(out, ndtMean(cov));
    out << ',' << sigma(0, 0) << ',' << sigma(0, 1) << ',' << sigma(0, 2) << ',' << sigma(1, 1) << ','
        << sigma(1, 2) << ',' << sigma(2, 2) << ',' << region.occupancy[idx] << ',';
    if (!region.traversal.empty())
    {
      const TraversalVoxel &tv = region.traversal[idx];
      out << tv.hits << ',' << tv.misses << ',';
      if (const auto p = permeability(tv))
      {
        out << *p;
      }
      out << ',';
      if (const auto stats = intensityStats(tv))
      {
        out << stats->first << ',' << stats->second;
      }
      else
      {
        out << ',';
      }
    }
    else
    {
      out << ",,,,";
    }
    out << '\n';
  });
}

void exportTsdf(OccupancyMap &map, std::ostream &out)
{
  const MapConfig &cfg = map.config();
  out << "x,y,z,distance,weight\n" << std::setprecision(9);
  forEachVoxel(map, [&](const Region &region, const VoxelKey &key, std::size_t idx) {
    const TsdfVoxel &v = region.tsdf[idx];
    if (v.weight <= 0.0f)
    {
      return;
    }
    writeXyz(out, voxelCenter(key, cfg));
    out << ',' << v.distance << ',' << v.weight << '\n';
  });
}

void exportDecay(OccupancyMap &map, std::ostream &out)
{
  const MapConfig &cfg = map.config();
  out << "x,y,z,hits,distance_sum,decay_rate\n" << std::setprecision(12);
  forEachVoxel(map, [&](const Region &region, const VoxelKey &key, std::size_t idx) {
    const DecayVoxel &v = region.decay[idx];
    if (v.hits == 0 && v.distance_sum <= 0.0)
    {
      return;
    }
    writeXyz(out, voxelCenter(key, cfg));
    out << ',' << v.hits << ',' << v.distance_sum << ',';
    if (const auto rate = decayRate(v))
    {
      out << *rate;
    }
    out << '\n';
  });
}
}  // namespace

ExportFormat parseExportFormat(std::string_view name)
{
  if (name == "occupied-ply")
  {
    return ExportFormat::kOccupiedPly;
  }
  if (name == "ndt-csv")
  {
    return ExportFormat::kNdtCsv;
  }
  if (name == "tsdf-csv")
  {
    return ExportFormat::kTsdfCsv;
  }
  if (name == "decay-csv")
  {
    return ExportFormat::kDecayCsv;
  }
  throw ConfigError("unknown export format '" + std::string(name) + "'");
}


std::string_view exportFormatName(ExportFormat format)
{
  switch (format)
  {
  case ExportFormat::kOccupiedPly:
    return "occupied-ply";
  case ExportFormat::kNdtCsv:
    return "ndt-csv";
  case ExportFormat::kTsdfCsv:
    return "tsdf-csv";
  case ExportFormat::kDecayCsv:
    return "decay-csv";
  }
  return "unknown";
}


LayerSet exportLayers(ExportFormat format)
{
  switch (format)
  {
  case ExportFormat::kOccupiedPly:
    return { Layer::kOccupancy };
  case ExportFormat::kNdtCsv:
    return { Layer::kOccupancy, Layer::kMean, Layer::kCovariance };
  case ExportFormat::kTsdfCsv:
    return { Layer::kTsdf };
  case ExportFormat::kDecayCsv:
    return { Layer::kDecay };
  }
  return {};
}


void exportMap(OccupancyMap &map, ExportFormat format, std::ostream &out)
{
  if (!map.layers().containsAll(exportLayers(format)))
  {
    throw ConfigError("map lacks the layers required for " + std::string(exportFormatName(format)) + " export");
  }
  map.restoreAll();
  switch (format)
  {
  case ExportFormat::kOccupiedPly:
    exportPly(map, out);
    break;
  case ExportFormat::kNdtCsv:
    exportNdt(map, out);
    break;
  case ExportFormat::kTsdfCsv:
    exportTsdf(map, out);
    break;
  case ExportFormat::kDecayCsv:
    exportDecay(map, out);
    break;
  }
}


void exportMap(OccupancyMap &map, ExportFormat format, const std::filesystem::path &path)
{
  if (!map.layers().containsAll(exportLayers(format)))
  {
    throw ConfigError("map lacks the layers required for " + std::string(exportFormatName(format)) + " export");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  exportMap(map, format, out);
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}
}  // namespace occmap
