#ifndef OCCMAP_MAPCONFIG_H
#define OCCMAP_MAPCONFIG_H

#include <stdexcept>
#include <string>

namespace occmap
{
/// Raised for invalid configuration or a layer/integrator mismatch. Always thrown before any map mutation.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be read, written or parsed.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Map and integrator parameters. Lengths are in metres, occupancy thresholds in probability or log-odds as named.
struct MapConfig
{
  double voxel_size = 0.1;
  int region_dim = 32;

  double hit_probability = 0.7;
  double miss_probability = 0.4;
  double clamp_min = -2.0;
  double clamp_max = 3.5;
  double occupied_threshold = 0.5;

  double max_ray_range = 20.0;
  double segment_length = 10.0;

  double tsdf_truncation = 0.3;
  double tsdf_max_weight = 100.0;

  double ndt_sensor_noise = 0.05;
  double ndt_reset_threshold = -1.0;
  double ndt_miss_check_threshold = 0.2;

  /// Edge length of a region in metres.
  double regionExtent() const { return voxel_size * region_dim; }
  std::size_t voxelsPerRegion() const
  {
    const auto d = static_cast<std::size_t>(region_dim);
    return d * d * d;
  }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};
}  // namespace occmap

#endif  // OCCMAP_MAPCONFIG_H
