#ifndef OCCMAP_SCENEGENERATOR_H
#define OCCMAP_SCENEGENERATOR_H

#include "RaySample.h"

#include <Eigen/Core>

#include <cstdint>
#include <string_view>
#include <vector>

namespace occmap
{
enum class SceneKind
{
  kCorridor,
  kOpenField,
  kThinPoles,
  kMixedIndoorOutdoor,
};

/// "corridor", "open-field", "thin-poles", "mixed". Throws ConfigError otherwise.
SceneKind parseSceneKind(std::string_view name);
std::string_view sceneKindName(SceneKind kind);

/// Simulated spinning multi-beam lidar (16 beams, -15..+15 degrees elevation, 10 Hz) moving along +x through
/// analytic geometry. Rays without a return inside `max_range` are emitted at `max_range` as miss-only rays.
struct SceneSpec
{
  SceneKind kind = SceneKind::kCorridor;
  /// Length of the scene along the direction of travel, metres.
  double extent = 100.0;
  /// Rays per second of simulated sensor time.
  double rate = 300000.0;
  double duration = 1.0;
  /// Standard deviation of range noise, metres.
  double noise = 0.01;
  std::uint64_t seed = 1;
  double max_range = 20.0;
  /// Sensor speed along +x, m/s.
  double speed = 2.0;
};

std::vector<RaySample> generateScene(const SceneSpec &spec);

/// Pole geometry of the thin-poles scene.
struct Pole
{
  Eigen::Vector2d centre;
  double radius = 0.0;
  double height = 0.0;
};
std::vector<Pole> thinPoles(const SceneSpec &spec);

/// Sensor height above ground used by each scene kind.
double sensorHeight(SceneKind kind);
}  // namespace occmap

#endif  // OCCMAP_SCENEGENERATOR_H
