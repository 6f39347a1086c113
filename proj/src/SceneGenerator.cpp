#include "occmap/SceneGenerator.h"

#include "occmap/MapConfig.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace occmap
{
namespace
{
constexpr int kBeamCount = 16;
constexpr double kMinElevationDeg = -15.0;
constexpr double kElevationStepDeg = 2.0;
constexpr double kSpinHz = 10.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Surface
{
  kNone,
  kGround,
  kWall,
  kPole,
};

struct Hit
{
  double range = kInf;
  Surface surface = Surface::kNone;

  void consider(double t, Surface s)
  {
    if (t > 1e-6 && t < range)
    {
      range = t;
      surface = s;
    }
  }
};

struct Box
{
  Eigen::Vector3d min;
  Eigen::Vector3d max;

  bool contains(const Eigen::Vector3d &p) const
  {
    return (p.array() > min.array()).all() && (p.array() < max.array()).all();
  }
};

void castGround(const Eigen::Vector3d &o, const Eigen::Vector3d &d, Hit &hit)
{
  if (d.z() < 0.0)
  {
    hit.consider(-o.z() / d.z(), Surface::kGround);
  }
}

/// Interior hit (sensor inside) or exterior entry (sensor outside) against an axis-aligned box.
void castBox(const Box &box, const Eigen::Vector3d &o, const Eigen::Vector3d &d, Hit &hit)
{
  double t_near = -kInf;
  double t_far = kInf;
  for (int a = 0; a < 3; ++a)
  {
    if (d[a] == 0.0)
    {
      if (o[a] < box.min[a] || o[a] > box.max[a])
      {
        return;
      }
      continue;
    }
    double t0 = (box.min[a] - o[a]) / d[a];
    double t1 = (box.max[a] - o[a]) / d[a];
    if (t0 > t1)
    {
      std::swap(t0, t1);
    }
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (t_near > t_far)
  {
    return;
  }
  hit.consider(box.contains(o) ? t_far : t_near, Surface::kWall);
}

void castPole(const Pole &pole, const Eigen::Vector3d &o, const Eigen::Vector3d &d, Hit &hit)
{
  const double ox = o.x() - pole.centre.x();
  const double oy = o.y() - pole.centre.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a <= 0.0)
  {
    return;
  }
  const double b = 2.0 * (ox * d.x() + oy * d.y());
  const double c = ox * ox + oy * oy - pole.radius * pole.radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0)
  {
    return;
  }
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  const double z = o.z() + t * d.z();
  if (z >= 0.0 && z <= pole.height)
  {
    hit.consider(t, Surface::kPole);
  }
}

struct Scene
{
  std::vector<Box> boxes;
  std::vector<Pole> poles;
  bool ground = true;

  Hit cast(const Eigen::Vector3d &o, const Eigen::Vector3d &d) const
  {
    Hit hit;
    if (ground)
    {
      castGround(o, d, hit);
    }
    for (const Box &b : boxes)
    {
      castBox(b, o, d, hit);
    }
    for (const Pole &p : poles)
    {
      castPole(p, o, d, hit);
    }
    return hit;
  }
};

Scene buildScene(const SceneSpec &spec)
{
  Scene scene;
  switch (spec.kind)
  {
  case SceneKind::kCorridor:
    // Closed corridor: 3 m wide, 3 m high; the box supplies floor and ceiling.
    scene.ground = false;
    scene.boxes.push_back(Box{ Eigen::Vector3d(-5.0, -1.5, 0.0), Eigen::Vector3d(spec.extent, 1.5, 3.0) });
    break;
  case SceneKind::kOpenField: {
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> along(0.0, spec.extent);
    std::uniform_real_distribution<double> across(-spec.extent * 0.5, spec.extent * 0.5);
    const int trees = std::max(1, static_cast<int>(spec.extent / 25.0));
    for (int i = 0; i < trees; ++i)
    {
      Eigen::Vector2d c(along(rng), across(rng));
      if (std::abs(c.y()) < 3.0)
      {
        c.y() += c.y() < 0.0 ? -3.0 : 3.0;
      }
      scene.poles.push_back(Pole{ c, 0.3, 4.0 });
    }
    break;
  }
  case SceneKind::kThinPoles:
    scene.poles = thinPoles(spec);
    break;
  case SceneKind::kMixedIndoorOutdoor:
    // Buildings 10 m long every 20 m along the path; the sensor drives through them.
    for (double x = 0.0; x < spec.extent; x += 20.0)
    {
      scene.boxes.push_back(Box{ Eigen::Vector3d(x, -4.0, 0.0), Eigen::Vector3d(x + 10.0, 4.0, 3.0) });
    }
    break;
  }
  return scene;
}

double baseIntensity(Surface s)
{
  switch (s)
  {
  case Surface::kGround:
    return 20.0;
  case Surface::kWall:
    return 40.0;
  case Surface::kPole:
    return 80.0;
  case Surface::kNone:
    break;
  }
  return 0.0;
}
}  // namespace

SceneKind parseSceneKind(std::string_view name)
{
  if (name == "corridor")
  {
    return SceneKind::kCorridor;
  }
  if (name == "open-field")
  {
    return SceneKind::kOpenField;
  }
  if (name == "thin-poles")
  {
    return SceneKind::kThinPoles;
  }
  if (name == "mixed" || name == "mixed-indoor-outdoor")
  {
    return SceneKind::kMixedIndoorOutdoor;
  }
  throw ConfigError("unknown scene kind '" + std::string(name) + "'");
}


std::string_view sceneKindName(SceneKind kind)
{
  switch (kind)
  {
  case SceneKind::kCorridor:
    return "corridor";
  case SceneKind::kOpenField:
    return "open-field";
  case SceneKind::kThinPoles:
    return "thin-poles";
  case SceneKind::kMixedIndoorOutdoor:
    return "mixed";
  }
  return "unknown";
}


double sensorHeight(SceneKind kind)
{
  return kind == SceneKind::kOpenField ? 1.5 : 1.0;
}


std::vector<Pole> thinPoles(const SceneSpec &spec)
{
  // Two rows of 2 cm radius poles, 1 m apart, either side of the path.
  std::vector<Pole> poles;
  for (double x = 0.55; x < spec.extent; x += 1.0)
  {
    poles.push_back(Pole{ Eigen::Vector2d(x, 1.55), 0.02, 3.0 });
    poles.push_back(Pole{ Eigen::Vector2d(x, -1.55), 0.02, 3.0 });
  }
  return poles;
}


std::vector<RaySample> generateScene(const SceneSpec &spec)
{
  if (!(spec.rate > 0.0) || !(spec.duration >= 0.0) || !(spec.max_range > 0.0) || !(spec.extent > 0.0) ||
      spec.noise < 0.0)
  {
    throw ConfigError("invalid scene specification");
  }
  const Scene scene = buildScene(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> range_noise(0.0, 1.0);
  std::normal_distribution<double> intensity_noise(0.0, 5.0);

  const auto count = static_cast<std::size_t>(std::llround(spec.rate * spec.duration));
  const double per_rev = std::max(1.0, std::round(spec.rate / (kBeamCount * kSpinHz)));
  const double height = sensorHeight(spec.kind);
  std::vector<RaySample> rays;
  rays.reserve(count);

  for (std::size_t i = 0; i < count; ++i)
  {
    const double t = static_cast<double>(i) / spec.rate;
    const auto beam = static_cast<int>(i % kBeamCount);
    const double column = std::floor(static_cast<double>(i / kBeamCount));
    const double azimuth = 2.0 * std::numbers::pi * std::fmod(column, per_rev) / per_rev;
    const double elevation = (kMinElevationDeg + kElevationStepDeg * beam) * std::numbers::pi / 180.0;
    const Eigen::Vector3d dir(std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
                              std::sin(elevation));
    const Eigen::Vector3d origin(std::fmod(spec.speed * t, spec.extent), 0.0, height);

    const Hit hit = scene.cast(origin, dir);
    RaySample ray;
    ray.origin = origin;
    ray.timestamp = t;
    double range = hit.range;
    if (hit.surface != Surface::kNone && spec.noise > 0.0)
    {
      range = std::max(0.05, range + spec.noise * range_noise(rng));
    }
    if (hit.surface != Surface::kNone && range <= spec.max_range)
    {
      ray.end = origin + dir * range;
      ray.has_sample = true;
      ray.intensity = static_cast<float>(std::max(0.0, baseIntensity(hit.surface) + intensity_noise(rng)));
    }
    else
    {
      ray.end = origin + dir * spec.max_range;
      ray.has_sample = false;
      ray.intensity = 0.0f;
    }
    rays.push_back(ray);
  }
  return rays;
}
}  // namespace occmap
