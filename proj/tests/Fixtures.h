#ifndef OCCMAP_TESTS_FIXTURES_H
#define OCCMAP_TESTS_FIXTURES_H

// Scripted ray sets shared by the unit tests and the acceptance binary.

#include <occmap/RaySample.h>

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <vector>

namespace occmap::fixture
{
/// Pole of radius 2 cm standing at (0.55, 1.55). The watched voxel spans x [0.5, 0.6], y [1.5, 1.6],
/// z [1.0, 1.1].
inline const Eigen::Vector3d kPoleAxis(0.55, 1.55, 0.0);
constexpr double kPoleRadius = 0.02;
inline const Eigen::Vector3d kPoleVoxelCentre(0.55, 1.55, 1.05);

/// Horizontal ray along +y ending on the sensor-facing side of the pole.
inline RaySample poleHit(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> dx(-0.015, 0.015);
  std::uniform_real_distribution<double> z(1.01, 1.09);
  const double x = kPoleAxis.x() + dx(rng);
  const double h = z(rng);
  const double off = x - kPoleAxis.x();
  RaySample r;
  r.origin = Eigen::Vector3d(x, 0.0, h);
  r.end = Eigen::Vector3d(x, kPoleAxis.y() - std::sqrt(kPoleRadius * kPoleRadius - off * off), h);
  r.intensity = 40.0f;
  return r;
}

/// Miss-only ray along (1, -1, 0) clipping the far corner of the watched voxel 6.4 cm from the pole axis.
inline RaySample polePassThrough(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> z(1.01, 1.09);
  const double h = z(rng);
  const Eigen::Vector3d through(0.595, 1.595, h);
  const Eigen::Vector3d dir = Eigen::Vector3d(1.0, -1.0, 0.0).normalized();
  RaySample r;
  r.origin = through - 3.0 * dir;
  r.end = through + 3.0 * dir;
  r.has_sample = false;
  return r;
}

/// Batch 0: 20 hits. Batches 1..n: one hit plus three pass-throughs each.
inline std::vector<std::vector<RaySample>> thinPoleScript(int batches = 40, unsigned seed = 4)
{
  std::mt19937_64 rng(seed);
  std::vector<std::vector<RaySample>> out(1);
  for (int i = 0; i < 20; ++i)
  {
    out[0].push_back(poleHit(rng));
  }
  for (int b = 0; b < batches; ++b)
  {
    std::vector<RaySample> batch{ poleHit(rng) };
    for (int i = 0; i < 3; ++i)
    {
      batch.push_back(polePassThrough(rng));
    }
    out.push_back(std::move(batch));
  }
  return out;
}

/// Rays from random origins inside a box to random points on the surface of a larger box.
inline std::vector<RaySample> boxRays(std::size_t count, unsigned seed, double inner = 2.0, double outer = 6.0)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> in(-inner, inner);
  std::uniform_real_distribution<double> out(-outer, outer);
  std::uniform_int_distribution<int> face(0, 5);
  std::vector<RaySample> rays(count);
  for (RaySample &r : rays)
  {
    r.origin = Eigen::Vector3d(in(rng), in(rng), in(rng));
    Eigen::Vector3d e(out(rng), out(rng), out(rng));
    const int f = face(rng);
    e[f / 2] = f % 2 ? outer : -outer;
    r.end = e;
    r.intensity = static_cast<float>(f * 10);
  }
  return rays;
}
}  // namespace occmap::fixture

#endif  // OCCMAP_TESTS_FIXTURES_H
