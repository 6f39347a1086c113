#include <occmap/Tsdf.h>
#include <occmap/UpdateEngine.h>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{
using namespace occmap;

RaySample ray(const Eigen::Vector3d &a, const Eigen::Vector3d &b)
{
  RaySample r;
  r.origin = a;
  r.end = b;
  return r;
}

TEST(TsdfMerge, WeightedAverage)
{
  const TsdfVoxel out = tsdfMerge(TsdfVoxel{ 0.2f, 1.0f }, 0.0, 1.0, 100.0);
  EXPECT_FLOAT_EQ(out.distance, 0.1f);
  EXPECT_FLOAT_EQ(out.weight, 2.0f);
}

TEST(TsdfMerge, WeightSaturates)
{
  TsdfVoxel v;
  for (int i = 0; i < 150; ++i)
  {
    v = tsdfMerge(v, 0.1, 1.0, 100.0);
  }
  EXPECT_FLOAT_EQ(v.weight, 100.0f);
  EXPECT_NEAR(v.distance, 0.1f, 1e-6);
}

TEST(TsdfDistance, ProjectiveExamples)
{
  const Eigen::Vector3d sensor = Eigen::Vector3d::Zero();
  const Eigen::Vector3d unit = Eigen::Vector3d::UnitX();
  EXPECT_NEAR(*tsdfProjectiveDistance(sensor, unit, 2.0, Eigen::Vector3d(1.8, 0.0, 0.0), 0.3), 0.2, 1e-12);
  EXPECT_NEAR(*tsdfProjectiveDistance(sensor, unit, 2.0, Eigen::Vector3d(2.1, 0.05, 0.0), 0.3), -0.1, 1e-12);
  EXPECT_FALSE(tsdfProjectiveDistance(sensor, unit, 2.0, Eigen::Vector3d(1.6, 0.0, 0.0), 0.3).has_value());
}

TEST(TsdfIntegration, SingleRay)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kTsdf));
  EXPECT_FALSE(tsdfQuery(map, Eigen::Vector3d(2.05, 0.05, 0.05)).has_value());
  const RaySample r = ray(Eigen::Vector3d(0.05, 0.05, 0.05), Eigen::Vector3d(2.05, 0.05, 0.05));
  const BatchStats stats = sequentialReference(map, std::span(&r, 1), IntegratorMode::kTsdf);
  EXPECT_EQ(stats.unprefetched_visits, 0u);

  const auto surface = tsdfQuery(map, r.end);
  ASSERT_TRUE(surface.has_value());
  EXPECT_NEAR(surface->distance, 0.0f, 1e-6);
  EXPECT_FLOAT_EQ(surface->weight, 1.0f);

  const auto front = tsdfQuery(map, Eigen::Vector3d(1.85, 0.05, 0.05));
  ASSERT_TRUE(front.has_value());
  EXPECT_NEAR(front->distance, 0.2f, 1e-6);

  const auto behind = tsdfQuery(map, Eigen::Vector3d(2.25, 0.05, 0.05));
  ASSERT_TRUE(behind.has_value());
  EXPECT_NEAR(behind->distance, -0.2f, 1e-6);

  // Outside the band on both sides.
  EXPECT_FALSE(tsdfQuery(map, Eigen::Vector3d(1.65, 0.05, 0.05)).has_value());
  EXPECT_FALSE(tsdfQuery(map, Eigen::Vector3d(2.45, 0.05, 0.05)).has_value());
}

TEST(TsdfIntegration, SurfaceVoxelWithinVoxelSizeForArbitraryRays)
{
  const MapConfig cfg;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i)
  {
    OccupancyMap map(cfg, defaultLayers(IntegratorMode::kTsdf));
    const RaySample r = ray(Eigen::Vector3d(u(rng), u(rng), u(rng)), Eigen::Vector3d(u(rng), u(rng), u(rng)));
    sequentialReference(map, std::span(&r, 1), IntegratorMode::kTsdf);
    const auto v = tsdfQuery(map, r.end);
    ASSERT_TRUE(v.has_value());
    EXPECT_LE(std::abs(v->distance), cfg.voxel_size);
  }
}

TEST(TsdfIntegration, ShortRayBandStopsAtSensor)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kTsdf));
  const RaySample r = ray(Eigen::Vector3d(0.05, 0.05, 0.05), Eigen::Vector3d(0.15, 0.05, 0.05));
  sequentialReference(map, std::span(&r, 1), IntegratorMode::kTsdf);
  EXPECT_FALSE(tsdfQuery(map, Eigen::Vector3d(-0.05, 0.05, 0.05)).has_value());
  EXPECT_NEAR(tsdfQuery(map, r.origin)->distance, 0.1f, 1e-6);
}

TEST(TsdfIntegration, FlatWallZeroCrossing)
{
  MapConfig cfg;
  cfg.tsdf_max_weight = 5.0;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kTsdf));
  const double wall = 3.03;
  std::vector<RaySample> rays;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i)
  {
    const double y = u(rng);
    const double z = u(rng);
    rays.push_back(ray(Eigen::Vector3d(0.0, y, z), Eigen::Vector3d(wall, y, z)));
  }
  ExecutorOptions opts;
  opts.worker_count = 4;
  submitBatch(map, rays, IntegratorMode::kTsdf, opts);

  map.forEachRegion([&](const Region &region) {
    for (const TsdfVoxel &v : region.tsdf)
    {
      ASSERT_LE(std::abs(v.distance), cfg.tsdf_truncation + 1e-6);
      ASSERT_LE(v.weight, cfg.tsdf_max_weight);
    }
  });
  for (int j = 0; j < 10; ++j)
  {
    const double y = 0.05 + 0.1 * j;
    const double z = 0.05 + 0.1 * ((j * 3) % 10);
    double crossing = NAN;
    for (double x = 2.75; x < 3.3; x += cfg.voxel_size)
    {
      const auto a = tsdfQuery(map, Eigen::Vector3d(x, y, z));
      const auto b = tsdfQuery(map, Eigen::Vector3d(x + cfg.voxel_size, y, z));
      if (a && b && a->distance > 0.0f && b->distance <= 0.0f)
      {
        const double xa = std::floor(x / cfg.voxel_size + 1e-9) * cfg.voxel_size + 0.5 * cfg.voxel_size;
        crossing = xa + cfg.voxel_size * a->distance / (a->distance - b->distance);
      }
    }
    ASSERT_FALSE(std::isnan(crossing)) << j;
    EXPECT_LE(std::abs(crossing - wall), 0.5 * cfg.voxel_size) << j;
  }
}
}  // namespace
