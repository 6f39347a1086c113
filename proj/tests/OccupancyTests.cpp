#include "Oracles.h"

#include <occmap/Occupancy.h>
#include <occmap/UpdateEngine.h>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace
{
using namespace occmap;

RaySample ray(const Eigen::Vector3d &a, const Eigen::Vector3d &b, bool sample = true)
{
  RaySample r;
  r.origin = a;
  r.end = b;
  r.has_sample = sample;
  return r;
}

VoxelKey keyAt(double x, double y, double z, const MapConfig &cfg)
{
  return keyForPoint(Eigen::Vector3d(x, y, z), cfg);
}

TEST(LogOdds, SensorModelDeltas)
{
  const MapConfig cfg;
  EXPECT_NEAR(hitDelta(cfg), 0.8472978603872037, 1e-12);
  EXPECT_NEAR(missDelta(cfg), -0.4054651081081644, 1e-12);
  EXPECT_NEAR(logOddsDelta(true, cfg), std::log(0.7 / 0.3), 1e-15);
  EXPECT_NEAR(logOddsDelta(false, cfg), std::log(0.4 / 0.6), 1e-15);
}

TEST(LogOdds, RoundTripAndDomain)
{
  for (double p : { 0.01, 0.2, 0.5, 0.7, 0.999 })
  {
    EXPECT_NEAR(logOddsToProbability(probabilityToLogOdds(p)), p, 1e-14);
  }
  EXPECT_EQ(probabilityToLogOdds(0.5), 0.0);
  EXPECT_THROW(probabilityToLogOdds(0.0), std::domain_error);
  EXPECT_THROW(probabilityToLogOdds(1.0), std::domain_error);
  EXPECT_THROW(probabilityToLogOdds(-0.1), std::domain_error);
}

TEST(LogOdds, Clamping)
{
  const MapConfig cfg;
  EXPECT_FLOAT_EQ(applyOccupancyUpdate(3.4f, hitDelta(cfg), cfg), 3.5f);
  EXPECT_FLOAT_EQ(applyOccupancyUpdate(-1.9f, missDelta(cfg), cfg), -2.0f);
  EXPECT_FLOAT_EQ(applyOccupancyUpdate(0.0f, hitDelta(cfg), cfg), 0.84729786f);
}

TEST(LogOdds, MatchesProbabilitySpaceBayes)
{
  MapConfig cfg;
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> len(1, 200);
  for (int trial = 0; trial < 1000; ++trial)
  {
    double l = 0.0;
    double p = 0.5;
    const int n = len(rng);
    for (int i = 0; i < n; ++i)
    {
      const bool hit = coin(rng);
      l += logOddsDelta(hit, cfg);
      p = hit ? oracle::bayesUpdate(p, cfg.hit_probability, 1.0 - cfg.hit_probability)
              : oracle::bayesUpdate(p, cfg.miss_probability, 1.0 - cfg.miss_probability);
    }
    ASSERT_NEAR(logOddsToProbability(l), p, 1e-9);
  }
}

TEST(OccupancyState, Classification)
{
  const MapConfig cfg;
  VoxelMean untouched{};
  VoxelMean sampled{ 0, 1 };
  EXPECT_EQ(occupancyState(0.0f, &untouched, cfg), OccupancyState::kUnknown);
  EXPECT_EQ(occupancyState(0.0f, nullptr, cfg), OccupancyState::kUnknown);
  EXPECT_EQ(occupancyState(0.0f, &sampled, cfg), OccupancyState::kFree);
  EXPECT_EQ(occupancyState(0.84f, nullptr, cfg), OccupancyState::kOccupied);
  EXPECT_EQ(occupancyState(-0.4f, nullptr, cfg), OccupancyState::kFree);
  EXPECT_EQ(occupancyState(1e-6f, nullptr, cfg), OccupancyState::kOccupied);
}

TEST(DecayRate, Examples)
{
  EXPECT_FALSE(decayRate(DecayVoxel{}).has_value());
  EXPECT_DOUBLE_EQ(*decayRate(DecayVoxel{ .hits = 1, .distance_sum = 2.0 }), 0.5);
  EXPECT_DOUBLE_EQ(*decayRate(DecayVoxel{ .hits = 0, .distance_sum = 0.3 }), 0.0);
}

TEST(OccupancyIntegration, SingleRayHandComposition)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  const RaySample r = ray(Eigen::Vector3d(0.05, 0.05, 0.05), Eigen::Vector3d(0.35, 0.05, 0.05));
  const BatchStats stats = sequentialReference(map, std::span(&r, 1), IntegratorMode::kOccupancy);
  EXPECT_EQ(stats.rays_processed, 1u);
  EXPECT_EQ(stats.unprefetched_visits, 0u);
  const float miss = static_cast<float>(std::log(0.4 / 0.6));
  const float hit = static_cast<float>(std::log(0.7 / 0.3));
  for (int i = 0; i < 3; ++i)
  {
    EXPECT_FLOAT_EQ(*occupancyAt(map, keyAt(0.05 + 0.1 * i, 0.05, 0.05, cfg)), miss);
  }
  const VoxelKey end = keyAt(0.35, 0.05, 0.05, cfg);
  EXPECT_FLOAT_EQ(*occupancyAt(map, end), hit);
  EXPECT_EQ(meanAt(map, end)->count, 1u);
  EXPECT_EQ(occupancyState(map, end), OccupancyState::kOccupied);
  EXPECT_EQ(occupancyState(map, keyAt(0.05, 0.05, 0.05, cfg)), OccupancyState::kFree);
  EXPECT_EQ(occupancyState(map, keyAt(0.45, 0.05, 0.05, cfg)), OccupancyState::kUnknown);
  EXPECT_EQ(occupancyState(map, keyAt(50.0, 0.0, 0.0, cfg)), OccupancyState::kUnknown);
}

TEST(OccupancyIntegration, MissOnlyRayHasNoHit)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  const RaySample r = ray(Eigen::Vector3d(0.05, 0.05, 0.05), Eigen::Vector3d(0.35, 0.05, 0.05), false);
  sequentialReference(map, std::span(&r, 1), IntegratorMode::kOccupancy);
  EXPECT_LT(*occupancyAt(map, keyAt(0.35, 0.05, 0.05, cfg)), 0.0f);
  EXPECT_EQ(meanAt(map, keyAt(0.35, 0.05, 0.05, cfg))->count, 0u);
}

TEST(OccupancyIntegration, EmptyBatchLeavesMapUnchanged)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  const BatchStats stats = submitBatch(map, std::span<const RaySample>(), IntegratorMode::kOccupancy);
  EXPECT_EQ(stats.rays_in, 0u);
  EXPECT_EQ(map.regionCount(), 0u);
}

TEST(OccupancyIntegration, NonFiniteRaysSkipped)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  std::vector<RaySample> rays{ ray(Eigen::Vector3d::Zero(), Eigen::Vector3d(NAN, 0, 0)),
                               ray(Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0)) };
  const BatchStats stats = sequentialReference(map, rays, IntegratorMode::kOccupancy);
  EXPECT_EQ(stats.rays_skipped, 1u);
  EXPECT_EQ(stats.rays_processed, 1u);
}

TEST(OccupancyIntegration, LongRaySegmentsMatchUnsegmentedEvidence)
{
  // Segmenting must not double count seam voxels: each crossed voxel gets exactly one miss.
  MapConfig cfg;
  cfg.max_ray_range = 100.0;
  cfg.segment_length = 0.73;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  const RaySample r = ray(Eigen::Vector3d(0.05, 0.05, 0.05), Eigen::Vector3d(5.05 - 1e-3, 0.05, 0.05));
  sequentialReference(map, std::span(&r, 1), IntegratorMode::kOccupancy);
  const float miss = static_cast<float>(missDelta(cfg));
  for (int i = 0; i < 50; ++i)
  {
    const VoxelKey k = keyAt(0.05 + 0.1 * i, 0.05, 0.05, cfg);
    if (k == keyForPoint(r.end, cfg))
    {
      EXPECT_FLOAT_EQ(*occupancyAt(map, k), static_cast<float>(hitDelta(cfg)));
    }
    else
    {
      EXPECT_FLOAT_EQ(*occupancyAt(map, k), miss) << i;
    }
  }
}

TEST(OccupancyIntegration, RayOrderDoesNotMatterWithoutClamping)
{
  MapConfig cfg;
  cfg.clamp_min = -1e6;
  cfg.clamp_max = 1e6;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  std::vector<RaySample> rays;
  for (int i = 0; i < 300; ++i)
  {
    rays.push_back(ray(Eigen::Vector3d(pos(rng), pos(rng), pos(rng)), Eigen::Vector3d(pos(rng), pos(rng), pos(rng))));
  }
  OccupancyMap a(cfg, defaultLayers(IntegratorMode::kOccupancy));
  sequentialReference(a, rays, IntegratorMode::kOccupancy);
  std::shuffle(rays.begin(), rays.end(), rng);
  OccupancyMap b(cfg, defaultLayers(IntegratorMode::kOccupancy));
  sequentialReference(b, rays, IntegratorMode::kOccupancy);
  ASSERT_EQ(a.sortedRegionCoords(), b.sortedRegionCoords());
  a.forEachRegion([&](const Region &ra) {
    const Region *rb = b.residentRegion(ra.coord);
    for (std::size_t i = 0; i < ra.occupancy.size(); ++i)
    {
      ASSERT_NEAR(ra.occupancy[i], rb->occupancy[i], 1e-4);
      ASSERT_EQ(ra.mean[i].count, rb->mean[i].count);
    }
  });
}

TEST(OccupancyIntegration, DoubledBatchDoublesEvidence)
{
  MapConfig cfg;
  cfg.clamp_min = -1e6;
  cfg.clamp_max = 1e6;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::vector<RaySample> rays;
  for (int i = 0; i < 100; ++i)
  {
    rays.push_back(ray(Eigen::Vector3d(pos(rng), pos(rng), pos(rng)), Eigen::Vector3d(pos(rng), pos(rng), pos(rng))));
  }
  OccupancyMap once(cfg, defaultLayers(IntegratorMode::kOccupancy));
  sequentialReference(once, rays, IntegratorMode::kOccupancy);
  OccupancyMap twice(cfg, defaultLayers(IntegratorMode::kOccupancy));
  sequentialReference(twice, rays, IntegratorMode::kOccupancy);
  sequentialReference(twice, rays, IntegratorMode::kOccupancy);
  once.forEachRegion([&](const Region &r1) {
    const Region *r2 = twice.residentRegion(r1.coord);
    for (std::size_t i = 0; i < r1.occupancy.size(); ++i)
    {
      ASSERT_NEAR(r2->occupancy[i], 2.0f * r1.occupancy[i], 1e-3);
    }
  });
}

TEST(DecayIntegration, PathLengthsAndHitsMatchIntervalOracle)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kDecay));
  // Rays along +x through the row y = z = 0.05, each from a different start to a different end.
  const double starts[] = { 0.01, 0.02, 0.13, 0.05, 0.0, 0.31, 0.07, 0.11, 0.04, 0.26 };
  const double ends[] = { 0.57, 0.35, 0.42, 0.95, 0.19, 0.78, 0.66, 0.23, 0.88, 0.51 };
  std::vector<RaySample> rays;
  for (int i = 0; i < 10; ++i)
  {
    rays.push_back(ray(Eigen::Vector3d(starts[i], 0.05, 0.05), Eigen::Vector3d(ends[i], 0.05, 0.05)));
  }
  sequentialReference(map, rays, IntegratorMode::kDecay);
  for (int v = 0; v < 10; ++v)
  {
    const double lo = 0.1 * v;
    const double hi = 0.1 * (v + 1);
    double d = 0.0;
    std::uint32_t h = 0;
    for (int i = 0; i < 10; ++i)
    {
      d += std::max(0.0, std::min(hi, ends[i]) - std::max(lo, starts[i]));
      h += (ends[i] >= lo && ends[i] < hi) ? 1 : 0;
    }
    const auto voxel = decayAt(map, keyAt(lo + 0.05, 0.05, 0.05, cfg));
    ASSERT_TRUE(voxel.has_value());
    EXPECT_EQ(voxel->hits, h) << v;
    EXPECT_NEAR(voxel->distance_sum, d, 1e-12) << v;
    if (d > 0.0)
    {
      EXPECT_NEAR(*decayRate(*voxel), h / d, 1e-9 * (h / d + 1e-300)) << v;
    }
  }
}

TEST(DecayIntegration, RequiresDecayLayer)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, LayerSet{ Layer::kOccupancy });
  const RaySample r = ray(Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0));
  EXPECT_THROW(submitBatch(map, std::span(&r, 1), IntegratorMode::kDecay), ConfigError);
  EXPECT_EQ(map.regionCount(), 0u);
}
}  // namespace
