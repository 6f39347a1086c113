#include "Fixtures.h"
#include "Oracles.h"

#include <occmap/Ndt.h>
#include <occmap/Occupancy.h>
#include <occmap/UpdateEngine.h>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace
{
using namespace occmap;

NdtCovariance isotropic(double sigma, const Eigen::Vector3d &mean)
{
  NdtCovariance c;
  c.sqrt = { sigma, 0.0, sigma, 0.0, 0.0, sigma };
  c.mean = { mean.x(), mean.y(), mean.z() };
  return c;
}

double relativeFrobenius(const Eigen::Matrix3d &a, const Eigen::Matrix3d &b)
{
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

TEST(NdtMissScale, RayThroughMeanIsOne)
{
  const MapConfig cfg;
  const NdtCovariance c = isotropic(0.02, Eigen::Vector3d(1.0, 1.0, 1.0));
  EXPECT_NEAR(ndtMissScale(c, 5, Eigen::Vector3d(0, 1, 1), Eigen::Vector3d(2, 1, 1), cfg), 1.0, 1e-12);
}

TEST(NdtMissScale, ThreeSigmaOffset)
{
  const MapConfig cfg;
  // sigma^2 + noise^2 = 0.0075 + 0.0025 = 0.01, so a 0.3 m offset is three standard deviations.
  const NdtCovariance c = isotropic(std::sqrt(0.0075), Eigen::Vector3d::Zero());
  const double m2 = ndtClosestMahalanobisSq(c, Eigen::Vector3d(-1, 0.3, 0), Eigen::Vector3d(1, 0.3, 0), 0.05);
  EXPECT_NEAR(m2, 9.0, 1e-9);
  EXPECT_NEAR(ndtMissScale(c, 3, Eigen::Vector3d(-1, 0.3, 0), Eigen::Vector3d(1, 0.3, 0), cfg), std::exp(-4.5),
              1e-9);
}

TEST(NdtMissScale, ClosestPointClampedToSegment)
{
  // The segment stops 0.4 m short of the mean along x.
  const NdtCovariance c = isotropic(std::sqrt(0.0075), Eigen::Vector3d::Zero());
  const double m2 = ndtClosestMahalanobisSq(c, Eigen::Vector3d(-1, 0.3, 0), Eigen::Vector3d(-0.4, 0.3, 0), 0.05);
  EXPECT_NEAR(m2, (0.16 + 0.09) / 0.01, 1e-9);
}

TEST(NdtMissScale, FallsBackBelowMinimumSamples)
{
  const MapConfig cfg;
  const NdtCovariance c = isotropic(0.001, Eigen::Vector3d::Zero());
  EXPECT_EQ(ndtMissScale(c, 1, Eigen::Vector3d(-1, 5, 0), Eigen::Vector3d(1, 5, 0), cfg), 1.0);
  EXPECT_EQ(ndtMissScale(c, 2, Eigen::Vector3d(-1, 5, 0), Eigen::Vector3d(1, 5, 0), cfg), 1.0);
  EXPECT_LT(ndtMissScale(c, 3, Eigen::Vector3d(-1, 5, 0), Eigen::Vector3d(1, 5, 0), cfg), 1e-6);
}

TEST(NdtCovariance, FirstSampleSetsMeanWithZeroCovariance)
{
  NdtCovariance c;
  ndtAddSample(c, 0, Eigen::Vector3d(0.1, 0.2, 0.3));
  EXPECT_TRUE(ndtMean(c).isApprox(Eigen::Vector3d(0.1, 0.2, 0.3)));
  EXPECT_EQ(covarianceMatrix(c).norm(), 0.0);
}

TEST(NdtCovariance, TwoSamples)
{
  NdtCovariance c;
  ndtAddSample(c, 0, Eigen::Vector3d(0.0, 0.0, 0.0));
  ndtAddSample(c, 1, Eigen::Vector3d(0.02, 0.0, 0.0));
  const Eigen::Matrix3d s = covarianceMatrix(c);
  EXPECT_NEAR(ndtMean(c).x(), 0.01, 1e-15);
  EXPECT_NEAR(s(0, 0), 1e-4, 1e-15);
  EXPECT_NEAR(s(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-15);
}

TEST(NdtCovariance, HundredSamplesMatchBatchOracle)
{
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3d shape;
  shape << 0.03, 0.0, 0.0, 0.01, 0.005, 0.0, -0.004, 0.002, 0.001;
  const Eigen::Vector3d centre(4.05, -2.15, 0.95);
  NdtCovariance c;
  std::vector<Eigen::Vector3d> samples;
  for (std::uint32_t i = 0; i < 100; ++i)
  {
    samples.push_back(centre + shape * Eigen::Vector3d(n(rng), n(rng), n(rng)));
    ndtAddSample(c, i, samples.back());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(covarianceMatrix(c));
    ASSERT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
  const auto [mean, cov] = oracle::batchMeanCovariance(samples);
  EXPECT_LE((ndtMean(c) - mean).norm(), 1e-12);
  EXPECT_LE(relativeFrobenius(covarianceMatrix(c), cov), 1e-5);
}

TEST(NdtCovariance, PlanarSamplesStayPsd)
{
  // Degenerate (rank 2) sample set.
  NdtCovariance c;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::vector<Eigen::Vector3d> samples;
  for (std::uint32_t i = 0; i < 500; ++i)
  {
    samples.emplace_back(u(rng), u(rng), 0.5);
    ndtAddSample(c, i, samples.back());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(covarianceMatrix(c));
    ASSERT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
  EXPECT_LE(relativeFrobenius(covarianceMatrix(c), oracle::batchMeanCovariance(samples).second), 1e-5);
}

TEST(NdtCovariance, SampleOrderOnlyAffectsRounding)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  std::vector<Eigen::Vector3d> samples;
  for (int i = 0; i < 200; ++i)
  {
    samples.emplace_back(u(rng), u(rng), u(rng));
  }
  NdtCovariance a;
  for (std::uint32_t i = 0; i < samples.size(); ++i)
  {
    ndtAddSample(a, i, samples[i]);
  }
  std::shuffle(samples.begin(), samples.end(), rng);
  NdtCovariance b;
  for (std::uint32_t i = 0; i < samples.size(); ++i)
  {
    ndtAddSample(b, i, samples[i]);
  }
  EXPECT_LE(relativeFrobenius(covarianceMatrix(a), covarianceMatrix(b)), 1e-9);
}

TEST(NdtTm, CountsAndPermeability)
{
  const MapConfig cfg;
  TraversalVoxel v;
  EXPECT_FALSE(permeability(v).has_value());
  for (int i = 0; i < 3; ++i)
  {
    ndtTmCountsUpdate(v, RayEvent::kHit, 1.0, cfg);
  }
  ndtTmCountsUpdate(v, RayEvent::kMiss, 0.9, cfg);
  ndtTmCountsUpdate(v, RayEvent::kMiss, 0.1, cfg);
  EXPECT_EQ(v.hits, 3u);
  EXPECT_EQ(v.misses, 1u);
  EXPECT_DOUBLE_EQ(*permeability(v), 0.75);
  // Exactly at the threshold counts.
  ndtTmCountsUpdate(v, RayEvent::kMiss, cfg.ndt_miss_check_threshold, cfg);
  EXPECT_EQ(v.misses, 2u);
}

TEST(NdtTm, IntensityMoments)
{
  TraversalVoxel v;
  EXPECT_FALSE(intensityStats(v).has_value());
  intensityUpdate(v, 10.0);
  intensityUpdate(v, 20.0);
  const auto [mean, var] = *intensityStats(v);
  EXPECT_DOUBLE_EQ(mean, 15.0);
  EXPECT_DOUBLE_EQ(var, 25.0);
}

TEST(NdtTm, IntensityMomentsMatchTwoPass)
{
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(1000.0, 0.5);
  TraversalVoxel v;
  std::vector<double> values;
  for (int i = 0; i < 5000; ++i)
  {
    values.push_back(n(rng));
    intensityUpdate(v, values.back());
  }
  const auto [mean, var] = oracle::twoPassMoments(values);
  EXPECT_NEAR(intensityStats(v)->first, mean, 1e-9);
  EXPECT_NEAR(intensityStats(v)->second, var, 1e-9);
}

TEST(NdtReset, ClearsStatisticsBelowThreshold)
{
  const MapConfig cfg;
  VoxelMean mean{ 123, 9 };
  NdtCovariance cov = isotropic(0.01, Eigen::Vector3d(1, 2, 3));
  TraversalVoxel trav{ .hits = 4, .misses = 5, .intensity_count = 1, .intensity_mean = 3.0 };
  EXPECT_FALSE(maybeResetNdt(-0.5f, mean, cov, &trav, cfg));
  EXPECT_EQ(mean.count, 9u);
  EXPECT_TRUE(maybeResetNdt(-1.5f, mean, cov, &trav, cfg));
  EXPECT_EQ(mean.count, 0u);
  EXPECT_EQ(cov.sqrt[0], 0.0);
  EXPECT_EQ(trav.hits, 0u);
  EXPECT_EQ(trav.misses, 0u);
}

TEST(NdtIntegration, RequiresCovarianceLayer)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kOccupancy));
  const auto rays = fixture::boxRays(10, 1);
  EXPECT_THROW(submitBatch(map, rays, IntegratorMode::kNdtOm), ConfigError);
  OccupancyMap om(cfg, defaultLayers(IntegratorMode::kNdtOm));
  EXPECT_THROW(submitBatch(om, rays, IntegratorMode::kNdtTm), ConfigError);
}

TEST(NdtIntegration, HitsBuildVoxelGaussian)
{
  const MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kNdtTm));
  std::mt19937_64 rng(6);
  std::vector<RaySample> rays;
  std::vector<Eigen::Vector3d> ends;
  for (int i = 0; i < 50; ++i)
  {
    rays.push_back(fixture::poleHit(rng));
    ends.push_back(rays.back().end);
  }
  sequentialReference(map, rays, IntegratorMode::kNdtTm);
  const VoxelKey key = keyForPoint(fixture::kPoleVoxelCentre, cfg);
  const VoxelRef ref = findVoxel(map, key);
  ASSERT_TRUE(ref);
  EXPECT_EQ(ref.region->mean[ref.index].count, 50u);
  EXPECT_EQ(ref.region->traversal[ref.index].hits, 50u);
  EXPECT_EQ(ref.region->traversal[ref.index].misses, 0u);
  EXPECT_FLOAT_EQ(ref.region->occupancy[ref.index], static_cast<float>(cfg.clamp_max));
  const auto [mean, cov] = oracle::batchMeanCovariance(ends);
  EXPECT_LE((ndtMean(ref.region->covariance[ref.index]) - mean).norm(), 1e-12);
  EXPECT_LE(relativeFrobenius(covarianceMatrix(ref.region->covariance[ref.index]), cov), 1e-5);
  EXPECT_DOUBLE_EQ(intensityStats(ref.region->traversal[ref.index])->first, 40.0);
}

TEST(NdtIntegration, ResetClearsErodedVoxel)
{
  MapConfig cfg;
  OccupancyMap map(cfg, defaultLayers(IntegratorMode::kNdtTm));
  std::mt19937_64 rng(6);
  std::vector<RaySample> hits;
  for (int i = 0; i < 2; ++i)
  {
    hits.push_back(fixture::poleHit(rng));
  }
  sequentialReference(map, hits, IntegratorMode::kNdtTm);
  // With fewer than three samples misses are unscaled, so direct pass-throughs drive the voxel down.
  std::vector<RaySample> misses;
  for (int i = 0; i < 20; ++i)
  {
    RaySample r;
    r.origin = Eigen::Vector3d(0.55, 0.0, 1.05);
    r.end = Eigen::Vector3d(0.55, 3.0, 1.05);
    r.has_sample = false;
    misses.push_back(r);
  }
  sequentialReference(map, misses, IntegratorMode::kNdtTm);
  const VoxelRef ref = findVoxel(map, keyForPoint(fixture::kPoleVoxelCentre, cfg));
  EXPECT_LT(ref.region->occupancy[ref.index], cfg.ndt_reset_threshold);
  EXPECT_EQ(ref.region->mean[ref.index].count, 0u);
  EXPECT_EQ(ref.region->traversal[ref.index].hits, 0u);
}

TEST(NdtIntegration, ResistsErosionOnThinPole)
{
  const MapConfig cfg;
  OccupancyMap plain(cfg, defaultLayers(IntegratorMode::kOccupancy));
  OccupancyMap ndt(cfg, defaultLayers(IntegratorMode::kNdtOm));
  const VoxelKey key = keyForPoint(fixture::kPoleVoxelCentre, cfg);
  const float threshold = static_cast<float>(probabilityToLogOdds(cfg.occupied_threshold));
  bool plain_dropped = false;
  for (const auto &batch : fixture::thinPoleScript())
  {
    sequentialReference(plain, batch, IntegratorMode::kOccupancy);
    sequentialReference(ndt, batch, IntegratorMode::kNdtOm);
    plain_dropped = plain_dropped || *occupancyAt(plain, key) <= threshold;
    ASSERT_GT(*occupancyAt(ndt, key), threshold);
  }
  EXPECT_TRUE(plain_dropped);
  EXPECT_GT(*occupancyAt(ndt, key), *occupancyAt(plain, key));
}

TEST(NdtIntegration, ParallelMatchesSequentialForAnyWorkerCount)
{
  const MapConfig cfg;
  const auto rays = fixture::boxRays(3000, 21, 0.5, 3.0);
  OccupancyMap reference(cfg, defaultLayers(IntegratorMode::kNdtTm));
  sequentialReference(reference, rays, IntegratorMode::kNdtTm);
  for (unsigned workers : { 1u, 3u, 8u })
  {
    OccupancyMap map(cfg, defaultLayers(IntegratorMode::kNdtTm));
    ExecutorOptions opts;
    opts.worker_count = workers;
    const BatchStats stats = submitBatch(map, rays, IntegratorMode::kNdtTm, opts);
    EXPECT_EQ(stats.unprefetched_visits, 0u);
    ASSERT_EQ(map.sortedRegionCoords(), reference.sortedRegionCoords());
    reference.forEachRegion([&](const Region &r) {
      const Region *p = map.residentRegion(r.coord);
      for (std::size_t i = 0; i < r.occupancy.size(); ++i)
      {
        ASSERT_NEAR(p->occupancy[i], r.occupancy[i], 1e-4) << workers;
        ASSERT_EQ(p->mean[i].count, r.mean[i].count);
        ASSERT_EQ(p->mean[i].coord, r.mean[i].coord);
        ASSERT_EQ(p->covariance[i].sqrt, r.covariance[i].sqrt);
        ASSERT_EQ(p->traversal[i].hits, r.traversal[i].hits);
        ASSERT_EQ(p->traversal[i].misses, r.traversal[i].misses);
      }
    });
  }
}
}  // namespace
