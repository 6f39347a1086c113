#include "occmap/Ndt.h"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace occmap
{
Eigen::Matrix3d covarianceSqrt(const NdtCovariance &cov)
{
  const auto &s = cov.sqrt;
  Eigen::Matrix3d m;
  m << s[0], 0.0, 0.0,  //
    s[1], s[2], 0.0,    //
    s[3], s[4], s[5];
  return m;
}


Eigen::Matrix3d covarianceMatrix(const NdtCovariance &cov)
{
  const Eigen::Matrix3d s = covarianceSqrt(cov);
  return s * s.transpose();
}


void ndtAddSample(NdtCovariance &cov, std::uint32_t count, const Eigen::Vector3d &sample)
{
  const double n = static_cast<double>(count) + 1.0;
  const Eigen::Vector3d mean = ndtMean(cov);
  if (count == 0)
  {
    cov.sqrt.fill(0.0);
    cov.mean = { sample.x(), sample.y(), sample.z() };
    return;
  }

  const Eigen::Vector3d offset = sample - mean;
  const Eigen::Vector3d new_mean = mean + offset / n;
  cov.mean = { new_mean.x(), new_mean.y(), new_mean.z() };

  // Work on U = S^T (upper triangular): Sigma' = U'^T U' where U' is the R factor of [sqrt(a) U; sqrt(b) d^T].
  const double scale = std::sqrt((n - 1.0) / n);
  Eigen::Matrix3d upper = covarianceSqrt(cov).transpose() * scale;
  Eigen::Vector3d w = offset * (std::sqrt(n - 1.0) / n);

  for (int k = 0; k < 3; ++k)
  {
    const double r = std::hypot(upper(k, k), w[k]);
    if (r == 0.0)
    {
      continue;
    }
    const double c = upper(k, k) / r;
    const double s = w[k] / r;
    upper(k, k) = r;
    for (int j = k + 1; j < 3; ++j)
    {
      const double u = upper(k, j);
      upper(k, j) = c * u + s * w[j];
      w[j] = c * w[j] - s * u;
    }
    w[k] = 0.0;
  }

  cov.sqrt = { upper(0, 0), upper(0, 1), upper(1, 1), upper(0, 2), upper(1, 2), upper(2, 2) };
}


double ndtClosestMahalanobisSq(const NdtCovariance &cov, const Eigen::Vector3d &origin, const Eigen::Vector3d &end,
                               double sensor_noise)
{
  const Eigen::Matrix3d regularised =
    covarianceMatrix(cov) + Eigen::Matrix3d::Identity() * (sensor_noise * sensor_noise);
  const Eigen::LLT<Eigen::Matrix3d> llt(regularised);
  const Eigen::Vector3d mean = ndtMean(cov);
  const Eigen::Vector3d dir = end - origin;
  const Eigen::Vector3d a_dir = llt.solve(dir);

  // Minimise (o + t d - mu)^T A (o + t d - mu) over t in [0, 1].
  double t = 0.0;
  const double denom = dir.dot(a_dir);
  if (denom > 0.0)
  {
    t = std::clamp(a_dir.dot(mean - origin) / denom, 0.0, 1.0);
  }
  const Eigen::Vector3d offset = origin + t * dir - mean;
  return offset.dot(llt.solve(offset));
}


double ndtMissScale(const NdtCovariance &cov, std::uint32_t count, const Eigen::Vector3d &origin,
                    const Eigen::Vector3d &end, const MapConfig &cfg)
{
  if (count < kNdtMinMissSamples)
  {
    return 1.0;
  }
  const double m2 = ndtClosestMahalanobisSq(cov, origin, end, cfg.ndt_sensor_noise);
  return std::clamp(std::exp(-0.5 * m2), 0.0, 1.0);
}


void ndtTmCountsUpdate(TraversalVoxel &voxel, RayEvent event, double miss_scale, const MapConfig &cfg)
{
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (event == RayEvent::kHit)
  {
    voxel.hits += voxel.hits < kMax ? 1u : 0u;
  }
  else if (miss_scale >= cfg.ndt_miss_check_threshold)
  {
    voxel.misses += voxel.misses < kMax ? 1u : 0u;
  }
}


std::optional<double> permeability(const TraversalVoxel &voxel)
{
  const double total = static_cast<double>(voxel.hits) + static_cast<double>(voxel.misses);
  if (total <= 0.0)
  {
    return std::nullopt;
  }
  return static_cast<double>(voxel.hits) / total;
}


void intensityUpdate(TraversalVoxel &voxel, double intensity)
{
  if (voxel.intensity_count == std::numeric_limits<std::uint32_t>::max())
  {
    return;
  }
  ++voxel.intensity_count;
  const double delta = intensity - voxel.intensity_mean;
  voxel.intensity_mean += delta / static_cast<double>(voxel.intensity_count);
  voxel.intensity_m2 += delta * (intensity - voxel.intensity_mean);
}


std::optional<std::pair<double, double>> intensityStats(const TraversalVoxel &voxel)
{
  if (voxel.intensity_count == 0)
  {
    return std::nullopt;
  }
  return std::make_pair(voxel.intensity_mean,
                        std::max(0.0, voxel.intensity_m2 / static_cast<double>(voxel.intensity_count)));
}


bool maybeResetNdt(float log_odds, VoxelMean &mean, NdtCovariance &cov, TraversalVoxel *traversal,
                   const MapConfig &cfg)
{
  if (!(static_cast<double>(log_odds) < cfg.ndt_reset_threshold))
  {
    return false;
  }
  mean = VoxelMean{};
  cov = NdtCovariance{};
  if (traversal)
  {
    *traversal = TraversalVoxel{};
  }
  return true;
}
}  // namespace occmap
