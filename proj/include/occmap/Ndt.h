#ifndef OCCMAP_NDT_H
#define OCCMAP_NDT_H

#include "Layers.h"
#include "MapConfig.h"

#include <Eigen/Core>

#include <optional>
#include <utility>

namespace occmap
{
/// Minimum sample count before a voxel Gaussian is trusted to scale miss updates.
constexpr std::uint32_t kNdtMinMissSamples = 3;

inline Eigen::Vector3d ndtMean(const NdtCovariance &cov)
{
  return Eigen::Vector3d(cov.mean[0], cov.mean[1], cov.mean[2]);
}

/// Lower-triangular factor S from the packed (s11, s21, s22, s31, s32, s33) layout.
Eigen::Matrix3d covarianceSqrt(const NdtCovariance &cov);
/// Sigma = S S^T.
Eigen::Matrix3d covarianceMatrix(const NdtCovariance &cov);

/// Add one sample to a voxel Gaussian holding @p count samples (population statistics). On return the mean
/// and square-root factor describe count + 1 samples; the caller advances the count.
///
/// The covariance recursion Sigma' = a Sigma + b d d^T, with a = (n-1)/n, b = (n-1)/n^2 and d the offset from
/// the previous mean, is applied directly to S: scale by sqrt(a), then a Givens rank-one update with
/// sqrt(b) d. The diagonal of S stays non-negative and Sigma stays PSD by construction.
void ndtAddSample(NdtCovariance &cov, std::uint32_t count, const Eigen::Vector3d &sample);

/// Likelihood scale g in [0, 1] for a miss: the voxel Gaussian (regularised by sensor noise) evaluated at the
/// segment point of highest likelihood. Returns 1 while the voxel holds fewer than kNdtMinMissSamples samples.
double ndtMissScale(const NdtCovariance &cov, std::uint32_t count, const Eigen::Vector3d &origin,
                    const Eigen::Vector3d &end, const MapConfig &cfg);

/// Squared Mahalanobis distance of the closest segment point under Sigma + noise^2 I.
double ndtClosestMahalanobisSq(const NdtCovariance &cov, const Eigen::Vector3d &origin, const Eigen::Vector3d &end,
                               double sensor_noise);

enum class RayEvent
{
  kHit,
  kMiss,
};

/// NDT-TM hit/miss counters. Hits always count; a miss only counts when the ray interrogated the
/// voxel's point mass (miss_scale >= ndt_miss_check_threshold). Counters saturate.
void ndtTmCountsUpdate(TraversalVoxel &voxel, RayEvent event, double miss_scale, const MapConfig &cfg);

/// H / (H + M); nullopt before any counted event.
std::optional<double> permeability(const TraversalVoxel &voxel);

void intensityUpdate(TraversalVoxel &voxel, double intensity);
/// (mean, population variance); nullopt without samples.
std::optional<std::pair<double, double>> intensityStats(const TraversalVoxel &voxel);

/// Clear sample statistics once occupancy drops below ndt_reset_threshold. Occupancy itself is kept.
/// Returns true when a reset happened. @p traversal may be null for NDT-OM maps.
bool maybeResetNdt(float log_odds, VoxelMean &mean, NdtCovariance &cov, TraversalVoxel *traversal,
                   const MapConfig &cfg);
}  // namespace occmap

#endif  // OCCMAP_NDT_H
