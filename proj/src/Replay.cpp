#include "occmap/Replay.h"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace occmap
{
namespace
{
using Clock = std::chrono::steady_clock;

/// Bounded single-producer/single-consumer hand-off. tryPush never blocks.
class BatchQueue
{
public:
  explicit BatchQueue(std::size_t capacity)
    : capacity_(capacity)
  {}

  bool tryPush(std::size_t batch)
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (queue_.size() >= capacity_)
    {
      return false;
    }
    queue_.push_back(batch);
    ready_.notify_one();
    return true;
  }

  void close()
  {
    std::lock_guard<std::mutex> lock(mutex_);
    closed_ = true;
    ready_.notify_all();
  }

  std::optional<std::size_t> pop()
  {
    std::unique_lock<std::mutex> lock(mutex_);
    ready_.wait(lock, [this] { return closed_ || !queue_.empty(); });
    if (queue_.empty())
    {
      return std::nullopt;
    }
    const std::size_t batch = queue_.front();
    queue_.pop_front();
    return batch;
  }

private:
  std::size_t capacity_;
  std::deque<std::size_t> queue_;
  bool closed_ = false;
  std::mutex mutex_;
  std::condition_variable ready_;
};

ReplaySample &bucketFor(std::vector<ReplaySample> &series, double start_time, double batch_time)
{
  const auto second = static_cast<std::size_t>(std::max(0.0, std::floor(batch_time - start_time)));
  while (series.size() <= second)
  {
    ReplaySample s;
    s.time = static_cast<double>(series.size());
    series.push_back(s);
  }
  return series[second];
}
}  // namespace

std::vector<std::span<const RaySample>> splitBatches(std::span<const RaySample> rays, double batch_duration)
{
  std::vector<std::span<const RaySample>> batches;
  if (rays.empty())
  {
    return batches;
  }
  const double start = rays.front().timestamp;
  std::size_t begin = 0;
  std::int64_t current = 0;
  for (std::size_t i = 0; i < rays.size(); ++i)
  {
    const auto slot = static_cast<std::int64_t>(std::floor((rays[i].timestamp - start) / batch_duration));
    if (slot != current)
    {
      if (i > begin)
      {
        batches.push_back(rays.subspan(begin, i - begin));
      }
      begin = i;
      current = slot;
    }
  }
  batches.push_back(rays.subspan(begin));
  return batches;
}


ReplayResult replay(OccupancyMap &map, std::span<const RaySample> rays, const ReplayOptions &opts)
{
  if (!(opts.batch_duration > 0.0) || !(opts.speed > 0.0) || opts.queue_capacity == 0)
  {
    throw ConfigError("invalid replay options");
  }
  requireLayers(map, opts.mode);

  ReplayResult result;
  ReplaySummary &summary = result.summary;
  summary.mode = std::string(modeName(opts.mode));
  summary.workers = opts.executor.worker_count;
  summary.online = opts.online;
  summary.rays_in = rays.size();

  const auto batches = splitBatches(rays, opts.batch_duration);
  const double start_time = rays.empty() ? 0.0 : rays.front().timestamp;

  const auto integrate = [&](std::size_t b) {
    const BatchStats stats = submitBatch(map, batches[b], opts.mode, opts.executor);
    ReplaySample &bucket = bucketFor(result.series, start_time, batches[b].front().timestamp);
    bucket.rays_processed += stats.rays_processed;
    bucket.integration_time += stats.wall_time;
    summary.rays_processed += stats.rays_processed;
    summary.cas_retries += stats.cas_retries;
    summary.cas_failures += stats.cas_failures;
    summary.integration_time += stats.wall_time;
  };

  for (const auto &batch : batches)
  {
    bucketFor(result.series, start_time, batch.front().timestamp).rays_in += batch.size();
  }

  const auto wall_start = Clock::now();
  if (!opts.online)
  {
    for (std::size_t b = 0; b < batches.size(); ++b)
    {
      integrate(b);
    }
  }
  else
  {
    BatchQueue queue(opts.queue_capacity);
    std::vector<std::size_t> dropped;
    std::thread producer([&] {
      for (std::size_t b = 0; b < batches.size(); ++b)
      {
        // A batch becomes available once its last ray has been "sensed".
        const double due = (batches[b].back().timestamp - start_time) / opts.speed;
        std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<Clock::duration>(
                                                     std::chrono::duration<double>(due)));
        if (!queue.tryPush(b))
        {
          dropped.push_back(b);
        }
      }
      queue.close();
    });
    while (const auto b = queue.pop())
    {
      integrate(*b);
    }
    producer.join();
    for (std::size_t b : dropped)
    {
      bucketFor(result.series, start_time, batches[b].front().timestamp).rays_dropped += batches[b].size();
      summary.rays_dropped += batches[b].size();
    }
  }
  summary.wall_time = std::chrono::duration<double>(Clock::now() - wall_start).count();

  summary.drop_percent =
    summary.rays_in > 0 ? 100.0 * static_cast<double>(summary.rays_dropped) / static_cast<double>(summary.rays_in) :
                          0.0;
  summary.mean_rays_per_second =
    summary.integration_time > 0.0 ? static_cast<double>(summary.rays_processed) / summary.integration_time : 0.0;
  for (ReplaySample &s : result.series)
  {
    s.rays_per_second = s.integration_time > 0.0 ? static_cast<double>(s.rays_processed) / s.integration_time : 0.0;
  }
  return result;
}


std::string ReplaySummary::csvHeader()
{
  return "mode,workers,online,rays_in,rays_processed,rays_dropped,drop_percent,cas_retries,cas_failures,"
         "integration_time_s,wall_time_s,mean_rays_per_second";
}


std::string ReplaySummary::csvRow() const
{
  std::ostringstream out;
  out << mode << ',' << workers << ',' << (online ? 1 : 0) << ',' << rays_in << ',' << rays_processed << ','
      << rays_dropped << ',' << std::fixed << std::setprecision(3) << drop_percent << ',' << cas_retries << ','
      << cas_failures << ',' << std::setprecision(6) << integration_time << ',' << wall_time << ','
      << std::setprecision(1) << mean_rays_per_second;
  return out.str();
}


std::string seriesCsvHeader()
{
  return "time_s,rays_in,rays_processed,rays_dropped,integration_time_s,rays_per_second";
}


std::string seriesCsvRow(const ReplaySample &s)
{
  std::ostringstream out;
  out << std::fixed << std::setprecision(1) << s.time << ',' << s.rays_in << ',' << s.rays_processed << ','
      << s.rays_dropped << ',' << std::setprecision(6) << s.integration_time << ',' << std::setprecision(1)
      << s.rays_per_second;
  return out.str();
}
}  // namespace occmap
