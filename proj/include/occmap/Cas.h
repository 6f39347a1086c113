#ifndef OCCMAP_CAS_H
#define OCCMAP_CAS_H

#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <type_traits>

namespace occmap
{
struct CasCounters
{
  std::uint64_t retries = 0;
  std::uint64_t failures = 0;
};

namespace detail
{
std::mutex &casFallbackMutex();
}

/// Voxel write policy for concurrent workers. Every update is a read-compute-swap loop on one 32 or 64-bit
/// word. After `retry_limit` failed swaps the update moves to a serialised path that keeps retrying under a
/// global lock, so evidence is never dropped; such updates are counted as failures.
class AtomicAccess
{
public:
  AtomicAccess(unsigned retry_limit, CasCounters &counters)
    : retry_limit_(retry_limit)
    , counters_(counters)
  {}

  static constexpr bool kConcurrent = true;

  template <typename T>
  T load(T &target) const
  {
    return std::atomic_ref<T>(target).load(std::memory_order_relaxed);
  }

  /// Replace @p target with fn(current) atomically. Returns the value written.
  template <typename T, typename Fn>
  T update(T &target, Fn &&fn)
  {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8, "CAS updates are limited to 32/64-bit words");
    static_assert(std::atomic_ref<T>::is_always_lock_free);
    std::atomic_ref<T> ref(target);
    T current = ref.load(std::memory_order_relaxed);
    for (unsigned attempt = 0; attempt < retry_limit_; ++attempt)
    {
      const T next = fn(current);
      if (ref.compare_exchange_weak(current, next, std::memory_order_relaxed))
      {
        return next;
      }
      ++counters_.retries;
    }

    ++counters_.failures;
    std::lock_guard<std::mutex> guard(detail::casFallbackMutex());
    current = ref.load(std::memory_order_relaxed);
    for (;;)
    {
      const T next = fn(current);
      if (ref.compare_exchange_weak(current, next, std::memory_order_relaxed))
      {
        return next;
      }
    }
  }

  /// Saturating counter increment.
  void increment(std::uint32_t &counter)
  {
    update(counter, [](std::uint32_t v) { return v < std::numeric_limits<std::uint32_t>::max() ? v + 1u : v; });
  }

private:
  unsigned retry_limit_;
  CasCounters &counters_;
};

/// Single-writer policy used by the sequential reference executor and the exclusive NDT hit phase.
class PlainAccess
{
public:
  static constexpr bool kConcurrent = false;

  template <typename T>
  T load(T &target) const
  {
    return target;
  }

  template <typename T, typename Fn>
  T update(T &target, Fn &&fn)
  {
    target = fn(target);
    return target;
  }

  void increment(std::uint32_t &counter)
  {
    counter += counter < std::numeric_limits<std::uint32_t>::max() ? 1u : 0u;
  }
};
}  // namespace occmap

#endif  // OCCMAP_CAS_H
