#include "occmap/Cas.h"

namespace occmap::detail
{
std::mutex &casFallbackMutex()
{
  static std::mutex mutex;
  return mutex;
}
}  // namespace occmap::detail
