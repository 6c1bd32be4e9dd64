#include "gflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace gflow {

unsigned worker_count(std::size_t tasks) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GEVREY_FLOW_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, tasks)));
}

}  // namespace gflow
