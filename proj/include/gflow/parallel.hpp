#pragma once

#include <cstddef>

namespace gflow {

/// Worker threads for `tasks` independent jobs: hardware concurrency,
/// capped by the GEVREY_FLOW_THREADS environment variable.
[[nodiscard]] unsigned worker_count(std::size_t tasks);

}  // namespace gflow
