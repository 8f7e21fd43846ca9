#pragma once

#include <cstddef>
#include <functional>

namespace plm_enet {

/// Runs task(i) for i in [0, count) on up to `max_threads` threads. Tasks
/// must write only to their own output slot; results are then independent
/// of scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, int max_threads, const std::function<void(std::size_t)>& task);

/// Thread cap from the PLM_ENET_THREADS environment variable, or
/// `fallback` when unset or invalid.
int thread_cap_from_env(int fallback = 1);

}  // namespace plm_enet
