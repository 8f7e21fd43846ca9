#include "plm_enet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace plm_enet {

void parallel_for(std::size_t count, int max_threads, const std::function<void(std::size_t)>& task) {
  const auto workers = static_cast<std::size_t>(std::max(1, max_threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t spawn = std::min(workers, count);
  pool.reserve(spawn);
  for (std::size_t w = 0; w < spawn; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

int thread_cap_from_env(int fallback) {
  const char* raw = std::getenv("PLM_ENET_THREADS");
  if (raw == nullptr) return fallback;
  try {
    const int value = std::stoi(raw);
    return value >= 1 ? value : fallback;
  } catch (...) {
    return fallback;
  }
}

}  // namespace plm_enet
