#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace fracfield {

/// Runs body(task, worker) for task = 0 .. count-1 on up to `threads`
/// workers. Tasks are claimed dynamically, so the body must not depend on
/// which worker runs it beyond using worker-local scratch space.
template <typename Body>
void parallel_for(Eigen::Index count, int threads, Body&& body) {
  const int workers = static_cast<int>(std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(count, 1)));
  if (workers == 1) {
    for (Eigen::Index i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](int worker) {
    try {
      for (Eigen::Index i = next++; i < count; i = next++) body(i, worker);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = count;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fracfield
