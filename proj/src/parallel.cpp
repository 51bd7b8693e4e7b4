#include "gvslam/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace gvslam {

namespace {
int g_thread_cap = 0;
}

void set_thread_count(int n) { g_thread_cap = n; }

int thread_count() {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int base = hw > 0 ? hw : 1;
  return g_thread_cap > 0 ? std::min(g_thread_cap, base) : base;
}

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn,
                  int64_t min_chunk) {
  if (n <= 0) return;
  const int workers = thread_count();
  if (workers <= 1 || n <= min_chunk) {
    fn(0, n);
    return;
  }
  // Chunk layout depends only on n and min_chunk, never on the worker count.
  const int64_t target_chunks = std::max<int64_t>(1, n / min_chunk);
  const int64_t num_chunks = std::min<int64_t>(target_chunks, 256);
  const int64_t chunk = (n + num_chunks - 1) / num_chunks;

  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= num_chunks) break;
      const int64_t begin = i * chunk;
      const int64_t end = std::min(n, begin + chunk);
      if (begin < end) fn(begin, end);
    }
  };
  std::vector<std::thread> threads;
  const int spawn = std::min<int64_t>(workers, num_chunks) - 1;
  threads.reserve(spawn);
  for (int t = 0; t < spawn; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
}

void parallel_for_tasks(int64_t num_tasks, const std::function<void(int64_t)>& fn) {
  if (num_tasks <= 0) return;
  const int workers = thread_count();
  if (workers <= 1 || num_tasks == 1) {
    for (int64_t i = 0; i < num_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= num_tasks) break;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const int spawn = static_cast<int>(std::min<int64_t>(workers, num_tasks)) - 1;
  threads.reserve(spawn);
  for (int t = 0; t < spawn; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
}

}  // namespace gvslam
