#include "polydg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace polydg {

int hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t, int)>& body,
                  std::size_t chunk) {
  if (n == 0) return;
  workers = std::max(1, workers);
  if (chunk == 0) chunk = std::max<std::size_t>(1, n / (static_cast<std::size_t>(workers) * 8));
  if (workers == 1 || n <= chunk) {
    body(0, n, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](int worker) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        body(begin, std::min(n, begin + chunk), worker);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace polydg
