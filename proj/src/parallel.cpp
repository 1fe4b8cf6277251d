#include "holelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace holelab {

int thread_count() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int default_chunks(int n) { return std::clamp(n / 4096, 1, 64); }

void parallel_chunks(int n, int chunks, const std::function<void(int, int, int)>& body) {
  chunks = std::max(1, chunks);
  auto range = [&](int c) { return std::make_pair(static_cast<long>(n) * c / chunks, static_cast<long>(n) * (c + 1) / chunks); };
  const int workers = std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) {
      const auto [b, e] = range(c);
      body(c, static_cast<int>(b), static_cast<int>(e));
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next++; c < chunks; c = next++) {
        try {
          const auto [b, e] = range(c);
          body(c, static_cast<int>(b), static_cast<int>(e));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace holelab
