#include "homopart/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace homopart {

namespace {

std::atomic<std::size_t> configured_threads{0};

std::size_t default_threads() {
  if (const char* env = std::getenv("HOMOPART_THREADS")) {
    try {
      const auto value = std::stoul(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() {
  const auto configured = configured_threads.load(std::memory_order_relaxed);
  return configured != 0 ? configured : default_threads();
}

void set_thread_count(std::size_t threads) {
  configured_threads.store(threads, std::memory_order_relaxed);
}

}  // namespace homopart
