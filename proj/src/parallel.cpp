#include "ddim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace ddim {

namespace {

std::size_t initial_thread_count() {
  if (const char* env = std::getenv("DDIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::atomic<std::size_t>& thread_setting() {
  static std::atomic<std::size_t> n{initial_thread_count()};
  return n;
}

}  // namespace

std::size_t thread_count() { return thread_setting().load(std::memory_order_relaxed); }

void set_thread_count(std::size_t n) { thread_setting().store(n == 0 ? 1 : n, std::memory_order_relaxed); }

}  // namespace ddim
