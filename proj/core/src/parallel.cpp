#include "ergolab/parallel.hpp"

#include <atomic>

namespace ergolab {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
  if (unsigned n = g_threads.load(); n != 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace ergolab
