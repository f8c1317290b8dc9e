#include "sft/parallel.hpp"

#include <atomic>

namespace sft {
namespace {
std::atomic<int> configured{0};
}

void set_thread_count(int threads) { configured = std::max(threads, 0); }

int thread_count() {
  const int t = configured.load();
  if (t > 0) return t;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace sft
