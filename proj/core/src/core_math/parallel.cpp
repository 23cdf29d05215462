#include "estim/core_math/parallel.hpp"

#include <cstdlib>
#include <string>

namespace estim {

bool& detail::in_parallel_worker() noexcept {
  thread_local bool flag = false;
  return flag;
}

std::size_t default_thread_count() noexcept {
  if (detail::in_parallel_worker()) return 1;
  if (const char* env = std::getenv("ESTIM_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace estim
