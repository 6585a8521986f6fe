#include "tgqpt/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "tgqpt/units.hpp"

namespace tgqpt {

Exciton exciton_from_char(char c) {
  switch (c) {
    case 'O': return Exciton::O;
    case 'I': return Exciton::I;
    default:
      throw ValidationError(std::string("not an exciton label: '") + c + "'");
  }
}

double wavenumber_to_angular_frequency(double wavenumber_cm) {
  if (!std::isfinite(wavenumber_cm)) {
    throw ValidationError("wavenumber must be finite");
  }
  return 2.0 * M_PI * kSpeedOfLightCmPerFs * wavenumber_cm;
}

void parallel_for_index(std::size_t n, int jobs,
                        const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(jobs, n);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace tgqpt
