#include "cdice/parallel.hpp"

#include <mutex>
#include <string>

#include "cdice/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdice::parallel {

Execution parse_execution(std::string_view text) {
  if (text == "serial") return Execution::Serial;
  if (text == "parallel") return Execution::Parallel;
  throw ValidationError("unknown execution mode '" + std::string(text) + "'");
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& task, Execution exec) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      task(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      // Keep the lowest failing index so the reported error matches the serial path.
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace cdice::parallel
