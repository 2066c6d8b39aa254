#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <string_view>
#include <vector>

namespace cdice::parallel {

enum class Execution { Serial, Parallel };

Execution parse_execution(std::string_view text);

/// Number of worker threads the parallel path would use.
int max_threads();

/// Runs `task(i)` for i in [0, n). The parallel path distributes indices
/// over OpenMP threads; each index writes only its own output slot, so
/// both paths produce identical results. The first exception raised by
/// any task is rethrown after all tasks finish.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& task, Execution exec);

template <class R>
std::vector<R> map_indices(std::size_t n, const std::function<R(std::size_t)>& fn, Execution exec) {
  std::vector<R> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); }, exec);
  return out;
}

}  // namespace cdice::parallel
