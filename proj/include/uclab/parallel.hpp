#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace uclab {

/// Worker count from an explicit request, else the UCLAB_JOBS environment
/// variable, else 1.
unsigned resolve_jobs(unsigned requested);

/// Splits [0, count) into at most `jobs` contiguous chunks and runs
/// fn(begin, end) on each, returning the per-chunk results in chunk order.
/// Callers merge the results themselves, so output does not depend on timing.
template <typename Fn>
auto map_chunks(std::size_t count, unsigned jobs, Fn fn) {
  using Result = decltype(fn(std::size_t{0}, std::size_t{0}));
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
  std::vector<Result> results(chunks);
  auto bounds = [&](std::size_t k) { return count * k / chunks; };
  if (chunks == 1) {
    results[0] = fn(0, count);
    return results;
  }
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t k = 0; k < chunks; ++k) {
    workers.emplace_back([&, k] { results[k] = fn(bounds(k), bounds(k + 1)); });
  }
  for (auto& w : workers) w.join();
  return results;
}

}  // namespace uclab
