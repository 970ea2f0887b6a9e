#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace fraclab {

/// Serial is the reference path; parallel splits independent output slots
/// over OpenMP threads. Both produce identical numbers.
enum class Exec { serial, parallel };

/// Calls fn(i) for i in [0, n). Each call must only write its own slot.
/// The first exception thrown by any call is rethrown after the loop.
template <class Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

/// Applies FRACLAB_THREADS (positive integer) to the OpenMP runtime, if set.
void apply_thread_limit_from_env();

}  // namespace fraclab
