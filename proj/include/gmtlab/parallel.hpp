#pragma once

#include <exception>

namespace gmtlab {

/// Selects between the serial reference kernels and their OpenMP versions.
/// Both produce bitwise-identical results; the serial path is kept as the
/// reference the parallel path is tested against.
enum class ExecPolicy { serial, parallel };

/// Thread cap from GMT_LAB_THREADS (if set and positive), else the OpenMP
/// default.
int configured_threads();

/// Applies `configured_threads()` to the OpenMP runtime.
void apply_thread_cap_from_env();

/// Runs body(i) for 0 <= i < count, concurrently under the parallel policy.
/// An exception from any iteration is rethrown once the loop ends; if several
/// iterations throw, the lowest index wins, matching the serial loop.
template <class F>
void for_each_index(long count, ExecPolicy policy, F&& body) {
  if (policy == ExecPolicy::serial) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  long first_index = count;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(gmtlab_for_each_index)
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace gmtlab
