#include "gmtlab/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace gmtlab {

int configured_threads() {
  if (const char* env = std::getenv("GMT_LAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) return cap;
    } catch (const std::exception&) {
      // Malformed values fall back to the runtime default.
    }
  }
  return omp_get_max_threads();
}

void apply_thread_cap_from_env() { omp_set_num_threads(configured_threads()); }

}  // namespace gmtlab
