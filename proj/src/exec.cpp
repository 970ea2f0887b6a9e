#include "fraclab/exec.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace fraclab {

void apply_thread_limit_from_env() {
  const char* v = std::getenv("FRACLAB_THREADS");
  if (!v) return;
  try {
    const int n = std::stoi(v);
    if (n > 0) omp_set_num_threads(n);
  } catch (const std::exception&) {
  }
}

}  // namespace fraclab
