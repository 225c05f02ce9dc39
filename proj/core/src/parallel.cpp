#include "reebflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace reebflow {

unsigned thread_count() {
  if (const char* env = std::getenv("REEBFLOW_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace reebflow
