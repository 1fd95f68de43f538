#include "swe/parallel.hpp"

#include <cstdlib>
#include <string>

namespace swe {

int worker_count() {
  if (const char* env = std::getenv("SWE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace swe
