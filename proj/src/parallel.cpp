#include "parisian/parallel.hpp"

#include <cstdlib>
#include <string>

namespace parisian {

int default_threads() {
  if (const char* env = std::getenv("PARISIAN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace parisian
