#include "gardingkit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace gk {

int worker_count() {
  static const int cached = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("GARDINGKIT_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
      } catch (...) {
        // unparsable value: keep the hardware default
      }
    }
    return hw;
  }();
  return cached;
}

}  // namespace gk
