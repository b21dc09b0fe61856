#include "pseudogroup/parallel.hpp"

#include <atomic>

namespace pseudogroup {

namespace {

std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{std::max(1u, std::thread::hardware_concurrency())};
  return cap;
}

}  // namespace

unsigned max_threads() { return thread_cap().load(); }

void set_max_threads(unsigned n) { thread_cap().store(std::max(1u, n)); }

}  // namespace pseudogroup
