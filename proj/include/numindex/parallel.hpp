#ifndef NUMINDEX_PARALLEL_HPP
#define NUMINDEX_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace numindex {

// Worker count: NUMINDEX_THREADS if set (>= 1), else the hardware concurrency.
int worker_count();

// Runs body(0..count-1). Work is split across worker_count() threads at the
// outermost call only; nested calls run inline. Callers write results into
// per-index slots, so the outcome never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace numindex

#endif  // NUMINDEX_PARALLEL_HPP
