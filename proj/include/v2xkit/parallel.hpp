#pragma once

#include <cstddef>
#include <functional>

namespace v2xkit {

// Worker threads available to data-parallel stages: hardware concurrency
// capped by the V2XKIT_THREADS environment variable, never below 1.
int thread_budget();

// Runs fn(0..count-1) across the thread budget. Indices are claimed from an
// atomic counter, so bodies must write disjoint state; results are then
// independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace v2xkit
