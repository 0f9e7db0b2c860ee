#pragma once

#include <cstddef>
#include <functional>

namespace optstop {

/// Number of workers used by path-parallel loops. 0 means
/// std::thread::hardware_concurrency().
void set_worker_count(std::size_t workers);
std::size_t worker_count();

/// Runs body(i) for every i in [0, n) on the configured workers. Each index is
/// visited exactly once; body must only write to storage owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace optstop
