#pragma once

#include <cstddef>
#include <functional>

namespace sfd {

// Worker count: SFD_THREADS when set and positive, otherwise the hardware
// concurrency (at least 1).
int thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads using a
// static contiguous partition. Exceptions from workers are rethrown (first
// by index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sfd
