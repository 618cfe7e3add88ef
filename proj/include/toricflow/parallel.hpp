#pragma once

#include <cstddef>
#include <functional>

namespace toricflow {

/// Upper bound on worker threads: TOOL_THREADS if set to a positive integer
/// (honoured even above the core count), otherwise the hardware concurrency.
std::size_t thread_cap();

/// Calls body(begin, end) over disjoint chunks covering [0, n). Runs inline
/// when n < grain or only one thread is allowed. Chunks must not depend on
/// each other; callers only use it for node-wise loops.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace toricflow
