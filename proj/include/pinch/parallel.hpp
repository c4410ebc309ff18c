// SPDX-License-Identifier: Apache-2.0
// Minimal static-partition parallel loop; results must not depend on the thread count.
#pragma once

#include <cstdint>
#include <functional>

namespace pinch {

// Worker count: PINCH_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Calls body(begin, end, worker) on disjoint contiguous chunks of [0, n).
void parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t, int)>& body);

}  // namespace pinch
