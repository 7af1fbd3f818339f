// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace cbo {

// Worker count: CBO_THREADS if set and positive, otherwise hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index must only write its own output slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cbo
