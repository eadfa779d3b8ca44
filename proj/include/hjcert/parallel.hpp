#pragma once

#include <cstddef>
#include <functional>

namespace hjcert {

/// Worker count: HJCERT_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is visited exactly once; callers write only to slot i, so results do not
/// depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hjcert
