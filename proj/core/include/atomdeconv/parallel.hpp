#pragma once

#include <functional>

namespace atomdeconv {

// 0 or negative requests auto (hardware concurrency).
int resolve_threads(int requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers. Falls back to a
// plain loop for threads <= 1. The first exception thrown by any task is
// rethrown on the calling thread after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace atomdeconv
