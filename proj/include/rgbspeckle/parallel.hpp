#pragma once

#include <functional>

namespace rgbspeckle {

/// Worker count used by parallel_for. Defaults to $RGBSPECKLE_THREADS, else
/// the hardware concurrency. Results never depend on this value.
int thread_count();
void set_thread_count(int n);

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// workers. body must only write state owned by index i.
void parallel_for(int n, const std::function<void(int)>& body);

} // namespace rgbspeckle
