#pragma once

#include <functional>

namespace seal {

// Number of worker threads to use for embarrassingly parallel fills.
// Honors the SEAL_TW_THREADS environment variable (>= 1); defaults to the
// hardware concurrency.
int thread_cap();

// Runs fn(i) for i in [0, n). Work items must be independent; each writes
// only to its own output slot, so the result does not depend on scheduling.
// Falls back to a serial loop for small n or a cap of 1.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace seal
