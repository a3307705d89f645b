#pragma once

#include <cstdint>
#include <functional>

namespace percsolid {

// Thread count resolution: requested > 0 wins, then PERC_SOLIDIFY_THREADS,
// then hardware concurrency.
int resolve_threads(int requested);

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
// Chunk boundaries depend only on n and chunk_size, never on the thread
// count, so per-chunk results can be reduced in chunk order to give
// thread-count-independent totals.
void parallel_chunks(int64_t n, int64_t chunk_size, int threads,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn);

int64_t num_chunks(int64_t n, int64_t chunk_size);

}  // namespace percsolid
