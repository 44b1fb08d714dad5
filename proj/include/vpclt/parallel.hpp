#ifndef VPCLT_PARALLEL_HPP
#define VPCLT_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace vpclt {

// Global worker count, set once by the CLI (--threads). 0 = hardware.
int worker_threads();
void set_worker_threads(int n);

// Runs fn(begin, end) over fixed-size chunks of [0, n). The chunk layout
// depends only on n, never on the worker count, so any reduction that
// combines per-chunk partials in chunk order gives bit-identical results
// for every thread setting.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Number of fixed chunks parallel_chunks will use for a loop of size n.
std::size_t chunk_count(std::size_t n);

}  // namespace vpclt

#endif  // VPCLT_PARALLEL_HPP
