#pragma once

#include <cstddef>
#include <functional>

namespace heurreg {

// Worker count resolution: explicit request > HEURREG_WORKERS env var >
// hardware concurrency.  Always at least 1.
unsigned resolve_workers(unsigned requested = 0);

// Static-partition parallel loop: index range [0, n) is split into `workers`
// contiguous blocks, one thread per block.  Each index is processed exactly
// once and the body must write only to slots owned by its index, so results
// are identical for any worker count.  Exceptions propagate to the caller.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

} // namespace heurreg
