#pragma once

#include <cstddef>
#include <functional>

namespace riesz_ep {

/// Worker count from RIESZ_EP_THREADS (0 or unset = hardware concurrency).
int worker_count();

/// Splits [0, count) into contiguous chunks, one per worker. body(begin, end) must only
/// write to state owned by its range.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace riesz_ep
