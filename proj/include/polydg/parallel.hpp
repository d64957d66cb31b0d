#pragma once

#include <cstddef>
#include <functional>

namespace polydg {

/// Runs body(begin, end, worker) over [0, n) in chunks on `workers` threads
/// (the calling thread included). Chunks are handed out dynamically, so the
/// body must not depend on which worker runs a chunk. Exceptions thrown by
/// the body are rethrown on the caller after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t, int)>& body,
                  std::size_t chunk = 0);

/// Number of hardware threads, at least 1.
int hardware_workers();

}  // namespace polydg
