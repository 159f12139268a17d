#pragma once

#include <cstddef>
#include <functional>

namespace audiobook {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
// independent; results are expected to be written to per-index slots. If
// any item throws, the exception from the lowest failing index is rethrown
// after all workers finish, so failures do not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace audiobook
