#pragma once

#include <cstddef>
#include <functional>

namespace vidalign {

// Calls body(i) for i in [0, count) on up to `jobs` threads. Indices are
// handed out dynamically; the first exception thrown by any body is rethrown
// after all workers stop. jobs <= 1 runs inline.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace vidalign
