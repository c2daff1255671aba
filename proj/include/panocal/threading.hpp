#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace panocal {

// Global worker budget, set once by the CLI (--threads). 0 = hardware default.
int thread_count();
void set_thread_count(int n);

// Static block partition; fn(i) must only touch state owned by item i, so the
// result is identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace panocal
