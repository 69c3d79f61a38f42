#pragma once

#include <cstddef>

namespace apes {

// Worker count: min(APES_THREADS, hardware). Reductions in this codebase are
// always performed serially so results do not depend on the thread count.
int worker_count();

// Applies fn(i) for i in [0, n). Chunks are fixed by (n, threads) only.
template <typename F>
void parallel_for(std::size_t n, F&& fn);

namespace detail {
void run_parallel(std::size_t n, void* ctx, void (*call)(void*, std::size_t));
}

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    detail::run_parallel(n, &fn, [](void* ctx, std::size_t i) {
        (*static_cast<F*>(ctx))(i);
    });
}

} // namespace apes
