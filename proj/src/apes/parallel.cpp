#include "apes/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <omp.h>

namespace apes {

int worker_count() {
    static int n = [] {
        int hw = omp_get_max_threads();
        if (const char* env = std::getenv("APES_THREADS")) {
            int req = std::atoi(env);
            if (req >= 1) hw = std::min(hw, req);
        }
        return std::max(1, hw);
    }();
    return n;
}

namespace detail {

void run_parallel(std::size_t n, void* ctx, void (*call)(void*, std::size_t)) {
    const int nt = worker_count();
    if (nt == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) call(ctx, i);
        return;
    }
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        call(ctx, static_cast<std::size_t>(i));
}

} // namespace detail
} // namespace apes
