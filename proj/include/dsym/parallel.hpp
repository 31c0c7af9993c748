#pragma once

#include <cstdlib>
#include <functional>
#include <string>

#include <omp.h>

namespace dsym {

/// Worker cap: min(DSL_THREADS, hardware). DSL_THREADS=1 forces serial runs.
inline int max_workers() {
    static int cached = [] {
        int hw = omp_get_max_threads();
        if (const char* env = std::getenv("DSL_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) return cap;
        }
        return hw;
    }();
    return cached;
}

/// Runs fn(chunk) for chunk = 0..n_chunks-1. Chunks are independent; callers
/// merge per-chunk results in chunk order afterwards, so the outcome is
/// identical whether or not OpenMP splits the loop.
template <class Fn>
void chunked_for(int n_chunks, Fn&& fn, bool parallel = true) {
    if (!parallel || max_workers() == 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
#pragma omp parallel for schedule(dynamic) num_threads(max_workers())
    for (int c = 0; c < n_chunks; ++c) fn(c);
}

}  // namespace dsym
