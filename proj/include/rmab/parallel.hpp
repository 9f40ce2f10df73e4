#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rmab {

// Replication fan-out. body(r) must write its results only into slot r
// of caller-owned storage, so the iteration schedule can never change
// the output; reductions happen serially afterwards. jobs <= 1 takes
// the plain serial loop, which is the reference path the tests compare
// the OpenMP path against.
template <class F>
void for_each_replication(long count, int jobs, F&& body) {
#ifdef _OPENMP
    if (jobs > 1) {
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
        for (long r = 0; r < count; ++r)
            body(r);
        return;
    }
#endif
    for (long r = 0; r < count; ++r)
        body(r);
}

} // namespace rmab
