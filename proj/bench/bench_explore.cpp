// Serial versus OpenMP random-walk exploration.
// Usage: bench_explore <model.json> [walks] [depth]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "anim/explore.hpp"
#include "rc/semantics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <typename F>
double seconds(F&& f)
{
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::fprintf(stderr, "usage: bench_explore <model.json> [walks] [depth]\n");
        return 2;
    }
    auto model = rc::Model::load(argv[1]);
    rc::Semantics sem(model);
    anim::ExploreOptions o;
    o.walks = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 256;
    o.depth = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 200;
    o.expandChildren = true;
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    anim::ExploreStats serial, parallel;
    // each runner gets a fresh tree so neither reuses the other's forced nodes
    double ts = seconds([&] { serial = anim::exploreSerial(sem.module(), sem.alphabet(), o); });
    double tp = seconds([&] { parallel = anim::exploreParallel(sem.module(), sem.alphabet(), o); });
    std::printf("explore %s: %zu walks, depth %zu, %zu menus\n", model->module().name.c_str(), o.walks, o.depth,
                serial.menus);
    std::printf("serial   %8.3f s\nparallel %8.3f s on %d threads, speedup %.2fx\n", ts, tp, threads, ts / tp);
    bool agree = serial == parallel;
    std::printf("results %s, %s\n", agree ? "identical" : "DIFFER", serial.ok() ? "no violations" : "VIOLATIONS");
    return agree && serial.ok() ? 0 : 1;
}
