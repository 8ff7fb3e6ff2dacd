// Serial versus OpenMP law checking. Usage: bench_laws [cases] [depth]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "itree/laws.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace itree::laws;

namespace {

template <typename F>
double seconds(F&& f)
{
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const std::vector<LawResult>& a, const std::vector<LawResult>& b)
{
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || a[i].cases != b[i].cases || a[i].failures != b[i].failures ||
            a[i].firstFailure != b[i].firstFailure || a[i].counterexample != b[i].counterexample)
            return false;
    return true;
}

}  // namespace

int main(int argc, char** argv)
{
    Options o;
    o.cases = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 5000;
    o.genDepth = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 6;
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::vector<LawResult> serial, parallel;
    double ts = seconds([&] { serial = runSerial(o); });
    double tp = seconds([&] { parallel = runParallel(o); });
    std::printf("laws: %zu cases x %zu laws, depth %zu\n", o.cases, serial.size(), o.genDepth);
    std::printf("serial   %8.3f s\nparallel %8.3f s on %d threads, speedup %.2fx\n", ts, tp, threads, ts / tp);
    bool agree = same(serial, parallel);
    std::printf("results %s\n", agree ? "identical" : "DIFFER");

    o.brokenMerge = true;
    bool caught = !same(runSerial(o), serial) && same(runSerial(o), runParallel(o));
    std::printf("broken merge %s\n", caught ? "detected identically by both runners" : "NOT detected consistently");
    return agree && caught ? 0 : 1;
}
