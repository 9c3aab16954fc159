// Timing harness for the two match counters: naive reference vs diagonal
// kernel, and the kernel's thread scaling. Results must agree exactly.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "d2k/match_counting.hpp"
#include "d2k/rng.hpp"
#include "d2k/sequence_model.hpp"
#include "d2k/simulation.hpp"

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_ms(F&& f, std::int64_t& sink) {
    const double t0 = now_ms();
    sink = f();
    return now_ms() - t0;
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t n = argc > 1 ? std::atoll(argv[1]) : 20000;
    const int m = argc > 2 ? std::atoi(argv[2]) : 12;
    const int k = argc > 3 ? std::atoi(argv[3]) : 2;

    const auto dist = d2k::strand_symmetric(1.0 / 3.0);
    d2k::SplitMix64 rng(7);
    const d2k::Sequence a = d2k::generate_sequence(dist, n, rng);
    const d2k::Sequence b = d2k::generate_sequence(dist, n, rng);
    const d2k::MatchParams params(n, m, k);

    std::printf("n=%lld m=%d k=%d\n", static_cast<long long>(n), m, k);

    std::int64_t fast = 0;
    std::int64_t naive = 0;

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    for (int t = 1; t <= max_threads; t *= 2) {
#ifdef _OPENMP
        omp_set_num_threads(t);
#endif
        const double ms = time_ms([&] { return d2k_fast(a, b, params); }, fast);
        std::printf("fast  threads=%-2d  %10.1f ms  result=%lld\n", t, ms,
                    static_cast<long long>(fast));
    }

    if (n <= 30000) {
        const double ms = time_ms([&] { return d2k_naive(a, b, params); }, naive);
        std::printf("naive reference  %10.1f ms  result=%lld\n", ms,
                    static_cast<long long>(naive));
        if (naive != fast) {
            std::printf("MISMATCH: naive=%lld fast=%lld\n",
                        static_cast<long long>(naive), static_cast<long long>(fast));
            return 1;
        }
        std::printf("counters agree\n");
    } else {
        std::printf("naive reference skipped at this n (quadratic)\n");
    }
    return 0;
}
