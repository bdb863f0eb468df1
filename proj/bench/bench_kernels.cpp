// Serial vs OpenMP timings for the block kernels.

#include "circumfeas/kernels.hpp"

#include <chrono>
#include <cstdio>
#include <random>

using namespace circumfeas;

template <class F>
double seconds(F &&f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

int main() {
    std::mt19937_64 eng(1);
    std::normal_distribution<double> g;
    const int d = 50;
    std::printf("threads: %d\n%8s %12s %12s %8s\n", kernels::thread_count(), "m", "serial[s]", "parallel[s]", "speedup");
    for (int m : {16, 256, 4096}) {
        std::vector<SetPtr> sets;
        for (int i = 0; i < m; ++i) {
            Point c(d);
            for (auto &v : c)
                v = g(eng);
            sets.push_back(std::make_shared<Ball>(c, 1.0));
        }
        Point p(d * m);
        for (auto &v : p)
            v = g(eng);
        Point out;
        const int reps = 200000 / m + 5;
        const double s = seconds([&] { kernels::project_blocks(sets, p, out, kernels::Exec::serial); }, reps);
        const double t = seconds([&] { kernels::project_blocks(sets, p, out, kernels::Exec::parallel); }, reps);
        std::printf("%8d %12.3e %12.3e %8.2f\n", m, s, t, s / t);
    }
}
