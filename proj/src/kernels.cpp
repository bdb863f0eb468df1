#include "circumfeas/kernels.hpp"

#include "circumfeas/errors.hpp"

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace circumfeas::kernels {

namespace {

bool use_parallel(Exec exec, int blocks) {
#ifdef _OPENMP
    if (exec == Exec::parallel)
        return true;
    return exec == Exec::automatic && blocks >= parallel_threshold;
#else
    (void)exec;
    (void)blocks;
    return false;
#endif
}

// Runs body(i) for i < count; exceptions thrown inside the parallel region
// are captured and the first one is rethrown on the calling thread.
template <class Body>
void for_each_index(int count, bool parallel, Body &&body) {
    if (!parallel) {
        for (int i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

int check_blocks(std::span<const SetPtr> sets, const Point &p) {
    if (sets.empty())
        throw InvalidArgument("block kernel: no sets");
    const int n = sets.front()->dim();
    if (p.size() != static_cast<Eigen::Index>(n) * static_cast<Eigen::Index>(sets.size()))
        throw InvalidArgument("block kernel: dimension mismatch");
    return n;
}

} // namespace

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void project_blocks(std::span<const SetPtr> sets, const Point &p, Point &out, Exec exec) {
    const int n = check_blocks(sets, p);
    const int m = static_cast<int>(sets.size());
    out.resize(p.size());
    for_each_index(m, use_parallel(exec, m), [&](int i) {
        out.segment(i * n, n) = sets[i]->project(p.segment(i * n, n));
    });
}

void displace_blocks(std::span<const SetPtr> sets, const Point &p, Point &out, Exec exec) {
    const int n = check_blocks(sets, p);
    const int m = static_cast<int>(sets.size());
    out.resize(p.size());
    for_each_index(m, use_parallel(exec, m), [&](int i) {
        out.segment(i * n, n) = sets[i]->displacement(p.segment(i * n, n));
    });
}

Point average_projections(std::span<const SetPtr> sets, const Point &p, Exec exec) {
    if (sets.empty())
        throw InvalidArgument("average_projections: no sets");
    const int m = static_cast<int>(sets.size());
    std::vector<Point> proj(m);
    for_each_index(m, use_parallel(exec, m), [&](int i) { proj[i] = sets[i]->project(p); });
    Point sum = proj.front();
    for (int i = 1; i < m; ++i)
        sum += proj[i];
    return sum / static_cast<double>(m);
}

Point block_mean(const Point &p, int n, int m, Exec exec) {
    if (n <= 0 || m <= 0 || p.size() != static_cast<Eigen::Index>(n) * m)
        throw InvalidArgument("block_mean: dimension mismatch");
    Point mean(n);
    for_each_index(n, use_parallel(exec, m), [&](int j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            s += p[i * n + j];
        mean[j] = s / static_cast<double>(m);
    });
    return mean;
}

std::vector<double> evaluate(int count, const std::function<double(int)> &fn, Exec exec) {
    std::vector<double> values(count < 0 ? 0 : count);
    for_each_index(count, use_parallel(exec, count), [&](int i) { values[i] = fn(i); });
    return values;
}

} // namespace circumfeas::kernels
