#pragma once

// Data-parallel kernels over blocks of sets. Each kernel has a serial
// reference path and an OpenMP path; both write disjoint slots and reduce
// in index order, so their results are bit-identical.

#include "circumfeas/sets.hpp"

#include <functional>
#include <span>
#include <vector>

namespace circumfeas::kernels {

enum class Exec {
    serial,
    parallel,
    automatic, // parallel once the block count reaches parallel_threshold
};

inline constexpr int parallel_threshold = 16;

/// Number of OpenMP threads available (1 without OpenMP).
int thread_count();

/// out[block i] = project(sets[i], p[block i]).
void project_blocks(std::span<const SetPtr> sets, const Point &p, Point &out,
                    Exec exec = Exec::automatic);

/// out[block i] = displacement(sets[i], p[block i]).
void displace_blocks(std::span<const SetPtr> sets, const Point &p, Point &out,
                     Exec exec = Exec::automatic);

/// (1/m) sum_i project(sets[i], p).
Point average_projections(std::span<const SetPtr> sets, const Point &p,
                          Exec exec = Exec::automatic);

/// Blockwise mean of p split into m blocks of length n.
Point block_mean(const Point &p, int n, int m, Exec exec = Exec::automatic);

/// values[i] = fn(i) for i < count.
std::vector<double> evaluate(int count, const std::function<double(int)> &fn,
                             Exec exec = Exec::automatic);

} // namespace circumfeas::kernels
