#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rp {

/// Worker count: ROUGHPATH_THREADS if set, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. Each index is
/// processed exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation; the result depends only on the order of xs.
double pairwise_sum(std::span<const double> xs);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

/// Sample mean and standard error, both assembled by pairwise summation.
MeanSe mean_se(std::span<const double> xs);

/// Median of a copy of xs.
double median(std::vector<double> xs);

}  // namespace rp
