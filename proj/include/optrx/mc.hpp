#ifndef OPTRX_MC_HPP
#define OPTRX_MC_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace optrx {

// Proportion estimate with normal-approximation 95% interval. Degenerate
// all-zero (all-one) samples fall back to the rule-of-three interval.
struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
};

McEstimate mc_from_counts(std::size_t successes, std::size_t n);
McEstimate mc_aggregate(const std::vector<int>& outcomes);

// Runs fn(0..n-1), spreading indices over `workers` threads. Results must be
// written to per-index slots by the caller so the outcome is independent of
// scheduling. workers == 0 picks the hardware concurrency.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace optrx

#endif
