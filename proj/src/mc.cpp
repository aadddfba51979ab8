#include "optrx/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace optrx {

McEstimate mc_from_counts(std::size_t successes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("mc_from_counts: empty sample");
    if (successes > n) throw std::invalid_argument("mc_from_counts: successes exceed sample size");
    McEstimate est;
    est.n = n;
    const double nd = static_cast<double>(n);
    est.estimate = static_cast<double>(successes) / nd;
    est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / nd);
    if (successes == 0) {
        est.ci_low = 0.0;
        est.ci_high = 3.0 / nd;
    } else if (successes == n) {
        est.ci_low = 1.0 - 3.0 / nd;
        est.ci_high = 1.0;
    } else {
        est.ci_low = std::max(0.0, est.estimate - 1.96 * est.std_error);
        est.ci_high = std::min(1.0, est.estimate + 1.96 * est.std_error);
    }
    return est;
}

McEstimate mc_aggregate(const std::vector<int>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("mc_aggregate: empty sample");
    std::size_t successes = 0;
    for (int o : outcomes) {
        if (o != 0 && o != 1) throw std::invalid_argument("mc_aggregate: outcomes must be 0 or 1");
        successes += static_cast<std::size_t>(o);
    }
    return mc_from_counts(successes, outcomes.size());
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace optrx
