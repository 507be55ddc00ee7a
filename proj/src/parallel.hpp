#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace fmc::detail {

/// Fixed-tree pairwise summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline unsigned thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FMC_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) {
            hw = std::min(hw, static_cast<unsigned>(cap));
        }
    }
    return hw;
}

/// Runs fn(i) for i < count on a thread pool, each index exactly once.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn)
{
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) {
                    fn(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// out[i] = fn(i) for i < count. Each slot is written by exactly one task, so
/// reductions over `out` are thread-count independent.
template <class Fn>
std::vector<double> parallel_map(std::size_t count, Fn&& fn)
{
    std::vector<double> out(count, 0.0);
    parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace fmc::detail
