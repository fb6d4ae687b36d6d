#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace scenery {

// Execution settings supplied by the runner. Results never depend on workers:
// every block owns the stream derived from its index.
struct ExecPolicy {
    unsigned workers = 1;
};

// Process-wide cancellation flag (set from a signal handler by the CLI).
std::atomic<bool>& cancellation_flag() noexcept;
inline bool cancellation_requested() noexcept {
    return cancellation_flag().load(std::memory_order_relaxed);
}

// Evaluates fn(block) for block in [0, blocks) on up to `workers` threads and
// returns the results in block order. After cancellation only the completed
// prefix is returned.
template <class Partial, class Fn>
std::vector<Partial> run_blocks(std::size_t blocks, const ExecPolicy& policy, Fn&& fn) {
    std::vector<std::optional<Partial>> slots(blocks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            if (cancellation_requested()) return;
            std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= blocks) return;
            try {
                slots[b].emplace(fn(b));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(blocks);
                return;
            }
        }
    };

    unsigned threads = std::max(1u, std::min<unsigned>(policy.workers, static_cast<unsigned>(blocks)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Partial> out;
    out.reserve(blocks);
    for (auto& s : slots) {
        if (!s) break;
        out.push_back(std::move(*s));
    }
    return out;
}

// Splits `total` samples into blocks of `block_size`; the last may be short.
inline std::size_t block_count(std::uint64_t total, std::uint64_t block_size) {
    return static_cast<std::size_t>((total + block_size - 1) / block_size);
}
inline std::uint64_t block_length(std::size_t block, std::uint64_t total, std::uint64_t block_size) {
    std::uint64_t begin = static_cast<std::uint64_t>(block) * block_size;
    return std::min(block_size, total - begin);
}

}  // namespace scenery
