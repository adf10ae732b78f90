#include "roughlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roughlab {

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t count, std::size_t block, std::size_t workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (count == 0) return;
    block = std::max<std::size_t>(1, block);
    const std::size_t nblocks = (count + block - 1) / block;
    workers = std::min(resolve_workers(workers), nblocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) fn(b * block, std::min(count, (b + 1) * block));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks || failed.load()) return;
            try {
                fn(b * block, std::min(count, (b + 1) * block));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace roughlab
