#include "moire/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "moire/types.hpp"

namespace moire {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MOIRE_BANDS_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError(std::string("MOIRE_BANDS_WORKERS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
    const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
    if (nthreads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(nthreads, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace moire
