#include "agglm/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace agglm {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    if (count <= 0) return;
    jobs = std::clamp(jobs, 1, count);
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t]() {
            for (int i = t; i < count; i += jobs) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& thread : threads) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace agglm
