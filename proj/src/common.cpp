#include "gmtlab/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace gmtlab {

CoincidentPoints::CoincidentPoints(std::size_t i, std::size_t j)
    : Error("coincident points at indices " + std::to_string(i) + " and " + std::to_string(j)),
      first(i),
      second(j) {}

ConvergenceError::ConvergenceError(const std::string& what, double r)
    : Error(what + " (residual " + std::to_string(r) + ")"), residual(r) {}

double compensated_sum(std::span<const double> values) {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

int thread_count() {
    if (const char* env = std::getenv("GMTLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace gmtlab
