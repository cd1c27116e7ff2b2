#include "hjbqrnet/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>
#include <vector>

namespace hjbqrnet {

int worker_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int count = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("HJB_QRNET_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < count) count = cap;
    }
    return count;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    std::size_t workers = std::min<std::size_t>(worker_thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
}

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_double(const std::string& token) {
    if (token.empty()) throw ParseError("empty numeric token");
    if (token == "inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
        throw ParseError("bad numeric token '" + token + "'");
    return v;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void check_vector(const Vector& v, Eigen::Index size, const char* what) {
    if (v.size() != size)
        throw DimensionError(std::string(what) + ": expected size " + std::to_string(size) +
                             ", got " + std::to_string(v.size()));
    if (!v.allFinite()) throw DimensionError(std::string(what) + ": non-finite entries");
}

}  // namespace hjbqrnet
