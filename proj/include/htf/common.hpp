#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/rational.hpp>

namespace htf {

using cplx = std::complex<double>;
using Rational = boost::rational<long long>;

enum class ErrorCode {
    domain = 1,
    resolution,
    grid_mismatch,
    precondition,
    coverage,
    io,
    usage,
    refused,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

// splitmix64 finalizer; per-trial seeds are mix_seed(master, index)
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n). Each index must write only its own slot so the
// result does not depend on scheduling. The lowest-index exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    std::size_t workers = static_cast<std::size_t>(thread_count());
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (workers > n) workers = n;
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    std::size_t err_index = n;
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

inline bool is_pow2(long long v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace htf
