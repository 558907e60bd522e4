#include "htf/common.hpp"

namespace htf {

namespace {
std::atomic<int> g_threads{1};
}

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::domain: return "domain";
        case ErrorCode::resolution: return "resolution";
        case ErrorCode::grid_mismatch: return "grid_mismatch";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::coverage: return "outside_coverage";
        case ErrorCode::io: return "io";
        case ErrorCode::usage: return "usage";
        case ErrorCode::refused: return "refused";
    }
    return "unknown";
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }
int thread_count() { return g_threads.load(); }

}  // namespace htf
