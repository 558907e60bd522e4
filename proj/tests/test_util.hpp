#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "htf/grid.hpp"

namespace testutil {

using htf::cplx;

inline std::vector<cplx> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto& z : v) z = cplx(d(rng), d(rng));
    return v;
}

inline htf::Signal1D random_signal(std::mt19937_64& rng, int log_size) {
    auto g = htf::GridSpec::make(log_size);
    return htf::Signal1D(g, random_vec(rng, static_cast<std::size_t>(g.size())));
}

inline htf::Signal2D random_signal2(std::mt19937_64& rng, int log_size) {
    auto g = htf::GridSpec::make(log_size, 2);
    return htf::Signal2D(g, random_vec(rng, static_cast<std::size_t>(g.size()) * g.size()));
}

// random signal with spectrum restricted to |xi| <= band
inline htf::Signal1D band_limited(std::mt19937_64& rng, int log_size, int band) {
    auto g = htf::GridSpec::make(log_size);
    const int n = g.size();
    htf::Signal1D fh(g);
    std::normal_distribution<double> d;
    for (int k = 0; k < n; ++k)
        if (std::abs(htf::freq_rep(k, n)) <= band) fh.samples[k] = cplx(d(rng), d(rng));
    return htf::idft(fh);
}

inline htf::Signal1D exp_mode(const htf::GridSpec& g, long long k) {
    htf::Signal1D f(g);
    const int n = g.size();
    for (int x = 0; x < n; ++x) f.samples[x] = std::polar(1.0, 2.0 * M_PI * static_cast<double>((k * x) % n) / n);
    return f;
}

// naive O(N^2) transform, the oracle for the FFT
inline std::vector<cplx> naive_dft(const std::vector<cplx>& f, int sign) {
    const std::size_t n = f.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx s = 0;
        for (std::size_t x = 0; x < n; ++x)
            s += f[x] * std::polar(1.0, sign * 2.0 * M_PI * static_cast<double>((k * x) % n) / static_cast<double>(n));
        out[k] = s;
    }
    return out;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<cplx>& a) {
    double m = 0;
    for (const auto& z : a) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace testutil
