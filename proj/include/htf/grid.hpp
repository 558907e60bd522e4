#pragma once

#include <limits>
#include <string>
#include <vector>

#include "htf/common.hpp"

namespace htf {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridSpec {
    int log_size = 3;
    int axes = 1;

    static GridSpec make(int log_size, int axes = 1);
    static GridSpec from_size(long long n, int axes = 1);
    int size() const { return 1 << log_size; }
    bool operator==(const GridSpec&) const = default;
};

// Integer frequency representative in (-N/2, N/2] for bin index k in [0, N).
inline int freq_rep(int k, int n) { return k > n / 2 ? k - n : k; }
inline int freq_bin(long long xi, int n) {
    long long r = xi % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

struct Signal1D {
    GridSpec grid;
    std::vector<cplx> samples;

    Signal1D() = default;
    explicit Signal1D(GridSpec g);
    Signal1D(GridSpec g, std::vector<cplx> s);
    int size() const { return grid.size(); }
    cplx& operator[](int n) { return samples[n]; }
    const cplx& operator[](int n) const { return samples[n]; }
};

// Row index is x, column index is y: samples[x * N + y].
struct Signal2D {
    GridSpec grid;
    std::vector<cplx> samples;

    Signal2D() = default;
    explicit Signal2D(GridSpec g);
    Signal2D(GridSpec g, std::vector<cplx> s);
    int size() const { return grid.size(); }
    cplx& at(int x, int y) { return samples[static_cast<std::size_t>(x) * size() + y]; }
    const cplx& at(int x, int y) const { return samples[static_cast<std::size_t>(x) * size() + y]; }
};

// Either a flat list of signals or a list of sub-families (one nesting level per index).
struct SignalFamily {
    std::vector<Signal1D> members;
    std::vector<SignalFamily> children;

    bool nested() const { return !children.empty(); }
    std::size_t length() const { return nested() ? children.size() : members.size(); }
    int depth() const { return nested() ? 1 + children.front().depth() : 1; }
    GridSpec grid() const;
};

struct ExponentTuple {
    double inv_p = 0.0;
    double inv_q = 0.0;
    double inv_sprime = 0.0;
};

inline double inv_of(double p) { return p == kInf ? 0.0 : 1.0 / p; }

// mutation hook for the verify harness: perturbs one bin of every forward 1D transform
void set_dft_fault(bool on);

Signal1D dft(const Signal1D& f);
Signal1D idft(const Signal1D& fhat);
Signal2D dft(const Signal2D& f);
Signal2D idft(const Signal2D& fhat);
// axis 0 = x (rows), axis 1 = y (columns)
Signal2D dft_axis(const Signal2D& f, int axis);
Signal2D idft_axis(const Signal2D& fhat, int axis);

// raw transforms on a buffer of length n (power of two); sign -1 forward, +1 inverse (unnormalized)
void fft_inplace(std::vector<cplx>& a, int sign);

double lp_norm(const std::vector<cplx>& v, double p);
double lp_norm(const Signal1D& f, double p);
double lp_norm(const Signal2D& f, double p);
double mixed_norm(const Signal2D& f, double p1, double p2);

// Pointwise l^r aggregation. For nested families rs lists exponents outermost first;
// the innermost index is aggregated first.
Signal1D lr_family_norm(const SignalFamily& fam, const std::vector<double>& rs);
Signal1D lr_family_norm(const SignalFamily& fam, double r);
// L^r(l^r) value of the same aggregation.
double lr_family_norm_value(const SignalFamily& fam, double r);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

// Signal files: CSV with "# N=<int> axes=<1|2>" then "re,im"; binary "HTF1" + u32 N + u32 axes + u32 0.
struct SignalFile {
    int n = 0;
    int axes = 1;
    std::vector<cplx> samples;
};

SignalFile read_signal_file(const std::string& path);
void write_signal_csv(const SignalFile& s, const std::string& path);
void write_signal_binary(const SignalFile& s, const std::string& path);
std::string signal_to_csv(const SignalFile& s);
SignalFile signal_from_csv(const std::string& text);

}  // namespace htf
