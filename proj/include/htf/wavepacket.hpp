#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "htf/dyadic.hpp"
#include "htf/grid.hpp"

namespace htf {

struct Window {
    double flat_fraction = 0.8;

    // 1 on [-flat, flat], 0 outside (-1, 1), C-infinity in between
    double operator()(double t) const;
};

// Inclusive integer frequency range [a, b].
struct FreqInterval {
    long long a = 0;
    long long b = 0;
    bool contains(long long xi) const { return a <= xi && xi <= b; }
};

struct WavePacket {
    Tile tile;
    GridSpec grid;
    long long k_lo = 0;         // frequency representative of spectrum[0]
    std::vector<cplx> spectrum;  // unnormalized DFT values on k_lo, k_lo+1, ...
    double l2norm = 1.0;

    Signal1D samples() const;
    Signal1D spectrum_full() const;
    long long k_hi() const { return k_lo + static_cast<long long>(spectrum.size()) - 1; }
};

WavePacket make_wave_packet(const Tile& t, const Window& w, const GridSpec& grid);
// window w((xi - c)/h) modulated to xc, unit L2 norm; fails when no bin or an unrepresentable bin is hit
WavePacket make_packet_at(const Tile& t, double c, double h, double xc, const Window& w, const GridSpec& grid);

// (1/N) sum f conj(phi)
cplx inner_product(const Signal1D& f, const WavePacket& phi);
// packet against packet from the sparse spectra; exactly 0 for disjoint supports
cplx inner_product(const WavePacket& a, const WavePacket& b);
// same value from a precomputed dft(f)
cplx inner_product_hat(const Signal1D& fhat, const WavePacket& phi);
// (1/N) sum f phi, the unconjugated pairing used for the third slot
cplx pairing_hat(const Signal1D& fhat, const WavePacket& phi);
// adds c * phi to an accumulated spectrum
void accumulate_packet(Signal1D& acc_hat, const WavePacket& phi, cplx c);

// Fourier multiplier with symbol evaluated at the integer representative in (-N/2, N/2]
Signal1D apply_symbol(const Signal1D& f, const std::function<cplx(long long)>& sym);
Signal2D apply_symbol_axis(const Signal2D& f, int axis, const std::function<cplx(long long)>& sym);

Signal1D fourier_project(const Signal1D& f, const FreqInterval& iv, bool sharp);

// Littlewood-Paley bump: 1 on [-1/2, 1/2], supported in [-1, 1]
double lp_bump(double t);
double lp_p_symbol(long long xi, int k);
double lp_q_symbol(long long xi, int k);

struct LPPair {
    Signal1D p;
    Signal1D q;
};

LPPair lp_projections(const Signal1D& f, int k);
LPPair shifted_ops(const Signal1D& f, int k, long long n);

Signal1D fractional_derivative(const Signal1D& f, double alpha);
Signal2D fractional_derivative(const Signal2D& f, double alpha, int axis);

Signal1D chi_tilde(const DyadicInterval& iv, int mexp, const GridSpec& grid);
constexpr int kDefaultChiExp = 20;

// Whitney-type rank-1 family. Scale index s uses frequency width w = 4 * 2^s and space
// intervals of length 1/w; per scale the triples are
//   w[a, a+1), w[a+8, a+9), w([0,1) + 2a+8 + (-1)^k/3)    (w = 2^k)
// for every integer a keeping all three inside (-N/2, N/2]. The third components all lie
// on the one-third shifted dyadic grid.
TileSet canonical_tileset(const GridSpec& grid, const std::vector<int>& scales);
// all scales that fit on the grid
std::vector<int> canonical_scales(const GridSpec& grid);

}  // namespace htf
