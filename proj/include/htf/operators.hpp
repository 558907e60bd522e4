#pragma once

#include <array>
#include <vector>

#include "htf/size_energy.hpp"

namespace htf {

// Multiplier 1_{xi < eta} on integer representatives; the diagonal contributes nothing.
Signal1D bht_direct(const Signal1D& f, const Signal1D& g);
Signal1D bht_direct_reference(const Signal1D& f, const Signal1D& g);

Signal1D bht_model(const Signal1D& f, const Signal1D& g, const TileSet& s, const Window& w = {});
Signal1D bht_model(const Signal1D& f, const Signal1D& g, const TileSet& s, const PacketBank& bank);

struct TrilinearValue {
    cplx value;
    std::vector<cplx> breakdown;  // per tile, in tileset order
};

TrilinearValue trilinear_form(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                              bool keep_breakdown = false, const Window& w = {});
TrilinearValue trilinear_form(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                              const PacketBank& bank, bool keep_breakdown = false);
// (1/N) sum_x a(x) h(x), the bilinear pairing used for duality
cplx pairing(const Signal1D& a, const Signal1D& h);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // 0 when both sides vanish
    std::array<double, 3> sizes{};
    std::array<double, 3> energies{};
};

// |Lambda| against prod size_j^theta_j energy_j^(1 - theta_j); theta_j in [0, 1), summing to 1
BoundCheck trilinear_size_energy_bound_check(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                                             const std::array<double, 3>& theta, const PacketBank& bank);

// f split by scaled distance to I0: piece 0 on d <= 1, piece k on 2^{k-1} < d <= 2^k.
std::vector<Signal1D> shell_pieces(const Signal1D& f, const DyadicInterval& i0);

enum class ParaKind { I, II, III };

struct ParaproductSpec {
    ParaKind kind = ParaKind::II;
    std::vector<int> scales;  // empty means every k in [0, L-1]
};

// Low-pass partner of Q_k is P_{k-3}; the widened outer multiplier is 1 on the support of the
// product, so the scale sums below are the paraproducts.
int para_low_scale(int k);
double para_outer_symbol(ParaKind kind, long long xi, int k);
std::vector<int> para_scales(const ParaproductSpec& spec, const GridSpec& grid);

Signal1D paraproduct(const Signal1D& f, const Signal1D& g, const ParaproductSpec& spec);

struct DiscreteParaSpec {
    std::array<bool, 3> lacunary{true, true, false};
};

Signal1D paraproduct_discrete(const Signal1D& f, const Signal1D& g, const std::vector<DyadicInterval>& ivs,
                              const DiscreteParaSpec& spec);
cplx paraproduct_discrete_form(const Signal1D& f, const Signal1D& g, const Signal1D& h,
                               const std::vector<DyadicInterval>& ivs, const DiscreteParaSpec& spec);

// sup over cuts of |partial Fourier sum below the cut|, cuts ordered by representative
Signal1D carleson(const Signal1D& f);

// per-axis paraproduct kinds; output sum_{k,l} (A_k^x A_l^y f)(B_k^x B_l^y g)
Signal2D biparam_paraproduct(const Signal2D& f, const Signal2D& g, const std::array<ParaproductSpec, 2>& specs);

// BHT along x, paraproduct along y: scale-sum form
Signal2D tensor_bht_paraproduct(const Signal2D& f, const Signal2D& g, const ParaproductSpec& spec);
// the same operator from its 2D multiplier, quadruple frequency sum (small N only)
Signal2D tensor_bht_paraproduct_direct(const Signal2D& f, const Signal2D& g, const ParaproductSpec& spec);

// (sum_k |Q_k f|^2)^{1/2}, k in [0, L-1]; the mean is not included
Signal1D square_function(const Signal1D& f);
// axes: 1 = x, 2 = y, 3 = both (double sum over scale pairs)
Signal2D square_function(const Signal2D& f, int axes);

}  // namespace htf
