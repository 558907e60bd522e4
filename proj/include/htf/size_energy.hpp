#pragma once

#include <vector>

#include "htf/dyadic.hpp"
#include "htf/grid.hpp"
#include "htf/wavepacket.hpp"

namespace htf {

// Packets for every tile of a set: packets[t][c] is the wave packet on component c of tile t.
struct PacketBank {
    GridSpec grid;
    std::vector<std::array<WavePacket, 3>> packets;
};

PacketBank make_packets(const TileSet& s, const Window& w, const GridSpec& grid);

// Coefficients of one component. Components 0 and 1 use <f, phi>; component 2 uses the
// trilinear-form pairing (1/N) sum f phi = <f, conj(phi)>.
struct CoeffMap {
    TileSet tileset;
    int component = 0;
    std::vector<cplx> values;
};

CoeffMap coefficients(const Signal1D& f, const TileSet& s, const PacketBank& bank, int component);
CoeffMap coefficients(const Signal1D& f, const TileSet& s, int component, const Window& w = {});

struct SizeReport {
    double value = 0.0;
    bool has_witness = false;
    Tree witness;
};

// sup over i-trees (i != component) with tops drawn from the set; greedy=true uses the
// extract_trees partition instead (not used by acceptance runs)
SizeReport size(const CoeffMap& c, bool greedy = false);
double tree_size_value(const CoeffMap& c, const Tree& t);

// Weighted average (1/|I|) * integral |f| chi_I^M, integral with the normalized measure.
double chi_average(const Signal1D& absf, const DyadicInterval& iv, int mexp);
double simple_size(const Signal1D& f, const TileSet& s, int mexp = kDefaultChiExp);
struct ModifiedSize {
    double value = 0.0;
    DyadicInterval witness;
};
ModifiedSize modified_size(const Signal1D& f, const TileSet& s, const DyadicInterval& i0, int mexp = kDefaultChiExp);

struct EnergyReport {
    double value = 0.0;
    int level = 0;
    std::vector<Tree> chain;
};

EnergyReport energy(const CoeffMap& c);
// Chains selected per level (for inspection); every returned chain passes strongly_disjoint_check.
std::vector<std::pair<int, std::vector<Tree>>> energy_chains(const CoeffMap& c);

// energy over P(I0) of f supported where 2^{k-1} <= dist(x, I0)/|I0| <= 2^k
double localized_energy(const Signal1D& f, const TileSet& s, const DyadicInterval& i0, int k, int component);
struct DecayRow {
    int k = 0;
    double energy = 0.0;
    double l2 = 0.0;
};
// g restricted to each shell k = 1..kmax, plus the control row k = 0 (g on 5 I0)
std::vector<DecayRow> localized_energy_decay(const Signal1D& g, const TileSet& s, const DyadicInterval& i0, int component, int kmax);
double scaled_distance(double x, const DyadicInterval& i0);

// Paraproduct packets: lacunary on I x [1/|I|, 2/|I|], non-lacunary centred at frequency 0.
WavePacket make_para_packet(const DyadicInterval& iv, bool lacunary, const GridSpec& grid);
std::vector<cplx> para_coefficients(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary);

// sup_lambda lambda |{v > lambda}| with the normalized measure (1/N per sample)
double weak_l1(std::vector<double> v);

struct ParaSize {
    double value = 0.0;
    int witness = -1;
};
ParaSize paraproduct_size(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary);
double paraproduct_energy(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary);
// the per-interval quantity compared against 2^n in the energy
std::vector<double> paraproduct_local_sizes(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary);

Signal1D maximal_function(const Signal1D& f);
Signal1D shifted_maximal(const Signal1D& f, long long n);
// max over lambda of lambda |{Mf > lambda}| / ||f||_1
double weak11_ratio(const Signal1D& f);

}  // namespace htf
