#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "htf/operators.hpp"
#include "htf/size_energy.hpp"

namespace htf {

// normalized measure of a 0/1 signal
double mask_measure(const Signal1D& mask);

struct ExceptionalSet {
    Signal1D mask;
    double constant_used = 0.0;
    double measure = 0.0;
};

// {M 1_F > C|F|} union {M 1_G > C|G|}, C doubled from 1 until the measure fits the budget
ExceptionalSet exceptional_set(const Signal1D& f_mask, const Signal1D& g_mask, double budget);
ExceptionalSet exceptional_set_at(const Signal1D& f_mask, const Signal1D& g_mask, double c);

// d = 0 iff I_P meets the complement; otherwise d = max(1, ceil(log2(1 + dist/|I_P|)))
std::map<int, TileSet> distance_partition(const TileSet& s, const ExceptionalSet& omega);
int distance_class(const DyadicInterval& iv, const Signal1D& omega_mask);

struct SelectedInterval {
    DyadicInterval iv;
    double average = 0.0;
    std::vector<int> tiles;  // indices into the input set
};

struct StoppingLevel {
    int n = 0;
    std::vector<SelectedInterval> intervals;
};

struct Decomposition {
    std::vector<StoppingLevel> levels;
    std::vector<int> leftover;
    int start_level = 0;
    int mexp = kDefaultChiExp;
};

// Levels use half-open windows [2^{-n-1}, 2^{-n}) for the chi-weighted average of the weight.
// anchor_d shifts the starting level to 2^{-n} ~ 2^d |F|.
Decomposition stopping_time_select(const TileSet& s, const Signal1D& weight, int mexp = kDefaultChiExp, int anchor_d = 0);

struct DecompositionCheck {
    bool partition = true;
    bool disjoint = true;
    bool certificates = true;
    bool maximal = true;
    int violations = 0;
    std::string first_problem;
    bool ok() const { return violations == 0; }
};

DecompositionCheck check_decomposition(const TileSet& s, const Signal1D& weight, const Decomposition& d);
// sup over levels of sum |I| / (2^n |F|)
double packing_constant(const Decomposition& d, const Signal1D& weight);
std::string decomposition_to_json(const Decomposition& d, const TileSet& s);

struct TripleCell {
    std::array<int, 3> n{};
    DyadicInterval iv;
    std::vector<int> tiles;
    std::array<double, 3> averages{};  // chi-weighted averages of the three masks over iv
};

struct TripleStopping {
    std::array<Decomposition, 3> runs;
    std::vector<TripleCell> cells;
    std::array<double, 3> packing{};
};

TripleStopping triple_stopping(const TileSet& s, const Signal1D& f_mask, const Signal1D& g_mask, const Signal1D& h_mask,
                               int mexp = kDefaultChiExp);
// every tile in exactly one cell, each cell average below 2^{-n_i}
bool check_triple(const TileSet& s, const TripleStopping& t, std::string* problem = nullptr);

TrilinearValue localized_trilinear(const Signal1D& f, const Signal1D& g, const Signal1D& h, const Signal1D& f_mask,
                                   const Signal1D& g_mask, const Signal1D& h_mask, const DyadicInterval& i0, const TileSet& s,
                                   const PacketBank& bank);

struct PnConfig {
    int level = 0;
    std::array<double, 3> theta{1.0 / 3, 1.0 / 3, 1.0 / 3};
    double eps = 0.05;
    std::array<double, 3> inv_r{0.5, 0.5, 0.0};  // (1/r1, 1/r2, 1/r'), level 1 only
    int mexp = kDefaultChiExp;
};

// Level 0 uses single-member families. Members must satisfy the pointwise domination by the masks.
struct PnInstance {
    Signal1D f_mask, g_mask, h_mask;
    SignalFamily f, g, h;
    DyadicInterval i0;
};

struct PnRow {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::array<double, 3> sizes{};
};

void check_pn_config(const PnConfig& c);
PnRow pn_ratio(const PnInstance& inst, const TileSet& s, const PacketBank& bank, const PnConfig& c);
// masks of the given density, dominated random members (one member at level 0)
PnInstance random_pn_instance(const GridSpec& grid, const DyadicInterval& i0, const PnConfig& c, int members, double density,
                              std::uint64_t seed);

}  // namespace htf
