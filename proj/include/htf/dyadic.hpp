#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "htf/common.hpp"

namespace htf {

// Endpoints are exact integers in units of 2^-kUnitLog / 3.
constexpr int kUnitLog = 24;

// [(m + shift3/3) 2^-j, (m + 1 + shift3/3) 2^-j), shift3 in {-1, 0, 1}
struct DyadicInterval {
    int j = 0;
    long long m = 0;
    int shift3 = 0;

    static DyadicInterval make(int j, long long m, int shift3 = 0);
    long long left_units() const;
    long long right_units() const;
    long long length_units() const { return right_units() - left_units(); }
    double left() const;
    double right() const;
    double length() const;
    // Shifted intervals belong to the grid 2^-j([0,1) + m + (-1)^j/3), which nests across
    // scales; the sign of shift3 alternates with j inside one grid.
    int grid_id() const { return (j % 2 == 0) ? shift3 : -shift3; }
    DyadicInterval parent() const { return make(j - 1, floor_div2(m + shift3), -shift3); }
    DyadicInterval child(int side) const { return make(j + 1, 2 * m + shift3 + side, -shift3); }
    bool operator==(const DyadicInterval&) const = default;
    auto operator<=>(const DyadicInterval& o) const {
        return std::tuple(j, m, shift3) <=> std::tuple(o.j, o.m, o.shift3);
    }

private:
    static long long floor_div2(long long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
};

bool contains(const DyadicInterval& outer, const DyadicInterval& inner);  // inner ⊆ outer
bool strictly_contains(const DyadicInterval& outer, const DyadicInterval& inner);
bool intersects(const DyadicInterval& a, const DyadicInterval& b);
// inner ⊆ c·outer (dilation about the centre)
bool contained_in_dilate(const DyadicInterval& inner, const DyadicInterval& outer, long long c);
// c·a ∩ c·b ≠ ∅
bool dilates_intersect(const DyadicInterval& a, const DyadicInterval& b, long long c);

struct Tile {
    DyadicInterval space;
    DyadicInterval freq;
    bool operator==(const Tile&) const = default;
};

struct TriTile {
    DyadicInterval space;
    std::array<DyadicInterval, 3> freqs;

    Tile component(int i) const { return Tile{space, freqs[static_cast<std::size_t>(i)]}; }
    bool operator==(const TriTile&) const = default;
};

struct TileSet {
    std::vector<TriTile> tiles;
    bool rank1_certified = false;

    std::size_t size() const { return tiles.size(); }
    bool empty() const { return tiles.empty(); }
};

// Component indices are 0-based (0, 1, 2) in code.
struct Tree {
    TriTile top;
    std::vector<int> members;  // indices into the owning TileSet
    int tree_index = 0;
};

bool tile_lt(const Tile& pp, const Tile& p);
bool tile_le(const Tile& pp, const Tile& p);
bool tile_lesssim(const Tile& pp, const Tile& p);
bool tile_lesssim_prime(const Tile& pp, const Tile& p);

struct RankOneReport {
    bool ok = true;
    int first = -1;
    int second = -1;
    int bullet = 0;  // 1..4
};

RankOneReport check_rank_one(const TileSet& s);
// Runs check_rank_one and sets the flag, throwing on failure.
TileSet certify(TileSet s);

std::vector<Tree> extract_trees(const TileSet& s, int j, int i);
bool strongly_disjoint_check(const TileSet& s, const std::vector<Tree>& trees, int i);
TileSet restrict_to(const TileSet& s, const DyadicInterval& i0);

std::string tiles_to_json(const TileSet& s);
TileSet tiles_from_json(const std::string& text);

}  // namespace htf
