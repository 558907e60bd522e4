#include "htf/dyadic.hpp"

#include <algorithm>
#include <numeric>

#include <map>
#include <set>

#include "json.hpp"

namespace htf {

DyadicInterval DyadicInterval::make(int j, long long m, int shift3) {
    if (j < -kUnitLog || j > kUnitLog) fail(ErrorCode::domain, "dyadic scale out of range");
    if (shift3 < -1 || shift3 > 1) fail(ErrorCode::domain, "dyadic shift must be 0 or +-1/3");
    return DyadicInterval{j, m, shift3};
}

long long DyadicInterval::left_units() const { return (3 * m + shift3) * (1LL << (kUnitLog - j)); }
long long DyadicInterval::right_units() const { return (3 * (m + 1) + shift3) * (1LL << (kUnitLog - j)); }

namespace {
constexpr double kUnit = 1.0 / (3.0 * static_cast<double>(1LL << kUnitLog));
}

double DyadicInterval::left() const { return static_cast<double>(left_units()) * kUnit; }
double DyadicInterval::right() const { return static_cast<double>(right_units()) * kUnit; }
double DyadicInterval::length() const { return static_cast<double>(length_units()) * kUnit; }

bool contains(const DyadicInterval& outer, const DyadicInterval& inner) {
    return outer.left_units() <= inner.left_units() && inner.right_units() <= outer.right_units();
}

bool strictly_contains(const DyadicInterval& outer, const DyadicInterval& inner) {
    return contains(outer, inner) && !(outer.left_units() == inner.left_units() && outer.right_units() == inner.right_units());
}

bool intersects(const DyadicInterval& a, const DyadicInterval& b) {
    return a.left_units() < b.right_units() && b.left_units() < a.right_units();
}

bool contained_in_dilate(const DyadicInterval& inner, const DyadicInterval& outer, long long c) {
    const long long s = outer.left_units() + outer.right_units();
    const long long h = c * outer.length_units();
    return s - h <= 2 * inner.left_units() && 2 * inner.right_units() <= s + h;
}

bool dilates_intersect(const DyadicInterval& a, const DyadicInterval& b, long long c) {
    const long long sa = a.left_units() + a.right_units(), ha = c * a.length_units();
    const long long sb = b.left_units() + b.right_units(), hb = c * b.length_units();
    return sa - ha < sb + hb && sb - hb < sa + ha;
}

bool tile_lt(const Tile& pp, const Tile& p) {
    return strictly_contains(p.space, pp.space) && contained_in_dilate(p.freq, pp.freq, 3);
}

bool tile_le(const Tile& pp, const Tile& p) { return pp == p || tile_lt(pp, p); }

bool tile_lesssim(const Tile& pp, const Tile& p) {
    return contains(p.space, pp.space) && contained_in_dilate(p.freq, pp.freq, 100);
}

bool tile_lesssim_prime(const Tile& pp, const Tile& p) { return tile_lesssim(pp, p) && !tile_le(pp, p); }

namespace {

// Bullets for the ordered pair (P, P'); 0 when satisfied.
int rank_one_violation(const TriTile& p, const TriTile& pp) {
    // called for index-distinct entries, so a repeated tri-tile counts as a violation
    for (int j = 0; j < 3; ++j)
        if (p.component(j) == pp.component(j)) return 1;
    for (int j0 = 0; j0 < 3; ++j0) {
        if (p.freqs[j0] == pp.freqs[j0]) {
            for (int j = 0; j < 3; ++j)
                if (!(p.freqs[j] == pp.freqs[j])) return 2;
        }
    }
    for (int j0 = 0; j0 < 3; ++j0) {
        if (!tile_le(pp.component(j0), p.component(j0))) continue;
        for (int j = 0; j < 3; ++j)
            if (!tile_lesssim(pp.component(j), p.component(j))) return 3;
        // |I_P'| << |I_P| read as a ratio of at least 4
        if (4 * pp.space.length_units() <= p.space.length_units()) {
            for (int j = 0; j < 3; ++j)
                if (j != j0 && !tile_lesssim_prime(pp.component(j), p.component(j))) return 4;
        }
    }
    return 0;
}

}  // namespace

namespace {

RankOneReport first_violation_scan(const TileSet& s) {
    RankOneReport rep;
    const int n = static_cast<int>(s.size());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            int v = rank_one_violation(s.tiles[a], s.tiles[b]);
            if (v != 0) {
                rep.ok = false;
                rep.first = a;
                rep.second = b;
                rep.bullet = v;
                return rep;
            }
        }
    }
    return rep;
}

using IvKey = std::tuple<int, long long, int>;
IvKey key_of(const DyadicInterval& d) { return {d.j, d.m, d.shift3}; }

// Indexed search for any violation. Only pairs that can trigger a bullet are visited:
// equal components (bullets 1, 2) and pairs with P'_j0 < P_j0 (bullets 3, 4).
bool any_violation(const TileSet& s) {
    const int n = static_cast<int>(s.size());
    for (int c = 0; c < 3; ++c) {
        std::map<std::tuple<IvKey, IvKey>, int> by_tile;
        std::map<IvKey, int> by_freq;
        for (int a = 0; a < n; ++a) {
            const auto& t = s.tiles[a];
            auto [it, fresh] = by_tile.emplace(std::tuple(key_of(t.space), key_of(t.freqs[c])), a);
            if (!fresh) return true;
            auto [jt, fresh2] = by_freq.emplace(key_of(t.freqs[c]), a);
            if (!fresh2 && !(s.tiles[jt->second].freqs == t.freqs)) return true;
        }
    }
    for (int c = 0; c < 3; ++c) {
        // (freq interval, space scale, space offset) -> tile; shifts of space intervals are always 0 here
        std::map<std::tuple<IvKey, int, long long>, int> index;
        std::set<std::pair<int, int>> freq_types;  // (freq scale, shift3)
        for (int a = 0; a < n; ++a) {
            const auto& t = s.tiles[a];
            if (t.space.shift3 != 0 || t.space.j != -t.freqs[c].j) return !first_violation_scan(s).ok;
            index.emplace(std::tuple(key_of(t.freqs[c]), t.space.j, t.space.m), a);
            freq_types.insert({t.freqs[c].j, t.freqs[c].shift3});
        }
        for (int a = 0; a < n; ++a) {
            const auto& p = s.tiles[a];
            const DyadicInterval& w = p.freqs[c];
            for (auto [fj, sh] : freq_types) {
                if (fj >= w.j) continue;  // need |omega'| > |omega_P|
                const long long len = 3LL * (1LL << (kUnitLog - fj));
                const int space_j = -fj;
                if (space_j > kUnitLog) continue;
                const long long base = (w.left_units() - sh * (len / 3)) / len;
                const long long mlo = base - 3, mhi = base + 3;
                for (long long mm = mlo; mm <= mhi; ++mm) {
                    DyadicInterval cand{fj, mm, sh};
                    if (!contained_in_dilate(w, cand, 3)) continue;
                    const long long scale = 1LL << (space_j - p.space.j);
                    auto lo = index.lower_bound(std::tuple(key_of(cand), space_j, p.space.m * scale));
                    auto hi = index.lower_bound(std::tuple(key_of(cand), space_j, (p.space.m + 1) * scale));
                    for (auto it = lo; it != hi; ++it) {
                        if (rank_one_violation(p, s.tiles[it->second]) != 0) return true;
                    }
                }
            }
        }
    }
    return false;
}

}  // namespace

RankOneReport check_rank_one(const TileSet& s) {
    if (!any_violation(s)) return RankOneReport{};
    return first_violation_scan(s);
}

TileSet certify(TileSet s) {
    auto rep = check_rank_one(s);
    if (!rep.ok)
        fail(ErrorCode::precondition, "tile set is not rank 1: pair (" + std::to_string(rep.first) + ", " +
                                          std::to_string(rep.second) + ") violates bullet " + std::to_string(rep.bullet));
    s.rank1_certified = true;
    return s;
}

std::vector<Tree> extract_trees(const TileSet& s, int j, int i) {
    if (i < 0 || i > 2 || j < 0 || j > 2 || i == j) fail(ErrorCode::domain, "extract_trees: need component i != j in {0,1,2}");
    const int n = static_cast<int>(s.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& ta = s.tiles[a];
        const auto& tb = s.tiles[b];
        if (ta.space.length_units() != tb.space.length_units()) return ta.space.length_units() > tb.space.length_units();
        if (ta.space.left_units() != tb.space.left_units()) return ta.space.left_units() < tb.space.left_units();
        return ta.freqs[i].left_units() < tb.freqs[i].left_units();
    });
    std::vector<char> used(n, 0);
    std::vector<Tree> out;
    for (int t : order) {
        if (used[t]) continue;
        Tree tree;
        tree.top = s.tiles[t];
        tree.tree_index = i;
        const Tile top_i = tree.top.component(i);
        for (int p = 0; p < n; ++p) {
            if (!used[p] && tile_le(s.tiles[p].component(i), top_i)) {
                used[p] = 1;
                tree.members.push_back(p);
            }
        }
        out.push_back(std::move(tree));
    }
    return out;
}

bool strongly_disjoint_check(const TileSet& s, const std::vector<Tree>& trees, int i) {
    const int m = static_cast<int>(trees.size());
    for (int l1 = 0; l1 < m; ++l1) {
        for (int l2 = 0; l2 < m; ++l2) {
            if (l1 == l2) continue;
            const auto& top1 = trees[l1].top.space;
            const auto& top2 = trees[l2].top.space;
            for (int a : trees[l1].members) {
                const TriTile& p = s.tiles[a];
                for (int b : trees[l2].members) {
                    const TriTile& pp = s.tiles[b];
                    if (p.component(i) == pp.component(i)) return false;
                    if (!dilates_intersect(p.freqs[i], pp.freqs[i], 2)) continue;
                    const long long lp = p.freqs[i].length_units(), lpp = pp.freqs[i].length_units();
                    if (lp < lpp && intersects(pp.space, top1)) return false;
                    if (lpp < lp && intersects(p.space, top2)) return false;
                    if (lp == lpp && l1 < l2 && intersects(pp.space, top1)) return false;
                }
            }
        }
    }
    return true;
}

TileSet restrict_to(const TileSet& s, const DyadicInterval& i0) {
    TileSet out;
    out.rank1_certified = s.rank1_certified;  // subsets of rank 1 sets are rank 1
    for (const auto& t : s.tiles)
        if (contains(i0, t.space)) out.tiles.push_back(t);
    return out;
}

namespace {

nlohmann::json interval_json(const DyadicInterval& d) {
    nlohmann::json shift;
    if (d.shift3 == 0) shift = 0;
    else shift = d.shift3 > 0 ? "1/3" : "-1/3";
    return {{"j", d.j}, {"m", d.m}, {"shift", shift}};
}

DyadicInterval interval_from(const nlohmann::json& o) {
    int shift3 = 0;
    const auto& sh = o.at("shift");
    if (sh.is_string()) {
        const auto v = sh.get<std::string>();
        if (v == "1/3") shift3 = 1;
        else if (v == "-1/3") shift3 = -1;
        else if (v == "0") shift3 = 0;
        else fail(ErrorCode::io, "tile json: bad shift " + v);
    } else {
        shift3 = sh.get<int>() * 3;
        if (shift3 != 0) fail(ErrorCode::io, "tile json: numeric shift must be 0");
    }
    return DyadicInterval::make(o.at("j").get<int>(), o.at("m").get<long long>(), shift3);
}

}  // namespace

std::string tiles_to_json(const TileSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : s.tiles) {
        nlohmann::json freqs = nlohmann::json::array();
        for (const auto& f : t.freqs) freqs.push_back(interval_json(f));
        arr.push_back({{"space", interval_json(t.space)}, {"freqs", freqs}});
    }
    return arr.dump();
}

TileSet tiles_from_json(const std::string& text) {
    TileSet s;
    try {
        auto arr = nlohmann::json::parse(text);
        for (const auto& o : arr) {
            TriTile t;
            t.space = interval_from(o.at("space"));
            const auto& fr = o.at("freqs");
            if (fr.size() != 3) fail(ErrorCode::io, "tile json: expected three frequency intervals");
            for (int k = 0; k < 3; ++k) t.freqs[k] = interval_from(fr.at(k));
            s.tiles.push_back(t);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, std::string("tile json: ") + e.what());
    }
    return s;
}

}  // namespace htf
