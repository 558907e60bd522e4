#include "htf/helicoid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"

namespace htf {

namespace {

void require_mask(const Signal1D& m, const char* what) {
    for (const auto& v : m.samples)
        if (v.imag() != 0.0 || (v.real() != 0.0 && v.real() != 1.0))
            fail(ErrorCode::domain, std::string(what) + " must be a 0/1 signal");
}

double circ_dist(double u, double v) {
    double d = std::fmod(std::abs(u - v), 1.0);
    return std::min(d, 1.0 - d);
}

// distance on the torus from x to the half-open interval; 0 inside
double dist_to_interval(double x, const DyadicInterval& iv) {
    if (iv.length() >= 1.0) return 0.0;
    const double l = iv.left(), r = iv.right();
    const double xr = x - std::floor(x - l);
    if (xr < r) return 0.0;
    return std::min(circ_dist(x, l), circ_dist(x, r));
}

// window index n with a in [2^{-n-1}, 2^{-n})
int window_of(double a) {
    int e = 0;
    std::frexp(a, &e);
    return -e;
}

}  // namespace

double mask_measure(const Signal1D& mask) {
    double s = 0.0;
    for (const auto& v : mask.samples) s += v.real();
    return s / mask.size();
}

ExceptionalSet exceptional_set_at(const Signal1D& f_mask, const Signal1D& g_mask, double c) {
    require_same_grid(f_mask.grid, g_mask.grid, "exceptional_set");
    require_mask(f_mask, "F mask");
    require_mask(g_mask, "G mask");
    const double mf = mask_measure(f_mask), mg = mask_measure(g_mask);
    if (mf == 0.0 || mg == 0.0) fail(ErrorCode::precondition, "exceptional_set: masks must be non-empty");
    const auto a = maximal_function(f_mask);
    const auto b = maximal_function(g_mask);
    ExceptionalSet out;
    out.constant_used = c;
    out.mask = Signal1D(f_mask.grid);
    for (int x = 0; x < f_mask.size(); ++x) {
        const bool in = a[x].real() > c * mf || b[x].real() > c * mg;
        out.mask[x] = in ? 1.0 : 0.0;
    }
    out.measure = mask_measure(out.mask);
    return out;
}

ExceptionalSet exceptional_set(const Signal1D& f_mask, const Signal1D& g_mask, double budget) {
    if (!(budget >= 0.0)) fail(ErrorCode::domain, "exceptional_set: budget must be >= 0");
    for (int e = 0; e <= 40; ++e) {
        auto out = exceptional_set_at(f_mask, g_mask, std::ldexp(1.0, e));
        if (out.measure <= budget) return out;
    }
    fail(ErrorCode::precondition, "exceptional_set: budget not reached at C = 2^40");
}

int distance_class(const DyadicInterval& iv, const Signal1D& omega_mask) {
    const int n = omega_mask.size();
    double best = kInf;
    for (int x = 0; x < n; ++x) {
        if (omega_mask[x].real() != 0.0) continue;
        best = std::min(best, dist_to_interval(static_cast<double>(x) / n, iv));
        if (best == 0.0) return 0;
    }
    if (best == kInf) fail(ErrorCode::precondition, "distance_partition: the exceptional set covers the torus");
    return std::max(1, static_cast<int>(std::ceil(std::log2(1.0 + best / iv.length()))));
}

std::map<int, TileSet> distance_partition(const TileSet& s, const ExceptionalSet& omega) {
    std::vector<int> cls(s.size());
    parallel_for(s.size(), [&](std::size_t t) { cls[t] = distance_class(s.tiles[t].space, omega.mask); });
    std::map<int, TileSet> out;
    for (std::size_t t = 0; t < s.size(); ++t) {
        auto& part = out[cls[t]];
        part.rank1_certified = s.rank1_certified;
        part.tiles.push_back(s.tiles[t]);
    }
    return out;
}

// ---- stopping time ----

namespace {

struct Candidates {
    std::vector<DyadicInterval> ivs;           // largest first, then leftmost
    std::vector<double> avg;
    std::vector<std::vector<int>> tiles;       // tiles with I_P inside
    std::vector<std::vector<int>> tile_chain;  // per tile: candidate indices containing it
};

Candidates build_candidates(const TileSet& s, const Signal1D& weight, int mexp) {
    std::set<DyadicInterval> all;
    for (const auto& t : s.tiles) {
        if (t.space.shift3 != 0) fail(ErrorCode::precondition, "stopping time needs unshifted tile spaces");
        if (t.space.j < 0) fail(ErrorCode::precondition, "tile space longer than the torus");
        for (DyadicInterval iv = t.space;; iv = iv.parent()) {
            all.insert(iv);
            if (iv.j == 0) break;
        }
    }
    Candidates c;
    c.ivs.assign(all.begin(), all.end());  // (j, m) order is largest-first, leftmost
    std::map<DyadicInterval, int> index;
    for (std::size_t i = 0; i < c.ivs.size(); ++i) index[c.ivs[i]] = static_cast<int>(i);
    c.avg.resize(c.ivs.size());
    parallel_for(c.ivs.size(), [&](std::size_t i) { c.avg[i] = chi_average(weight, c.ivs[i], mexp); });
    c.tiles.resize(c.ivs.size());
    c.tile_chain.resize(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        for (DyadicInterval iv = s.tiles[t].space;; iv = iv.parent()) {
            const int k = index.at(iv);
            c.tiles[k].push_back(static_cast<int>(t));
            c.tile_chain[t].push_back(k);
            if (iv.j == 0) break;
        }
    }
    return c;
}

bool inside_any(const DyadicInterval& iv, const std::set<DyadicInterval>& chosen) {
    for (DyadicInterval a = iv;; a = a.parent()) {
        if (chosen.count(a)) return true;
        if (a.j == 0) return false;
    }
}

}  // namespace

Decomposition stopping_time_select(const TileSet& s, const Signal1D& weight, int mexp, int anchor_d) {
    require_mask(weight, "weight");
    Decomposition out;
    out.mexp = mexp;
    if (s.empty()) return out;
    const Candidates c = build_candidates(s, weight, mexp);
    std::vector<int> cnt(c.ivs.size());
    for (std::size_t k = 0; k < c.ivs.size(); ++k) cnt[k] = static_cast<int>(c.tiles[k].size());
    std::vector<char> claimed(s.size(), 0);
    std::size_t unclaimed = s.size();

    auto next_window = [&]() {
        double best = -1.0;
        for (std::size_t k = 0; k < c.ivs.size(); ++k)
            if (cnt[k] > 0) best = std::max(best, c.avg[k]);
        if (!(best > 0.0)) fail(ErrorCode::precondition, "stopping time: zero average on an interval with unclaimed tiles");
        return window_of(best);
    };

    const double mf = mask_measure(weight);
    int n = next_window();
    if (mf > 0.0) {
        const int nbar = static_cast<int>(std::floor(-std::log2(std::ldexp(mf, anchor_d))));
        n = std::min(n, nbar);
    }
    out.start_level = n;
    const int guard = n + mexp * (weight.grid.log_size + 2) + 64;

    while (unclaimed > 0) {
        if (n > guard) fail(ErrorCode::precondition, "stopping time did not terminate within the level guard");
        const double lo = std::ldexp(1.0, -n - 1), hi = std::ldexp(1.0, -n);
        StoppingLevel level;
        level.n = n;
        std::set<DyadicInterval> chosen;
        for (std::size_t k = 0; k < c.ivs.size(); ++k) {
            if (cnt[k] == 0) continue;
            const double a = c.avg[k];
            if (!(a >= lo && a < hi)) continue;
            if (inside_any(c.ivs[k], chosen)) continue;
            SelectedInterval sel{c.ivs[k], a, {}};
            for (int t : c.tiles[k]) {
                if (claimed[t]) continue;
                claimed[t] = 1;
                --unclaimed;
                sel.tiles.push_back(t);
                for (int kk : c.tile_chain[t]) --cnt[kk];
            }
            chosen.insert(c.ivs[k]);
            level.intervals.push_back(std::move(sel));
        }
        if (!level.intervals.empty()) out.levels.push_back(std::move(level));
        if (unclaimed == 0) break;
        n = std::max(n + 1, next_window());
    }
    return out;
}

DecompositionCheck check_decomposition(const TileSet& s, const Signal1D& weight, const Decomposition& d) {
    DecompositionCheck r;
    auto bad = [&](bool& flag, const std::string& msg) {
        flag = false;
        if (r.violations++ == 0) r.first_problem = msg;
    };
    std::vector<int> owner_level(s.size(), -1);
    for (std::size_t li = 0; li < d.levels.size(); ++li) {
        const auto& lv = d.levels[li];
        const double lo = std::ldexp(1.0, -lv.n - 1), hi = std::ldexp(1.0, -lv.n);
        for (std::size_t a = 0; a < lv.intervals.size(); ++a) {
            const auto& sel = lv.intervals[a];
            const double avg = chi_average(weight, sel.iv, d.mexp);
            if (!(avg >= lo * (1 - 1e-12) && avg < hi * (1 + 1e-12))) bad(r.certificates, "level certificate fails");
            for (std::size_t b = a + 1; b < lv.intervals.size(); ++b)
                if (intersects(sel.iv, lv.intervals[b].iv)) bad(r.disjoint, "intervals of one level overlap");
            for (int t : sel.tiles) {
                if (t < 0 || static_cast<std::size_t>(t) >= s.size()) {
                    bad(r.partition, "tile index out of range");
                    continue;
                }
                if (owner_level[t] >= 0) bad(r.partition, "tile claimed twice");
                owner_level[t] = static_cast<int>(li);
                if (!contains(sel.iv, s.tiles[t].space)) bad(r.partition, "claimed tile outside its interval");
            }
        }
    }
    for (std::size_t t = 0; t < s.size(); ++t)
        if (owner_level[t] < 0) bad(r.partition, "tile never claimed");
    if (!d.leftover.empty()) bad(r.partition, "leftover tiles");

    // enlargement: no strict ancestor with average in the window holds a tile unclaimed at level start
    for (std::size_t li = 0; li < d.levels.size(); ++li) {
        const auto& lv = d.levels[li];
        const double lo = std::ldexp(1.0, -lv.n - 1), hi = std::ldexp(1.0, -lv.n);
        for (const auto& sel : lv.intervals) {
            if (sel.iv.j == 0) continue;
            for (DyadicInterval a = sel.iv.parent();; a = a.parent()) {
                const double avg = chi_average(weight, a, d.mexp);
                if (avg >= lo && avg < hi) {
                    for (std::size_t t = 0; t < s.size(); ++t) {
                        if (owner_level[t] >= static_cast<int>(li) && contains(a, s.tiles[t].space)) {
                            bad(r.maximal, "a selected interval can be enlarged");
                            break;
                        }
                    }
                }
                if (a.j == 0) break;
            }
        }
    }
    return r;
}

double packing_constant(const Decomposition& d, const Signal1D& weight) {
    const double mf = mask_measure(weight);
    if (mf == 0.0) return 0.0;
    double best = 0.0;
    for (const auto& lv : d.levels) {
        double sum = 0.0;
        for (const auto& sel : lv.intervals) sum += sel.iv.length();
        best = std::max(best, sum / (std::ldexp(1.0, lv.n) * mf));
    }
    return best;
}

std::string decomposition_to_json(const Decomposition& d, const TileSet& s) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& lv : d.levels) {
        json ivs = json::array();
        for (const auto& sel : lv.intervals) {
            ivs.push_back({{"j", sel.iv.j},
                           {"m", sel.iv.m},
                           {"average", sel.average},
                           {"window", {std::ldexp(1.0, -lv.n - 1), std::ldexp(1.0, -lv.n)}},
                           {"tiles", sel.tiles}});
        }
        levels.push_back({{"n", lv.n}, {"intervals", ivs}});
    }
    json out = {{"tile_count", s.size()},
                {"start_level", d.start_level},
                {"mexp", d.mexp},
                {"levels", levels},
                {"leftover", d.leftover}};
    return out.dump(2);
}

TripleStopping triple_stopping(const TileSet& s, const Signal1D& f_mask, const Signal1D& g_mask, const Signal1D& h_mask,
                               int mexp) {
    const Signal1D* masks[3] = {&f_mask, &g_mask, &h_mask};
    TripleStopping out;
    for (int i = 0; i < 3; ++i) {
        out.runs[i] = stopping_time_select(s, *masks[i], mexp);
        out.packing[i] = packing_constant(out.runs[i], *masks[i]);
    }
    struct Claim {
        int n = 0;
        DyadicInterval iv;
    };
    std::vector<std::array<Claim, 3>> claims(s.size());
    for (int i = 0; i < 3; ++i)
        for (const auto& lv : out.runs[i].levels)
            for (const auto& sel : lv.intervals)
                for (int t : sel.tiles) claims[t][i] = Claim{lv.n, sel.iv};
    // the three intervals are nested, the cell interval is the smallest
    std::map<std::tuple<int, int, int, DyadicInterval>, std::vector<int>> cells;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto& c = claims[t];
        DyadicInterval iv = c[0].iv;
        for (int i = 1; i < 3; ++i)
            if (c[i].iv.j > iv.j) iv = c[i].iv;
        cells[{c[0].n, c[1].n, c[2].n, iv}].push_back(static_cast<int>(t));
    }
    for (auto& [key, tiles] : cells) {
        TripleCell cell;
        cell.n = {std::get<0>(key), std::get<1>(key), std::get<2>(key)};
        cell.iv = std::get<3>(key);
        cell.tiles = std::move(tiles);
        out.cells.push_back(std::move(cell));
    }
    parallel_for(out.cells.size(), [&](std::size_t k) {
        for (int i = 0; i < 3; ++i) out.cells[k].averages[i] = chi_average(*masks[i], out.cells[k].iv, mexp);
    });
    return out;
}

bool check_triple(const TileSet& s, const TripleStopping& t, std::string* problem) {
    auto no = [&](const std::string& m) {
        if (problem) *problem = m;
        return false;
    };
    std::vector<int> seen(s.size(), 0);
    for (const auto& c : t.cells) {
        for (int i = 0; i < 3; ++i)
            if (c.averages[i] > std::ldexp(1.0, -c.n[i]) * (1 + 1e-12)) return no("cell average above its level");
        for (int k : c.tiles) {
            if (k < 0 || static_cast<std::size_t>(k) >= s.size()) return no("tile index out of range");
            if (!contains(c.iv, s.tiles[k].space)) return no("tile outside its cell interval");
            ++seen[k];
        }
    }
    for (int v : seen)
        if (v != 1) return no("cells do not partition the tile set");
    return true;
}

// ---- localized forms ----

TrilinearValue localized_trilinear(const Signal1D& f, const Signal1D& g, const Signal1D& h, const Signal1D& f_mask,
                                   const Signal1D& g_mask, const Signal1D& h_mask, const DyadicInterval& i0, const TileSet& s,
                                   const PacketBank& bank) {
    if (!s.rank1_certified) fail(ErrorCode::refused, "tile set is not certified rank-1");
    if (bank.packets.size() != s.size()) fail(ErrorCode::precondition, "packet bank does not match tile set");
    const Signal1D* in[3] = {&f, &g, &h};
    const Signal1D* ms[3] = {&f_mask, &g_mask, &h_mask};
    Signal1D hats[3];
    for (int i = 0; i < 3; ++i) {
        require_same_grid(in[i]->grid, f.grid, "localized_trilinear");
        require_same_grid(ms[i]->grid, f.grid, "localized_trilinear");
        require_mask(*ms[i], "mask");
        Signal1D masked(f.grid);
        for (int x = 0; x < f.size(); ++x) masked[x] = (*in[i])[x] * (*ms[i])[x].real();
        hats[i] = dft(masked);
    }
    if (!s.empty()) require_same_grid(bank.grid, f.grid, "packet bank");
    std::vector<cplx> terms(s.size(), 0.0);
    parallel_for(s.size(), [&](std::size_t t) {
        if (!contains(i0, s.tiles[t].space)) return;
        const auto& p = bank.packets[t];
        terms[t] = inner_product_hat(hats[0], p[0]) * inner_product_hat(hats[1], p[1]) * pairing_hat(hats[2], p[2]) /
                   std::sqrt(s.tiles[t].space.length());
    });
    TrilinearValue v;
    for (auto z : terms) v.value += z;
    return v;
}

void check_pn_config(const PnConfig& c) {
    if (c.level != 0 && c.level != 1) fail(ErrorCode::domain, "verify_Pn level must be 0 or 1");
    double sum = 0.0;
    for (double t : c.theta) {
        if (!(t >= 0.0 && t < 1.0)) fail(ErrorCode::precondition, "theta_j must lie in [0, 1)");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail(ErrorCode::precondition, "theta must sum to 1");
    if (!(c.eps > 0.0)) fail(ErrorCode::precondition, "epsilon must be positive");
    if (c.level == 1) {
        for (int j = 0; j < 3; ++j) {
            if (!(c.inv_r[j] >= 0.0 && c.inv_r[j] <= 1.0)) fail(ErrorCode::precondition, "1/r_j must lie in [0, 1]");
            if (!((1.0 + c.theta[j]) / 2.0 - c.inv_r[j] > 0.0))
                fail(ErrorCode::precondition, "(1 + theta_j)/2 - 1/r_j must be positive");
        }
    }
}

PnRow pn_ratio(const PnInstance& inst, const TileSet& s, const PacketBank& bank, const PnConfig& c) {
    check_pn_config(c);
    const SignalFamily* fams[3] = {&inst.f, &inst.g, &inst.h};
    const std::size_t k = inst.f.members.size();
    for (auto* fam : fams) {
        if (fam->nested()) fail(ErrorCode::domain, "verify_Pn families must be flat");
        if (fam->members.size() != k || k == 0) fail(ErrorCode::domain, "verify_Pn families must have one common positive length");
    }
    if (c.level == 0 && k != 1) fail(ErrorCode::domain, "level 0 takes single-member families");
    PnRow row;
    cplx total = 0.0;
    for (std::size_t m = 0; m < k; ++m)
        total += localized_trilinear(inst.f.members[m], inst.g.members[m], inst.h.members[m], inst.f_mask, inst.g_mask,
                                     inst.h_mask, inst.i0, s, bank)
                     .value;
    row.lhs = std::abs(total);
    const Signal1D* masks[3] = {&inst.f_mask, &inst.g_mask, &inst.h_mask};
    row.rhs = inst.i0.length();
    for (int j = 0; j < 3; ++j) {
        row.sizes[j] = modified_size(*masks[j], s, inst.i0, c.mexp).value;
        row.rhs *= std::pow(row.sizes[j], 0.5 + c.theta[j] / 2.0 - c.eps);
    }
    if (row.rhs > 0.0) row.ratio = row.lhs / row.rhs;
    else if (row.lhs > 0.0) row.ratio = kInf;
    return row;
}

PnInstance random_pn_instance(const GridSpec& grid, const DyadicInterval& i0, const PnConfig& c, int members, double density,
                              std::uint64_t seed) {
    check_pn_config(c);
    if (members < 1) fail(ErrorCode::domain, "family length must be >= 1");
    if (c.level == 0 && members != 1) fail(ErrorCode::domain, "level 0 takes single-member families");
    if (!(density > 0.0 && density <= 1.0)) fail(ErrorCode::domain, "mask density must lie in (0, 1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = grid.size();
    PnInstance inst;
    inst.i0 = i0;
    Signal1D* masks[3] = {&inst.f_mask, &inst.g_mask, &inst.h_mask};
    SignalFamily* fams[3] = {&inst.f, &inst.g, &inst.h};
    for (int j = 0; j < 3; ++j) {
        *masks[j] = Signal1D(grid);
        bool any = false;
        for (int x = 0; x < n; ++x) {
            const bool in = u(rng) < density;
            (*masks[j])[x] = in ? 1.0 : 0.0;
            any = any || in;
        }
        if (!any) (*masks[j])[static_cast<int>(u(rng) * n) % n] = 1.0;
        const double r = c.level == 0 ? kInf : (c.inv_r[j] == 0.0 ? kInf : 1.0 / c.inv_r[j]);
        fams[j]->members.assign(static_cast<std::size_t>(members), Signal1D(grid));
        for (auto& m : fams[j]->members)
            for (int x = 0; x < n; ++x) m[x] = std::polar(u(rng), 2.0 * std::acos(-1.0) * u(rng));
        // shrink where the pointwise l^r norm exceeds 1, then mask: ||f(x)||_{l^r} <= 1_F(x)
        const Signal1D agg = lr_family_norm(*fams[j], r);
        for (auto& m : fams[j]->members)
            for (int x = 0; x < n; ++x) m[x] *= (*masks[j])[x].real() / std::max(1.0, agg[x].real());
    }
    return inst;
}

}  // namespace htf
