#include "htf/size_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace htf {

PacketBank make_packets(const TileSet& s, const Window& w, const GridSpec& grid) {
    PacketBank bank;
    bank.grid = grid;
    bank.packets.resize(s.size());
    parallel_for(s.size(), [&](std::size_t t) {
        for (int c = 0; c < 3; ++c) bank.packets[t][c] = make_wave_packet(s.tiles[t].component(c), w, grid);
    });
    return bank;
}

CoeffMap coefficients(const Signal1D& f, const TileSet& s, const PacketBank& bank, int component) {
    if (component < 0 || component > 2) fail(ErrorCode::domain, "component must be 0, 1 or 2");
    if (bank.packets.size() != s.size()) fail(ErrorCode::precondition, "packet bank does not match tile set");
    require_same_grid(f.grid, bank.grid, "coefficients");
    const Signal1D fh = dft(f);
    CoeffMap c;
    c.tileset = s;
    c.component = component;
    c.values.resize(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto& p = bank.packets[t][component];
        c.values[t] = component < 2 ? inner_product_hat(fh, p) : pairing_hat(fh, p);
    }
    return c;
}

CoeffMap coefficients(const Signal1D& f, const TileSet& s, int component, const Window& w) {
    return coefficients(f, s, make_packets(s, w, f.grid), component);
}

// ---- size ----

double tree_size_value(const CoeffMap& c, const Tree& t) {
    double mass = 0.0;
    for (int m : t.members) mass += std::norm(c.values[m]);
    return std::sqrt(mass / t.top.space.length());
}

SizeReport size(const CoeffMap& c, bool greedy) {
    const auto& s = c.tileset;
    const int n = static_cast<int>(s.size());
    const int j = c.component;
    SizeReport rep;
    if (n == 0) return rep;
    if (greedy) {
        for (int i = 0; i < 3; ++i) {
            if (i == j) continue;
            for (auto& t : extract_trees(s, j, i)) {
                const double v = tree_size_value(c, t);
                if (!rep.has_witness || v > rep.value) {
                    rep.value = v;
                    rep.witness = t;
                    rep.has_witness = true;
                }
            }
        }
        return rep;
    }
    struct Best {
        double value = -1.0;
        int i = -1;
    };
    std::vector<Best> best(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t t) {
        for (int i = 0; i < 3; ++i) {
            if (i == j) continue;
            const Tile top = s.tiles[t].component(i);
            double mass = 0.0;
            for (int p = 0; p < n; ++p)
                if (tile_le(s.tiles[p].component(i), top)) mass += std::norm(c.values[p]);
            const double v = std::sqrt(mass / s.tiles[t].space.length());
            if (v > best[t].value) best[t] = {v, i};
        }
    });
    int bt = 0;
    for (int t = 1; t < n; ++t)
        if (best[t].value > best[bt].value) bt = t;
    rep.value = best[bt].value;
    rep.has_witness = true;
    rep.witness.top = s.tiles[bt];
    rep.witness.tree_index = best[bt].i;
    const Tile top = s.tiles[bt].component(best[bt].i);
    for (int p = 0; p < n; ++p)
        if (tile_le(s.tiles[p].component(best[bt].i), top)) rep.witness.members.push_back(p);
    return rep;
}

double chi_average(const Signal1D& absf, const DyadicInterval& iv, int mexp) {
    const auto w = chi_tilde(iv, mexp, absf.grid);
    double s = 0.0;
    for (int x = 0; x < absf.size(); ++x) s += std::abs(absf[x]) * w[x].real();
    return s / absf.size() / iv.length();
}

double simple_size(const Signal1D& f, const TileSet& s, int mexp) {
    std::set<DyadicInterval> spaces;
    for (const auto& t : s.tiles) spaces.insert(t.space);
    double best = 0.0;
    for (const auto& iv : spaces) best = std::max(best, chi_average(f, iv, mexp));
    return best;
}

ModifiedSize modified_size(const Signal1D& f, const TileSet& s, const DyadicInterval& i0, int mexp) {
    const TileSet r = restrict_to(s, i0);
    if (r.empty()) fail(ErrorCode::precondition, "modified_size: no admissible J (P(I0) is empty)");
    // dyadic J containing some I_P with J ⊆ 3 I0: ancestors of I_P up to the parent of I0
    const int top_scale = std::max(0, i0.j - 1);
    std::set<DyadicInterval> cands;
    for (const auto& t : r.tiles) {
        DyadicInterval jv = t.space;
        for (;;) {
            cands.insert(jv);
            if (jv.j <= top_scale) break;
            jv = jv.parent();
        }
    }
    ModifiedSize out;
    bool first = true;
    for (const auto& jv : cands) {
        const double v = chi_average(f, jv, mexp);
        if (first || v > out.value) {
            out.value = v;
            out.witness = jv;
            first = false;
        }
    }
    return out;
}

// ---- energy ----

namespace {

struct EnergyContext {
    const TileSet& s;
    const std::vector<double>& mass;  // |c_P|^2
    int j;
    std::vector<std::vector<char>> le[3];  // le[i][p][t] = P_i <= T_i
    std::vector<std::pair<int, int>> order;  // candidate (top, i)
};

bool append_ok(const EnergyContext& ctx, const std::vector<Tree>& chain, const Tree& fresh) {
    const int j = ctx.j;
    const auto& tiles = ctx.s.tiles;
    for (const auto& old : chain) {
        for (int a : old.members) {
            const TriTile& p = tiles[a];
            for (int b : fresh.members) {
                const TriTile& pp = tiles[b];
                if (p.component(j) == pp.component(j)) return false;
                if (!dilates_intersect(p.freqs[j], pp.freqs[j], 2)) continue;
                const long long lp = p.freqs[j].length_units(), lpp = pp.freqs[j].length_units();
                if (lp < lpp && intersects(pp.space, old.top.space)) return false;
                if (lpp < lp && intersects(p.space, fresh.top.space)) return false;
                if (lp == lpp && intersects(pp.space, old.top.space)) return false;
            }
        }
    }
    return true;
}

std::vector<Tree> greedy_level(const EnergyContext& ctx, int n) {
    const int count = static_cast<int>(ctx.s.size());
    const double lo = std::ldexp(1.0, 2 * n);
    const double cap = std::ldexp(1.0, 2 * n + 2);
    std::vector<char> used(static_cast<std::size_t>(count), 0);
    std::vector<Tree> chain;
    for (auto [t, i] : ctx.order) {
        std::vector<int> members;
        double m = 0.0;
        for (int p = 0; p < count; ++p)
            if (!used[p] && ctx.le[i][p][t]) {
                members.push_back(p);
                m += ctx.mass[p];
            }
        if (members.empty() || m < lo * ctx.s.tiles[t].space.length()) continue;
        bool capped = m <= cap * ctx.s.tiles[t].space.length();
        for (std::size_t a = 0; capped && a < members.size(); ++a) {
            const int sub = members[a];
            double sm = 0.0;
            for (int p : members)
                if (ctx.le[i][p][sub]) sm += ctx.mass[p];
            if (sm > cap * ctx.s.tiles[sub].space.length()) capped = false;
        }
        if (!capped) continue;
        Tree tree{ctx.s.tiles[t], members, i};
        if (!append_ok(ctx, chain, tree)) continue;
        for (int p : members) used[p] = 1;
        chain.push_back(std::move(tree));
    }
    return chain;
}

}  // namespace

std::vector<std::pair<int, std::vector<Tree>>> energy_chains(const CoeffMap& c) {
    const auto& s = c.tileset;
    const int n = static_cast<int>(s.size());
    std::vector<std::pair<int, std::vector<Tree>>> out;
    if (n == 0) return out;
    std::vector<double> mass(static_cast<std::size_t>(n));
    double cmax = 0.0;
    for (int p = 0; p < n; ++p) {
        mass[p] = std::norm(c.values[p]);
        cmax = std::max(cmax, std::abs(c.values[p]));
    }
    if (cmax == 0.0) return out;
    EnergyContext ctx{s, mass, c.component, {}, {}};
    for (int i = 0; i < 3; ++i) {
        if (i == c.component) continue;
        ctx.le[i].assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t p) {
            for (int t = 0; t < n; ++t) ctx.le[i][p][t] = tile_le(s.tiles[p].component(i), s.tiles[t].component(i));
        });
        for (int t = 0; t < n; ++t) ctx.order.push_back({t, i});
    }
    const int j = c.component;
    std::stable_sort(ctx.order.begin(), ctx.order.end(), [&](auto a, auto b) {
        const auto& ta = s.tiles[a.first];
        const auto& tb = s.tiles[b.first];
        if (ta.space.length_units() != tb.space.length_units()) return ta.space.length_units() > tb.space.length_units();
        if (ta.freqs[j].left_units() != tb.freqs[j].left_units()) return ta.freqs[j].left_units() < tb.freqs[j].left_units();
        if (ta.space.left_units() != tb.space.left_units()) return ta.space.left_units() < tb.space.left_units();
        return a.second < b.second;
    });
    // level window: from the smallest single-tile density to the largest tree density
    double top_density = 0.0, low_density = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p) {
        const double a = std::abs(c.values[p]);
        if (a <= 1e-12 * cmax) continue;
        low_density = std::min(low_density, a / std::sqrt(s.tiles[p].space.length()));
    }
    for (int i = 0; i < 3; ++i) {
        if (i == j) continue;
        for (int t = 0; t < n; ++t) {
            double m = 0.0;
            for (int p = 0; p < n; ++p)
                if (ctx.le[i][p][t]) m += mass[p];
            top_density = std::max(top_density, std::sqrt(m / s.tiles[t].space.length()));
        }
    }
    const int n_hi = static_cast<int>(std::floor(std::log2(top_density)));
    const int n_lo = std::min(n_hi, static_cast<int>(std::floor(std::log2(low_density))) - 1);
    const std::size_t levels = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<std::vector<Tree>> chains(levels);
    parallel_for(levels, [&](std::size_t k) { chains[k] = greedy_level(ctx, n_lo + static_cast<int>(k)); });
    for (std::size_t k = 0; k < levels; ++k) out.emplace_back(n_lo + static_cast<int>(k), std::move(chains[k]));
    return out;
}

EnergyReport energy(const CoeffMap& c) {
    EnergyReport rep;
    for (auto& [n, chain] : energy_chains(c)) {
        if (chain.empty()) continue;
        double total = 0.0;
        for (const auto& t : chain) total += t.top.space.length();
        const double v = std::ldexp(1.0, n) * std::sqrt(total);
        if (v > rep.value) {
            rep.value = v;
            rep.level = n;
            rep.chain = chain;
        }
    }
    return rep;
}

double scaled_distance(double x, const DyadicInterval& i0) {
    const double l = i0.left(), r = i0.right(), len = i0.length();
    if (len >= 1.0) return 0.0;
    const double xr = x - std::floor(x - l);
    if (xr < r) return 0.0;
    auto circ = [](double u, double v) {
        double d = std::fmod(std::abs(u - v), 1.0);
        return std::min(d, 1.0 - d);
    };
    return std::min(circ(x, l), circ(x, r)) / len;
}

double localized_energy(const Signal1D& f, const TileSet& s, const DyadicInterval& i0, int k, int component) {
    if (k < 1) fail(ErrorCode::precondition, "localized_energy: shell index k must be >= 1");
    const int n = f.size();
    const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k);
    for (int x = 0; x < n; ++x) {
        if (f[x] == cplx(0, 0)) continue;
        const double d = scaled_distance(static_cast<double>(x) / n, i0);
        if (d < lo || d > hi) fail(ErrorCode::precondition, "localized_energy: f is not supported in the distance shell");
    }
    const TileSet r = restrict_to(s, i0);
    if (r.empty()) return 0.0;
    return energy(coefficients(f, r, component)).value;
}

std::vector<DecayRow> localized_energy_decay(const Signal1D& g, const TileSet& s, const DyadicInterval& i0, int component, int kmax) {
    const int n = g.size();
    const TileSet r = restrict_to(s, i0);
    const PacketBank bank = make_packets(r, Window{}, g.grid);
    std::vector<DecayRow> rows;
    for (int k = 0; k <= kmax; ++k) {
        Signal1D f(g.grid);
        const double lo = k == 0 ? 0.0 : std::ldexp(1.0, k - 1), hi = k == 0 ? 2.0 : std::ldexp(1.0, k);
        for (int x = 0; x < n; ++x) {
            const double d = scaled_distance(static_cast<double>(x) / n, i0);
            if (d >= lo && d <= hi) f[x] = g[x];
        }
        DecayRow row;
        row.k = k;
        row.l2 = lp_norm(f, 2);
        row.energy = r.empty() ? 0.0 : energy(coefficients(f, r, bank, component)).value;
        rows.push_back(row);
    }
    return rows;
}

// ---- paraproduct sizes and energies ----

WavePacket make_para_packet(const DyadicInterval& iv, bool lacunary, const GridSpec& grid) {
    if (iv.j < 0 || iv.shift3 != 0) fail(ErrorCode::domain, "paraproduct intervals must be unshifted dyadic subintervals of the torus");
    const double w = std::ldexp(1.0, iv.j);
    const double xc = 0.5 * (iv.left() + iv.right());
    Tile t{iv, DyadicInterval::make(-iv.j, lacunary ? 1 : 0)};
    // the lacunary half-width reaches just past [w, 2w] so |I| = 1 still has grid bins
    return make_packet_at(t, lacunary ? 1.5 * w : 0.0, lacunary ? 0.55 * w : 0.45 * w, xc, Window{}, grid);
}

std::vector<cplx> para_coefficients(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary) {
    const Signal1D fh = dft(f);
    std::vector<cplx> out(ivs.size());
    parallel_for(ivs.size(), [&](std::size_t i) { out[i] = inner_product_hat(fh, make_para_packet(ivs[i], lacunary, f.grid)); });
    return out;
}

double weak_l1(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end(), std::greater<>());
    double best = 0.0;
    const double n = static_cast<double>(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        // all samples >= v[k]: include ties
        std::size_t cnt = k + 1;
        while (cnt < v.size() && v[cnt] == v[k]) ++cnt;
        best = std::max(best, v[k] * static_cast<double>(cnt) / n);
    }
    return best;
}

std::vector<double> paraproduct_local_sizes(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary) {
    const auto c = para_coefficients(f, ivs, lacunary);
    std::vector<double> q(ivs.size());
    if (!lacunary) {
        for (std::size_t i = 0; i < ivs.size(); ++i) q[i] = std::abs(c[i]) / std::sqrt(ivs[i].length());
        return q;
    }
    const int n = f.size();
    parallel_for(ivs.size(), [&](std::size_t a) {
        std::vector<double> sq(static_cast<std::size_t>(n), 0.0);
        for (std::size_t b = 0; b < ivs.size(); ++b) {
            if (!contains(ivs[a], ivs[b])) continue;
            const double v = std::norm(c[b]) / ivs[b].length();
            const long long x0 = static_cast<long long>(std::llround(ivs[b].left() * n));
            const long long x1 = static_cast<long long>(std::llround(ivs[b].right() * n));
            for (long long x = x0; x < x1; ++x) sq[static_cast<std::size_t>(x)] += v;
        }
        for (auto& v : sq) v = std::sqrt(v);
        // 1/|I0| keeps the lacunary size on the same scale as an average of |f|
        q[a] = weak_l1(std::move(sq)) / ivs[a].length();
    });
    return q;
}

ParaSize paraproduct_size(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary) {
    const auto q = paraproduct_local_sizes(f, ivs, lacunary);
    ParaSize out;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (out.witness < 0 || q[i] > out.value) {
            out.value = q[i];
            out.witness = static_cast<int>(i);
        }
    return out;
}

double paraproduct_energy(const Signal1D& f, const std::vector<DyadicInterval>& ivs, bool lacunary) {
    const auto q = paraproduct_local_sizes(f, ivs, lacunary);
    std::set<int> levels;
    for (double v : q)
        if (v > 0.0) levels.insert(static_cast<int>(std::floor(std::log2(v))));
    std::vector<std::size_t> order(ivs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ivs[a].j < ivs[b].j; });
    double best = 0.0;
    for (int n : levels) {
        const double thr = std::ldexp(1.0, n);
        std::vector<DyadicInterval> chosen;
        double total = 0.0;
        for (std::size_t i : order) {
            if (q[i] < thr) continue;
            bool inside = false;
            for (const auto& c : chosen)
                if (contains(c, ivs[i])) inside = true;
            if (inside) continue;
            chosen.push_back(ivs[i]);
            total += ivs[i].length();
        }
        best = std::max(best, thr * total);
    }
    return best;
}

// ---- maximal functions ----

Signal1D maximal_function(const Signal1D& f) {
    const int n = f.size();
    const int l = f.grid.log_size;
    Signal1D out(f.grid);
    std::vector<double> m(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j <= l; ++j) {
        const int block = n >> j;
        for (int b = 0; b < (1 << j); ++b) {
            double s = 0.0;
            for (int x = b * block; x < (b + 1) * block; ++x) s += std::abs(f[x]);
            s /= block;
            for (int x = b * block; x < (b + 1) * block; ++x) m[x] = std::max(m[x], s);
        }
    }
    for (int x = 0; x < n; ++x) out[x] = m[x];
    return out;
}

Signal1D shifted_maximal(const Signal1D& f, long long shift) {
    Signal1D out(f.grid);
    for (int l = 0; l < f.grid.log_size; ++l) {
        const auto p = shifted_ops(f, l, shift).p;
        for (int x = 0; x < f.size(); ++x) out[x] = std::max(out[x].real(), std::abs(p[x]));
    }
    return out;
}

double weak11_ratio(const Signal1D& f) {
    const double l1 = lp_norm(f, 1.0);
    if (l1 == 0.0) return 0.0;
    const auto m = maximal_function(f);
    std::vector<double> v(m.samples.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.samples[i].real();
    return weak_l1(std::move(v)) / l1;
}

}  // namespace htf
