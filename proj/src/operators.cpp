#include "htf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace htf {

namespace {

constexpr double kTwoPi = 6.283185307131795864769252867665590;

// out[i + j] += a[i] b[j] over lo <= i < j < hi
void upper_conv(const std::vector<cplx>& a, const std::vector<cplx>& b, int lo, int hi, std::vector<cplx>& out) {
    if (hi - lo <= 64) {
        for (int i = lo; i < hi; ++i) {
            if (a[i] == cplx(0, 0)) continue;
            for (int j = i + 1; j < hi; ++j) out[i + j] += a[i] * b[j];
        }
        return;
    }
    const int mid = lo + (hi - lo) / 2;
    const int m1 = mid - lo, m2 = hi - mid;
    std::size_t len = 1;
    while (len < static_cast<std::size_t>(m1 + m2 - 1)) len <<= 1;
    std::vector<cplx> x(len), y(len);
    std::copy(a.begin() + lo, a.begin() + mid, x.begin());
    std::copy(b.begin() + mid, b.begin() + hi, y.begin());
    fft_inplace(x, -1);
    fft_inplace(y, -1);
    for (std::size_t t = 0; t < len; ++t) x[t] *= y[t];
    fft_inplace(x, 1);
    const double inv = 1.0 / static_cast<double>(len);
    for (int t = 0; t < m1 + m2 - 1; ++t) out[lo + mid + t] += x[t] * inv;
    upper_conv(a, b, lo, mid, out);
    upper_conv(a, b, mid, hi, out);
}

void require_certified(const TileSet& s) {
    if (!s.rank1_certified) fail(ErrorCode::refused, "tile set is not certified rank-1");
}

void require_bank(const TileSet& s, const PacketBank& bank, const GridSpec& grid) {
    if (bank.packets.size() != s.size()) fail(ErrorCode::precondition, "packet bank does not match tile set");
    if (!s.empty()) require_same_grid(bank.grid, grid, "packet bank");
}

Signal1D column(const Signal2D& f, int y) {
    Signal1D c(GridSpec::make(f.grid.log_size));
    for (int x = 0; x < f.size(); ++x) c[x] = f.at(x, y);
    return c;
}

double sym_p(long long xi, int k) { return lp_p_symbol(xi, k); }
double sym_q(long long xi, int k) { return lp_q_symbol(xi, k); }

// symbols applied to (first, second) slot at scale k
std::pair<double, double> para_pair(ParaKind kind, long long xi1, long long xi2, int k) {
    switch (kind) {
        case ParaKind::I: return {sym_q(xi1, k), sym_q(xi2, k)};
        case ParaKind::II: return {sym_p(xi1, para_low_scale(k)), sym_q(xi2, k)};
        case ParaKind::III: return {sym_q(xi1, k), sym_p(xi2, para_low_scale(k))};
    }
    return {0.0, 0.0};
}

Signal1D para_slot(const Signal1D& f, ParaKind kind, int slot, int k) {
    const bool low = (kind == ParaKind::II && slot == 0) || (kind == ParaKind::III && slot == 1);
    if (low) return apply_symbol(f, [k](long long xi) { return cplx(sym_p(xi, para_low_scale(k))); });
    return apply_symbol(f, [k](long long xi) { return cplx(sym_q(xi, k)); });
}

Signal2D para_slot_axis(const Signal2D& f, int axis, ParaKind kind, int slot, int k) {
    const bool low = (kind == ParaKind::II && slot == 0) || (kind == ParaKind::III && slot == 1);
    if (low) return apply_symbol_axis(f, axis, [k](long long xi) { return cplx(sym_p(xi, para_low_scale(k))); });
    return apply_symbol_axis(f, axis, [k](long long xi) { return cplx(sym_q(xi, k)); });
}

}  // namespace

Signal1D bht_direct_reference(const Signal1D& f, const Signal1D& g) {
    require_same_grid(f.grid, g.grid, "bht_direct");
    const int n = f.size();
    const Signal1D fh = dft(f), gh = dft(g);
    Signal1D oh(f.grid);
    for (int a = 0; a < n; ++a) {
        const int xi = freq_rep(a, n);
        for (int b = 0; b < n; ++b) {
            const int eta = freq_rep(b, n);
            if (xi < eta) oh[freq_bin(xi + eta, n)] += fh[a] * gh[b];
        }
    }
    for (auto& z : oh.samples) z /= n;
    return idft(oh);
}

Signal1D bht_direct(const Signal1D& f, const Signal1D& g) {
    require_same_grid(f.grid, g.grid, "bht_direct");
    const int n = f.size();
    const Signal1D fh = dft(f), gh = dft(g);
    // position i holds representative i - n/2 + 1
    std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int bin = freq_bin(i - n / 2 + 1, n);
        a[i] = fh[bin];
        b[i] = gh[bin];
    }
    std::vector<cplx> sums(static_cast<std::size_t>(2 * n - 1));
    upper_conv(a, b, 0, n, sums);
    Signal1D oh(f.grid);
    for (int s = 0; s < 2 * n - 1; ++s) oh[freq_bin(s - n + 2, n)] += sums[s];
    for (auto& z : oh.samples) z /= n;
    return idft(oh);
}

namespace {

struct TileCoeffs {
    std::vector<cplx> c1, c2;
};

TileCoeffs first_two(const Signal1D& f, const Signal1D& g, const TileSet& s, const PacketBank& bank) {
    const Signal1D fh = dft(f), gh = dft(g);
    TileCoeffs out;
    out.c1.resize(s.size());
    out.c2.resize(s.size());
    parallel_for(s.size(), [&](std::size_t t) {
        out.c1[t] = inner_product_hat(fh, bank.packets[t][0]);
        out.c2[t] = inner_product_hat(gh, bank.packets[t][1]);
    });
    return out;
}

}  // namespace

Signal1D bht_model(const Signal1D& f, const Signal1D& g, const TileSet& s, const PacketBank& bank) {
    require_certified(s);
    require_same_grid(f.grid, g.grid, "bht_model");
    require_bank(s, bank, f.grid);
    const auto c = first_two(f, g, s, bank);
    Signal1D acc(f.grid);
    for (std::size_t t = 0; t < s.size(); ++t)
        accumulate_packet(acc, bank.packets[t][2], c.c1[t] * c.c2[t] / std::sqrt(s.tiles[t].space.length()));
    return idft(acc);
}

Signal1D bht_model(const Signal1D& f, const Signal1D& g, const TileSet& s, const Window& w) {
    require_certified(s);
    return bht_model(f, g, s, make_packets(s, w, f.grid));
}

cplx pairing(const Signal1D& a, const Signal1D& h) {
    require_same_grid(a.grid, h.grid, "pairing");
    cplx s = 0;
    for (int x = 0; x < a.size(); ++x) s += a[x] * h[x];
    return s / static_cast<double>(a.size());
}

TrilinearValue trilinear_form(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                              const PacketBank& bank, bool keep_breakdown) {
    require_certified(s);
    require_same_grid(f.grid, g.grid, "trilinear_form");
    require_same_grid(f.grid, h.grid, "trilinear_form");
    require_bank(s, bank, f.grid);
    const auto c = first_two(f, g, s, bank);
    const Signal1D hh = dft(h);
    std::vector<cplx> terms(s.size());
    parallel_for(s.size(), [&](std::size_t t) {
        terms[t] = c.c1[t] * c.c2[t] * pairing_hat(hh, bank.packets[t][2]) / std::sqrt(s.tiles[t].space.length());
    });
    TrilinearValue v;
    for (auto z : terms) v.value += z;
    if (keep_breakdown) v.breakdown = std::move(terms);
    return v;
}

TrilinearValue trilinear_form(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                              bool keep_breakdown, const Window& w) {
    require_certified(s);
    return trilinear_form(f, g, h, s, make_packets(s, w, f.grid), keep_breakdown);
}

BoundCheck trilinear_size_energy_bound_check(const Signal1D& f, const Signal1D& g, const Signal1D& h, const TileSet& s,
                                             const std::array<double, 3>& theta, const PacketBank& bank) {
    double sum = 0.0;
    for (double t : theta) {
        if (!(t >= 0.0 && t < 1.0)) fail(ErrorCode::domain, "theta_j must lie in [0, 1)");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail(ErrorCode::domain, "theta must sum to 1");
    BoundCheck r;
    r.lhs = std::abs(trilinear_form(f, g, h, s, bank).value);
    const Signal1D* fs[3] = {&f, &g, &h};
    r.rhs = 1.0;
    for (int j = 0; j < 3; ++j) {
        const CoeffMap c = coefficients(*fs[j], s, bank, j);
        r.sizes[j] = size(c).value;
        r.energies[j] = energy(c).value;
        r.rhs *= std::pow(r.sizes[j], theta[j]) * std::pow(r.energies[j], 1.0 - theta[j]);
    }
    if (r.rhs > 0.0) r.ratio = r.lhs / r.rhs;
    else if (r.lhs > 0.0) r.ratio = kInf;
    return r;
}

std::vector<Signal1D> shell_pieces(const Signal1D& f, const DyadicInterval& i0) {
    const int n = f.size();
    std::vector<int> idx(static_cast<std::size_t>(n));
    int top = 0;
    for (int x = 0; x < n; ++x) {
        const double d = scaled_distance(static_cast<double>(x) / n, i0);
        int k = 0;
        if (d > 1.0) {
            k = 1;
            while (d > std::ldexp(1.0, k)) ++k;
        }
        idx[x] = k;
        top = std::max(top, k);
    }
    std::vector<Signal1D> out(static_cast<std::size_t>(top + 1), Signal1D(f.grid));
    for (int x = 0; x < n; ++x) out[idx[x]][x] = f[x];
    return out;
}

int para_low_scale(int k) { return k - 3; }

double para_outer_symbol(ParaKind kind, long long xi, int k) {
    const double x = static_cast<double>(xi);
    const double wide = lp_bump(x / std::ldexp(1.0, k + 3));
    if (kind == ParaKind::I) return wide;
    return wide - lp_bump(x / std::ldexp(1.0, k - 2));
}

std::vector<int> para_scales(const ParaproductSpec& spec, const GridSpec& grid) {
    if (spec.scales.empty()) {
        std::vector<int> all(static_cast<std::size_t>(grid.log_size));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    for (int k : spec.scales)
        if (k < 0 || k > grid.log_size - 1) fail(ErrorCode::domain, "paraproduct scale out of range");
    return spec.scales;
}

Signal1D paraproduct(const Signal1D& f, const Signal1D& g, const ParaproductSpec& spec) {
    require_same_grid(f.grid, g.grid, "paraproduct");
    const auto ks = para_scales(spec, f.grid);
    std::vector<Signal1D> terms(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const Signal1D a = para_slot(f, spec.kind, 0, ks[i]);
        const Signal1D b = para_slot(g, spec.kind, 1, ks[i]);
        Signal1D t(f.grid);
        for (int x = 0; x < f.size(); ++x) t[x] = a[x] * b[x];
        terms[i] = std::move(t);
    });
    Signal1D out(f.grid);
    for (const auto& t : terms)
        for (int x = 0; x < f.size(); ++x) out[x] += t[x];
    return out;
}

namespace {

void check_para_spec(const DiscreteParaSpec& spec) {
    const int non = static_cast<int>(std::count(spec.lacunary.begin(), spec.lacunary.end(), false));
    if (non != 1) fail(ErrorCode::domain, "discrete paraproduct needs exactly one non-lacunary slot");
}

}  // namespace

Signal1D paraproduct_discrete(const Signal1D& f, const Signal1D& g, const std::vector<DyadicInterval>& ivs,
                              const DiscreteParaSpec& spec) {
    check_para_spec(spec);
    require_same_grid(f.grid, g.grid, "paraproduct_discrete");
    const Signal1D fh = dft(f), gh = dft(g);
    std::vector<cplx> coef(ivs.size());
    std::vector<WavePacket> out_packets(ivs.size());
    parallel_for(ivs.size(), [&](std::size_t i) {
        const cplx c1 = inner_product_hat(fh, make_para_packet(ivs[i], spec.lacunary[0], f.grid));
        const cplx c2 = inner_product_hat(gh, make_para_packet(ivs[i], spec.lacunary[1], f.grid));
        coef[i] = c1 * c2 / std::sqrt(ivs[i].length());
        out_packets[i] = make_para_packet(ivs[i], spec.lacunary[2], f.grid);
    });
    Signal1D acc(f.grid);
    for (std::size_t i = 0; i < ivs.size(); ++i) accumulate_packet(acc, out_packets[i], coef[i]);
    return idft(acc);
}

cplx paraproduct_discrete_form(const Signal1D& f, const Signal1D& g, const Signal1D& h,
                               const std::vector<DyadicInterval>& ivs, const DiscreteParaSpec& spec) {
    check_para_spec(spec);
    require_same_grid(f.grid, g.grid, "paraproduct_discrete_form");
    require_same_grid(f.grid, h.grid, "paraproduct_discrete_form");
    const Signal1D fh = dft(f), gh = dft(g), hh = dft(h);
    std::vector<cplx> terms(ivs.size());
    parallel_for(ivs.size(), [&](std::size_t i) {
        const cplx c1 = inner_product_hat(fh, make_para_packet(ivs[i], spec.lacunary[0], f.grid));
        const cplx c2 = inner_product_hat(gh, make_para_packet(ivs[i], spec.lacunary[1], f.grid));
        const cplx c3 = pairing_hat(hh, make_para_packet(ivs[i], spec.lacunary[2], f.grid));
        terms[i] = c1 * c2 * c3 / std::sqrt(ivs[i].length());
    });
    cplx s = 0;
    for (auto z : terms) s += z;
    return s;
}

Signal1D carleson(const Signal1D& f) {
    const int n = f.size();
    const Signal1D fh = dft(f);
    std::vector<cplx> tw(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) tw[k] = std::polar(1.0, kTwoPi * k / n);
    Signal1D out(f.grid);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t xs) {
        const long long x = static_cast<long long>(xs);
        cplx s = 0;
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            const int rep = i - n / 2 + 1;
            const int bin = freq_bin(rep, n);
            s += fh[bin] * tw[static_cast<std::size_t>((static_cast<long long>(bin) * x) % n)];
            best = std::max(best, std::abs(s) / n);
        }
        out[static_cast<int>(xs)] = best;
    });
    return out;
}

Signal2D biparam_paraproduct(const Signal2D& f, const Signal2D& g, const std::array<ParaproductSpec, 2>& specs) {
    require_same_grid(f.grid, g.grid, "biparam_paraproduct");
    const GridSpec g1 = GridSpec::make(f.grid.log_size);
    const auto kx = para_scales(specs[0], g1);
    const auto ky = para_scales(specs[1], g1);
    std::vector<Signal2D> terms(kx.size());
    parallel_for(kx.size(), [&](std::size_t a) {
        const Signal2D fx = para_slot_axis(f, 0, specs[0].kind, 0, kx[a]);
        const Signal2D gx = para_slot_axis(g, 0, specs[0].kind, 1, kx[a]);
        Signal2D acc(f.grid);
        for (int l : ky) {
            const Signal2D fa = para_slot_axis(fx, 1, specs[1].kind, 0, l);
            const Signal2D ga = para_slot_axis(gx, 1, specs[1].kind, 1, l);
            for (std::size_t i = 0; i < acc.samples.size(); ++i) acc.samples[i] += fa.samples[i] * ga.samples[i];
        }
        terms[a] = std::move(acc);
    });
    Signal2D out(f.grid);
    for (const auto& t : terms)
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += t.samples[i];
    return out;
}

Signal2D tensor_bht_paraproduct(const Signal2D& f, const Signal2D& g, const ParaproductSpec& spec) {
    require_same_grid(f.grid, g.grid, "tensor_bht_paraproduct");
    const int n = f.size();
    const auto ks = para_scales(spec, GridSpec::make(f.grid.log_size));
    std::vector<Signal2D> terms(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const Signal2D fy = para_slot_axis(f, 1, spec.kind, 0, ks[i]);
        const Signal2D gy = para_slot_axis(g, 1, spec.kind, 1, ks[i]);
        Signal2D t(f.grid);
        for (int y = 0; y < n; ++y) {
            const Signal1D b = bht_direct(column(fy, y), column(gy, y));
            for (int x = 0; x < n; ++x) t.at(x, y) = b[x];
        }
        terms[i] = std::move(t);
    });
    Signal2D out(f.grid);
    for (const auto& t : terms)
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += t.samples[i];
    return out;
}

Signal2D tensor_bht_paraproduct_direct(const Signal2D& f, const Signal2D& g, const ParaproductSpec& spec) {
    require_same_grid(f.grid, g.grid, "tensor_bht_paraproduct_direct");
    const int n = f.size();
    if (n > 64) fail(ErrorCode::domain, "quadruple-sum form is limited to N <= 64");
    const auto ks = para_scales(spec, GridSpec::make(f.grid.log_size));
    // y symbol of the paraproduct, outer multiplier at the unwrapped sum eta1 + eta2
    std::vector<double> my(static_cast<std::size_t>(n) * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const long long e1 = freq_rep(a, n), e2 = freq_rep(b, n);
            double m = 0.0;
            for (int k : ks) {
                const auto [s1, s2] = para_pair(spec.kind, e1, e2, k);
                m += s1 * s2 * para_outer_symbol(spec.kind, e1 + e2, k);
            }
            my[static_cast<std::size_t>(a) * n + b] = m;
        }
    const Signal2D fh = dft(f), gh = dft(g);
    Signal2D oh(f.grid);
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = 0; x2 < n; ++x2) {
            if (!(freq_rep(x1, n) < freq_rep(x2, n))) continue;
            const int ox = freq_bin(freq_rep(x1, n) + freq_rep(x2, n), n);
            for (int y1 = 0; y1 < n; ++y1) {
                const cplx a = fh.at(x1, y1);
                if (a == cplx(0, 0)) continue;
                for (int y2 = 0; y2 < n; ++y2) {
                    const double m = my[static_cast<std::size_t>(y1) * n + y2];
                    if (m == 0.0) continue;
                    oh.at(ox, freq_bin(freq_rep(y1, n) + freq_rep(y2, n), n)) += a * gh.at(x2, y2) * m;
                }
            }
        }
    const double inv = 1.0 / (static_cast<double>(n) * n);
    for (auto& z : oh.samples) z *= inv;
    return idft(oh);
}

Signal1D square_function(const Signal1D& f) {
    Signal1D out(f.grid);
    std::vector<double> acc(static_cast<std::size_t>(f.size()), 0.0);
    for (int k = 0; k < f.grid.log_size; ++k) {
        const Signal1D q = apply_symbol(f, [k](long long xi) { return cplx(sym_q(xi, k)); });
        for (int x = 0; x < f.size(); ++x) acc[x] += std::norm(q[x]);
    }
    for (int x = 0; x < f.size(); ++x) out[x] = std::sqrt(acc[x]);
    return out;
}

Signal2D square_function(const Signal2D& f, int axes) {
    if (axes < 1 || axes > 3) fail(ErrorCode::domain, "axes must be 1, 2 or 3");
    const int l = f.grid.log_size;
    std::vector<double> acc(f.samples.size(), 0.0);
    auto q_axis = [](const Signal2D& s, int axis, int k) {
        return apply_symbol_axis(s, axis, [k](long long xi) { return cplx(sym_q(xi, k)); });
    };
    if (axes == 3) {
        for (int k = 0; k < l; ++k) {
            const Signal2D qx = q_axis(f, 0, k);
            for (int m = 0; m < l; ++m) {
                const Signal2D q = q_axis(qx, 1, m);
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(q.samples[i]);
            }
        }
    } else {
        for (int k = 0; k < l; ++k) {
            const Signal2D q = q_axis(f, axes == 1 ? 0 : 1, k);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(q.samples[i]);
        }
    }
    Signal2D out(f.grid);
    for (std::size_t i = 0; i < acc.size(); ++i) out.samples[i] = std::sqrt(acc[i]);
    return out;
}

}  // namespace htf
