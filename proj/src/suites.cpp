#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include "experiments_internal.hpp"
#include "htf/helicoid.hpp"
#include "htf/leibniz.hpp"
#include "htf/vector_valued.hpp"

namespace htf::detail {

namespace {

using Rng = std::mt19937_64;

std::vector<cplx> gauss(Rng& rng, std::size_t n) {
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto& z : v) {
        const double re = d(rng);
        z = cplx(re, d(rng));
    }
    return v;
}

Signal1D rand_sig(Rng& rng, int l) {
    const auto g = GridSpec::make(l);
    return Signal1D(g, gauss(rng, static_cast<std::size_t>(g.size())));
}

Signal2D rand_sig2(Rng& rng, int l) {
    const auto g = GridSpec::make(l, 2);
    return Signal2D(g, gauss(rng, static_cast<std::size_t>(g.size()) * g.size()));
}

Signal1D band_sig(Rng& rng, int l, int band) {
    const auto g = GridSpec::make(l);
    const int n = g.size();
    Signal1D fh(g);
    const auto v = gauss(rng, static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        if (std::abs(freq_rep(k, n)) <= band) fh[k] = v[static_cast<std::size_t>(k)];
    return idft(fh);
}

Signal1D mode(const GridSpec& g, long long k) {
    Signal1D f(g);
    const long long n = g.size();
    for (long long x = 0; x < n; ++x) f[static_cast<int>(x)] = std::polar(1.0, 2.0 * M_PI * static_cast<double>(((k * x) % n + n) % n) / n);
    return f;
}

// never empty
Signal1D rand_mask(Rng& rng, const GridSpec& g, double density) {
    std::uniform_real_distribution<double> u;
    Signal1D m(g);
    bool any = false;
    for (auto& z : m.samples) {
        const bool on = u(rng) < density;
        z = on ? 1.0 : 0.0;
        any = any || on;
    }
    if (!any) m[static_cast<int>(rng() % static_cast<std::uint64_t>(g.size()))] = 1.0;
    return m;
}

// one of: gaussian, band-limited, masked unimodular
Signal1D mixed_input(Rng& rng, int l, int which) {
    switch (which % 3) {
        case 0: return rand_sig(rng, l);
        case 1: return band_sig(rng, l, 1 << (l - 3));
        default: {
            std::uniform_real_distribution<double> u;
            auto m = rand_mask(rng, GridSpec::make(l), 0.05 + 0.5 * u(rng));
            for (auto& z : m.samples) z *= std::polar(1.0, 2.0 * M_PI * u(rng));
            return m;
        }
    }
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    const double m = std::max(max_abs(a), max_abs(b));
    return m == 0.0 ? d : d / m;
}

std::mutex cache_mu;

const TileSet& canonical(int l) {
    static std::map<int, std::unique_ptr<TileSet>> cache;
    std::lock_guard<std::mutex> lk(cache_mu);
    auto& slot = cache[l];
    if (!slot) {
        const auto g = GridSpec::make(l);
        slot = std::make_unique<TileSet>(certify(canonical_tileset(g, canonical_scales(g))));
    }
    return *slot;
}

const PacketBank& canonical_bank(int l) {
    const TileSet& s = canonical(l);
    static std::map<int, std::unique_ptr<PacketBank>> cache;
    std::lock_guard<std::mutex> lk(cache_mu);
    auto& slot = cache[l];
    if (!slot) slot = std::make_unique<PacketBank>(make_packets(s, Window{}, GridSpec::make(l)));
    return *slot;
}

TileSet random_subset(const TileSet& s, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    TileSet out;
    for (auto i : idx) out.tiles.push_back(s.tiles[i]);
    return certify(out);
}

void metric(SuiteResult& r, const std::string& name, double v, bool tracked = false) {
    r.metrics.push_back({name, v, tracked});
}

void require(SuiteResult& r, bool ok, const std::string& what) {
    if (ok) return;
    if (r.passed) r.detail = what;
    r.passed = false;
}

int structural_runs(const RunConfig& c) { return 10 * c.trials; }

// ---- grid

void grid_dft_roundtrip(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double rt = 0.0, pv = 0.0;
    for (int l : {4, c.log_n, 12})
        for (int t = 0; t < c.trials; ++t) {
            const auto f = rand_sig(rng, l);
            const auto fh = dft(f);
            rt = std::max(rt, rel_err(idft(fh).samples, f.samples));
            double a = 0.0, b = 0.0;
            for (int k = 0; k < f.size(); ++k) {
                a += std::norm(fh[k]);
                b += std::norm(f[k]);
            }
            pv = std::max(pv, std::abs(a - f.size() * b) / (f.size() * b));
        }
    metric(r, "roundtrip_error", rt);
    metric(r, "parseval_error", pv);
    require(r, rt <= 1e-12, "dft round trip above 1e-12");
    require(r, pv <= 1e-12, "Parseval constant off by more than 1e-12");
}

void grid_lp_reconstruction(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0, sym = 0.0;
    for (int l : {6, c.log_n, 10}) {
        const int n = 1 << l;
        for (int k = 0; k < n; ++k) {
            const long long xi = freq_rep(k, n);
            double s = lp_p_symbol(xi, 0);
            for (int j = 0; j < l; ++j) s += lp_q_symbol(xi, j);
            sym = std::max(sym, std::abs(s - 1.0));
        }
        for (int t = 0; t < std::max(1, c.trials / 2); ++t) {
            const auto f = rand_sig(rng, l);
            auto acc = apply_symbol(f, [](long long xi) { return cplx(lp_p_symbol(xi, 0)); });
            for (int j = 0; j < l; ++j) {
                const auto q = apply_symbol(f, [j](long long xi) { return cplx(lp_q_symbol(xi, j)); });
                for (int x = 0; x < n; ++x) acc[x] += q[x];
            }
            err = std::max(err, rel_err(acc.samples, f.samples));
        }
    }
    metric(r, "reconstruction_error", err);
    metric(r, "symbol_sum_error", sym);
    require(r, err <= 1e-10, "P_0 + sum Q_k does not reconstruct f to 1e-10");
    require(r, sym <= 1e-12, "Littlewood-Paley symbols do not sum to 1");
}

void grid_signal_csv(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int t = 0; t < std::max(1, c.trials / 4); ++t)
        for (int axes : {1, 2}) {
            SignalFile s{16, axes, gauss(rng, axes == 1 ? 16 : 256)};
            const auto back = signal_from_csv(signal_to_csv(s));
            if (back.n != s.n || back.axes != s.axes || back.samples.size() != s.samples.size()) {
                err = 1.0;
                continue;
            }
            for (std::size_t i = 0; i < s.samples.size(); ++i) err = std::max(err, std::abs(back.samples[i] - s.samples[i]));
        }
    metric(r, "max_error", err);
    require(r, err == 0.0, "csv round trip is not exact");
}

void grid_family_norm(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto f = rand_sig(rng, 6), g = rand_sig(rng, 6);
        const auto two = lr_family_norm(SignalFamily{{f, f}, {}}, 2.0);
        const auto sup = lr_family_norm(SignalFamily{{f, g}, {}}, kInf);
        const auto one = lr_family_norm(SignalFamily{{f, g}, {}}, 1.0);
        for (int x = 0; x < f.size(); ++x) {
            const double a = std::abs(f[x]), b = std::abs(g[x]);
            err = std::max({err, std::abs(two[x].real() - std::sqrt(2.0) * a) / a, std::abs(sup[x].real() - std::max(a, b)) / std::max(a, b),
                            std::abs(one[x].real() - (a + b)) / (a + b)});
        }
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-13, "family norm closed forms");
}

// ---- dyadic

void dyadic_rank_one(const RunConfig&, std::uint64_t, SuiteResult& r) {
    const auto g = GridSpec::make(10);
    const auto scales = canonical_scales(g);
    const auto s = canonical_tileset(g, scales);
    const auto rep = check_rank_one(s);
    metric(r, "scales", static_cast<double>(scales.size()));
    metric(r, "tiles", static_cast<double>(s.size()));
    require(r, scales.size() >= 5 && scales.front() == 0 && scales[4] == 4, "canonical generator does not reach scales 0..4");
    require(r, rep.ok, "rank-one bullet " + std::to_string(rep.bullet) + " fails for tiles " + std::to_string(rep.first) + ", " +
                           std::to_string(rep.second));
}

void dyadic_tree_partition(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    int violations = 0;
    const int runs = structural_runs(c);
    for (int run = 0; run < runs; ++run) {
        const auto s = random_subset(canonical(8), 50, rng);
        for (int i = 0; i < 3; ++i) {
            const auto trees = extract_trees(s, (i + 1) % 3, i);
            std::vector<int> seen(s.size(), 0);
            for (const auto& t : trees)
                for (int m : t.members) {
                    ++seen[static_cast<std::size_t>(m)];
                    if (!tile_le(s.tiles[static_cast<std::size_t>(m)].component(i), t.top.component(i))) ++violations;
                }
            for (int k : seen) violations += k != 1;
        }
    }
    metric(r, "runs", runs);
    metric(r, "violations", violations);
    require(r, violations == 0, "tree extraction is not a partition into trees");
}

void dyadic_json(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    int bad = tiles_from_json(tiles_to_json(canonical(8))).tiles != canonical(8).tiles;
    for (int t = 0; t < c.trials; ++t) {
        const auto s = random_subset(canonical(9), 40, rng);
        bad += tiles_from_json(tiles_to_json(s)).tiles != s.tiles;
    }
    metric(r, "mismatches", bad);
    require(r, bad == 0, "tile json round trip");
}

// ---- wave packets

void wavepacket_normalization(const RunConfig&, std::uint64_t, SuiteResult& r) {
    const auto& bank = canonical_bank(8);
    double nerr = 0.0, serr = 0.0;
    for (const auto& tri : bank.packets)
        for (const auto& p : tri) {
            const auto smp = p.samples();
            nerr = std::max(nerr, std::abs(lp_norm(smp, 2) - 1.0));
            serr = std::max(serr, rel_err(dft(smp).samples, p.spectrum_full().samples));
        }
    metric(r, "norm_error", nerr);
    metric(r, "spectrum_error", serr);
    require(r, nerr <= 1e-12, "packets are not L2-normalized");
    require(r, serr <= 1e-9, "packet samples and stored spectrum disagree");
}

void wavepacket_fractional_derivative(const RunConfig& c, std::uint64_t, SuiteResult& r) {
    const auto g = GridSpec::make(c.log_n);
    double err = 0.0;
    for (double a : {0.5, 1.0, 1.5})
        for (long long n : {1LL, -5LL, 17LL, static_cast<long long>(g.size() / 4)}) {
            const auto e = mode(g, n);
            const auto d = fractional_derivative(e, a);
            std::vector<cplx> expect(e.samples);
            for (auto& z : expect) z *= std::pow(static_cast<double>(std::llabs(n)), a);
            err = std::max(err, rel_err(d.samples, expect));
        }
    metric(r, "max_error", err);
    require(r, err <= 1e-12, "D^alpha e_n != |n|^alpha e_n");
}

// ---- size and energy

void size_energy_chains(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int runs = structural_runs(c);
    int violations = 0, chains = 0;
    for (int run = 0; run < runs; ++run) {
        const auto s = random_subset(canonical(8), 120, rng);
        const auto f = mixed_input(rng, 8, run);
        const int j = run % 3;
        for (const auto& [n, chain] : energy_chains(coefficients(f, s, j))) {
            (void)n;
            if (chain.empty()) continue;
            ++chains;
            violations += !strongly_disjoint_check(s, chain, j);
        }
    }
    metric(r, "runs", runs);
    metric(r, "chains", chains);
    metric(r, "violations", violations);
    require(r, violations == 0, "energy-selected chain is not strongly disjoint");
}

// ---- operators

void op_bht_reference(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int l : {4, 6})
        for (int t = 0; t < c.trials; ++t) {
            const auto f = rand_sig(rng, l), g = rand_sig(rng, l);
            err = std::max(err, rel_err(bht_direct(f, g).samples, bht_direct_reference(f, g).samples));
        }
    metric(r, "max_error", err);
    require(r, err <= 1e-10, "fast BHT differs from the double sum");
}

void op_duality(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n;
    const auto& s = canonical(l);
    const auto& bank = canonical_bank(l);
    double err = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto f = mixed_input(rng, l, t), g = mixed_input(rng, l, t + 1), h = mixed_input(rng, l, t + 2);
        const cplx form = trilinear_form(f, g, h, s, bank).value;
        const cplx dual = pairing(bht_model(f, g, s, bank), h);
        err = std::max(err, std::abs(form - dual) / std::max(std::abs(dual), 1e-300));
    }
    metric(r, "instances", 50);
    metric(r, "max_error", err);
    require(r, err <= 1e-10, "trilinear form != pairing of the model operator");
}

void op_tensor_identity(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    const int reps = std::max(1, c.trials / 10);
    for (int l : {4, 5})
        for (auto kind : {ParaKind::I, ParaKind::II, ParaKind::III})
            for (int t = 0; t < reps; ++t) {
                const auto f = rand_sig2(rng, l), g = rand_sig2(rng, l);
                err = std::max(err, rel_err(tensor_bht_paraproduct(f, g, {kind, {}}).samples,
                                            tensor_bht_paraproduct_direct(f, g, {kind, {}}).samples));
            }
    metric(r, "max_error", err);
    require(r, err <= 1e-8, "scale-sum and multiplier forms of BHT x paraproduct differ");
}

void op_dilation(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = 7, n = 1 << l;
    double err = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto f = band_sig(rng, l, n / 4 - 1), g = band_sig(rng, l, n / 4 - 1);
        const auto h = bht_direct(f, g);
        Signal1D f2(f.grid), g2(f.grid);
        for (int x = 0; x < n; ++x) {
            f2[x] = f[(2 * x) % n];
            g2[x] = g[(2 * x) % n];
        }
        const auto h2 = bht_direct(f2, g2);
        double d = 0.0;
        for (int x = 0; x < n; ++x) d = std::max(d, std::abs(h2[x] - h[(2 * x) % n]));
        err = std::max(err, d / std::max(1.0, max_abs(h.samples)));
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-12, "dilation covariance");
}

void op_bilinearity(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n;
    const auto& s = canonical(l);
    const auto& bank = canonical_bank(l);
    const std::vector<std::pair<const char*, BilinearOp>> ops = {
        {"bht_direct", [](const Signal1D& a, const Signal1D& b) { return bht_direct(a, b); }},
        {"bht_model", [&](const Signal1D& a, const Signal1D& b) { return bht_model(a, b, s, bank); }},
        {"paraproduct", [](const Signal1D& a, const Signal1D& b) { return paraproduct(a, b, {ParaKind::II, {}}); }},
    };
    std::normal_distribution<double> d;
    double err = 0.0;
    for (int t = 0; t < std::max(1, c.trials / 4); ++t) {
        const auto f1 = rand_sig(rng, l), f2 = rand_sig(rng, l), g = rand_sig(rng, l);
        const cplx a(d(rng), d(rng)), b(d(rng), d(rng));
        Signal1D comb(f1.grid);
        for (int x = 0; x < f1.size(); ++x) comb[x] = a * f1[x] + b * f2[x];
        for (const auto& [name, op] : ops) {
            (void)name;
            const auto lhs = op(comb, g), r1 = op(f1, g), r2 = op(f2, g);
            std::vector<cplx> rhs(lhs.samples.size());
            for (std::size_t x = 0; x < rhs.size(); ++x) rhs[x] = a * r1.samples[x] + b * r2.samples[x];
            // the swapped slot uses the same combination
            const auto lhs2 = op(g, comb), s1 = op(g, f1), s2 = op(g, f2);
            std::vector<cplx> rhs2(lhs2.samples.size());
            for (std::size_t x = 0; x < rhs2.size(); ++x) rhs2[x] = a * s1.samples[x] + b * s2.samples[x];
            err = std::max({err, rel_err(lhs.samples, rhs), rel_err(lhs2.samples, rhs2)});
        }
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-11, "superposition");
}

// ---- vector valued

void vv_hybrid_split(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int l : {4, 5})
        for (int t = 0; t < c.trials; ++t) {
            const auto f1 = rand_sig(rng, l), f2 = rand_sig(rng, l);
            auto g = rand_sig(rng, l);
            if (t % 5 == 4)
                for (int x = 0; x < g.size(); x += 3) g[x] = 0.0;
            const double p = 1.0 + 0.25 * (t % 5);
            const auto m = m_operator(f1, f2, g);
            const auto m1 = m1_operator(f1, f2, g, p), m2 = m2_operator(f1, f2, g, p);
            std::vector<cplx> sum(m.samples.size());
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = m1.samples[i] + m2.samples[i];
            err = std::max(err, rel_err(m.samples, sum));
        }
    metric(r, "triples", 2 * c.trials);
    metric(r, "max_error", err);
    require(r, err <= 1e-9, "M != M1 + M2");
}

void vv_m1_rewrite(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto f1 = rand_sig(rng, 4), f2 = rand_sig(rng, 4), g = rand_sig(rng, 4);
        err = std::max(err, rel_err(m1_operator(f1, f2, g, 2.0).samples, m1_region(f1, f2, g, 2.0).samples));
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-9, "M1 through BHT of projections differs from its region sum");
}

void vv_t_r_identity(const RunConfig&, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double err = 0.0;
    for (int l : {5, 6}) {
        const int n = 1 << l;
        for (int nk = 1; nk <= 5; ++nk) {
            IntervalFamily ks;
            const int width = std::max(1, n / (2 * nk));
            for (int k = 0; k < nk; ++k) ks.intervals.push_back({-n / 2 + 1 + k * width, -n / 2 + (k + 1) * width});
            const auto f = rand_sig(rng, l), g = rand_sig(rng, l);
            for (double rr : {1.0, 1.5, 2.0, kInf}) err = std::max(err, rel_err(t_r(f, g, ks, rr).samples, t_r_reference(f, g, ks, rr).samples));
        }
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-9, "T_r projection identity");
}

void vv_range_golden(const RunConfig&, std::uint64_t, SuiteResult& r) {
    const auto bad = range_golden_mismatches();
    metric(r, "points", static_cast<double>(range_golden_table().size()));
    metric(r, "mismatches", static_cast<double>(bad.size()));
    require(r, bad.empty(), bad.empty() ? std::string() : bad.front());
}

void vv_range_case_i(const RunConfig&, std::uint64_t, SuiteResult& r) {
    int bad = 0, points = 0;
    for (const auto& tup : {TupleR::make(Rational(1, 4), Rational(1, 4)), TupleR::make(Rational(1, 2), Rational(1, 2)),
                            TupleR::make(Rational(1, 3), Rational(1, 6))}) {
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 10; ++j) {
                const auto pt = RangePoint::make(Rational(i, 10) - Rational(1, 5), Rational(2 * j, 10) - Rational(1, 5));
                bad += range_D(tup, pt) != range_bht(pt);
                ++points;
            }
    }
    metric(r, "points", points);
    metric(r, "mismatches", bad);
    require(r, bad == 0, "case i differs from the scalar range");
}

void vv_rf_sup(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n;
    IntervalFamily ks;
    for (int k = 0; k + 2 <= l; ++k) {
        ks.intervals.push_back({1LL << k, (2LL << k) - 1});
        ks.intervals.push_back({-(2LL << k) + 1, -(1LL << k)});
    }
    double err = 0.0;
    for (int t = 0; t < std::max(1, c.trials / 4); ++t) {
        const auto f = rand_sig(rng, l);
        const auto sup = rf_operator(f, ks, kInf);
        std::vector<cplx> expect(f.samples.size(), 0.0);
        for (const auto& iv : ks.intervals) {
            const auto p = fourier_project(f, iv, true);
            for (std::size_t x = 0; x < expect.size(); ++x) expect[x] = std::max(expect[x].real(), std::abs(p.samples[x]));
        }
        err = std::max(err, rel_err(sup.samples, expect));
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-12, "RF_inf is not the pointwise max of the projections");
}

// ---- helicoid

void helicoid_stopping(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u;
    const int runs = structural_runs(c);
    int violations = 0, levels = 0;
    for (int run = 0; run < runs; ++run) {
        const auto s = random_subset(canonical(8), 60, rng);
        const auto w = rand_mask(rng, GridSpec::make(8), 0.02 + 0.4 * u(rng));
        const auto d = stopping_time_select(s, w, c.chi_exp);
        const auto chk = check_decomposition(s, w, d);
        levels += static_cast<int>(d.levels.size());
        violations += chk.violations;
        if (!chk.ok()) require(r, false, chk.first_problem);
    }
    metric(r, "runs", runs);
    metric(r, "levels", levels);
    metric(r, "violations", violations);
}

void helicoid_triple(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u;
    int bad = 0, cells = 0;
    const auto g = GridSpec::make(8);
    for (int run = 0; run < c.trials; ++run) {
        const auto s = random_subset(canonical(8), 80, rng);
        const auto f = rand_mask(rng, g, 0.02 + 0.2 * u(rng)), gm = rand_mask(rng, g, 0.1 + 0.4 * u(rng)),
                   h = rand_mask(rng, g, 0.3 + 0.6 * u(rng));
        const auto t = triple_stopping(s, f, gm, h, c.chi_exp);
        std::string why;
        if (!check_triple(s, t, &why)) {
            ++bad;
            require(r, false, why);
        }
        cells += static_cast<int>(t.cells.size());
    }
    metric(r, "runs", c.trials);
    metric(r, "cells", cells);
    metric(r, "violations", bad);
}

void helicoid_localized(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const auto g = GridSpec::make(8);
    const auto& s = canonical(8);
    const auto& bank = canonical_bank(8);
    const Signal1D one(g, std::vector<cplx>(256, 1.0));
    const auto torus = DyadicInterval::make(0, 0);
    double err = 0.0;
    for (int t = 0; t < std::max(1, c.trials / 4); ++t) {
        const auto f = rand_sig(rng, 8), gg = rand_sig(rng, 8), h = rand_sig(rng, 8);
        const cplx full = trilinear_form(f, gg, h, s, bank).value;
        const cplx loc = localized_trilinear(f, gg, h, one, one, one, torus, s, bank).value;
        err = std::max(err, std::abs(full - loc) / std::max(1.0, std::abs(full)));

        const auto mf = rand_mask(rng, g, 0.5), mg = rand_mask(rng, g, 0.5), mh = rand_mask(rng, g, 0.5);
        const auto i0 = DyadicInterval::make(2 + t % 3, t % 4);
        Signal1D fm(g), gm(g), hm(g);
        for (int x = 0; x < 256; ++x) {
            fm[x] = f[x] * mf[x].real();
            gm[x] = gg[x] * mg[x].real();
            hm[x] = h[x] * mh[x].real();
        }
        cplx ref = 0.0;
        const auto tv = trilinear_form(fm, gm, hm, s, bank, true);
        for (std::size_t k = 0; k < s.size(); ++k)
            if (contains(i0, s.tiles[k].space)) ref += tv.breakdown[k];
        const cplx got = localized_trilinear(f, gg, h, mf, mg, mh, i0, s, bank).value;
        err = std::max(err, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-12, "localized form");
}

// ---- leibniz

LeibnizExponents lex(LeibnizKind k, Rational a, Rational b, std::vector<Rational> inv) {
    LeibnizExponents e;
    e.kind = k;
    e.alpha = a;
    e.beta = b;
    e.inv = std::move(inv);
    return e;
}

Signal2D sep_mode(const GridSpec& g, long long a, long long b) {
    Signal2D f(g);
    const long long n = g.size();
    for (long long x = 0; x < n; ++x)
        for (long long y = 0; y < n; ++y)
            f.at(static_cast<int>(x), static_cast<int>(y)) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(((a * x + b * y) % n + n) % n) / n);
    return f;
}

Signal2D sep_product(const Signal1D& u, const Signal1D& v) {
    Signal2D f(GridSpec::make(u.grid.log_size, 2));
    for (int x = 0; x < u.size(); ++x)
        for (int y = 0; y < v.size(); ++y) f.at(x, y) = u[x] * v[y];
    return f;
}

void leibniz_single_frequency(const RunConfig&, std::uint64_t, SuiteResult& r) {
    const auto g = GridSpec::make(8);
    const Rational h(1, 2);
    double err = 0.0;
    for (long long a4 : {1LL, 2LL, 4LL, 6LL})
        for (long long n : {1LL, 5LL, 17LL, 60LL}) {
            const double a = a4 / 4.0;
            const auto e = mode(g, n);
            const double got = leibniz_ratio_1d(e, e, lex(LeibnizKind::one_d, Rational(a4, 4), 0, {1, h, h, h, h}));
            err = std::max(err, std::abs(got - std::pow(2.0, a) / 2.0) / std::pow(2.0, a));
        }
    const auto g2 = GridSpec::make(6, 2);
    const long long a = 3, b = -5, cc = 7, d = 2;
    const double al = 0.5, be = 1.5;
    const double expect = std::pow(std::abs(a + cc), al) * std::pow(std::abs(b + d), be) /
                          ((std::pow(std::abs(a), al) + std::pow(std::abs(cc), al)) * (std::pow(std::abs(b), be) + std::pow(std::abs(d), be)));
    const double got = leibniz_ratio_2d(sep_mode(g2, a, b), sep_mode(g2, cc, d), lex(LeibnizKind::two_d, h, Rational(3, 2), {1, h, h, h, h, h, h, h, h}));
    err = std::max(err, std::abs(got - expect) / expect);
    metric(r, "max_error", err);
    require(r, err <= 1e-10, "single-frequency closed forms");
}

void leibniz_beta_zero(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const Rational h(1, 2), q(1, 4);
    const auto gy = GridSpec::make(6);
    double err = 0.0;
    for (int t = 0; t < std::max(1, c.trials / 4); ++t) {
        const auto f1 = band_sig(rng, 6, 14), g1 = band_sig(rng, 6, 14);
        const auto u = mode(gy, 1 + t % 7), v = mode(gy, 2 + t % 5);
        const double r1 = leibniz_ratio_1d(f1, g1, lex(LeibnizKind::one_d, h, 0, {h, q, q, q, q}));
        const double r2 = leibniz_ratio_2d(sep_product(f1, u), sep_product(g1, v), lex(LeibnizKind::two_d, h, 0, {h, q, q, q, q, q, q, q, q}));
        err = std::max(err, std::abs(r2 - r1 / 2.0) / r1);
    }
    metric(r, "max_error", err);
    require(r, err <= 1e-10, "beta = 0 reduction");
}

void leibniz_decomposition_exact(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const auto g = GridSpec::make(8);
    double single = 0.0, full = 0.0;
    for (double a : {0.5, 1.0}) {
        const auto d = paraproduct_decomposition_check(mode(g, 1), mode(g, 3), a, 64);
        single = std::max(single, d.residual);
    }
    for (int t = 0; t < std::max(1, c.trials / 10); ++t) {
        const auto f = band_sig(rng, 8, 64), h = band_sig(rng, 8, 64);
        const auto d = paraproduct_decomposition_check(f, h, 0.5 + 0.5 * (t % 2), 512);
        full = std::max(full, d.residual / d.reference);
    }
    metric(r, "single_frequency_residual", single);
    metric(r, "full_series_residual", full);
    require(r, single <= 1e-8, "single-frequency reconstruction above 1e-8");
    require(r, full <= 1e-9, "untruncated reconstruction is not exact");
}

// ---- empirical constants

void se_energy_l2(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const auto& s = canonical(8);
    const auto& bank = canonical_bank(8);
    const int runs = 5 * c.trials;
    std::vector<double> ratio(static_cast<std::size_t>(runs));
    std::vector<Signal1D> inputs;
    for (int t = 0; t < runs; ++t) inputs.push_back(mixed_input(rng, 8, t));
    parallel_for(ratio.size(), [&](std::size_t t) {
        ratio[t] = energy(coefficients(inputs[t], s, bank, static_cast<int>(t % 3))).value / lp_norm(inputs[t], 2);
    });
    metric(r, "runs", runs);
    metric(r, "c_energy", *std::max_element(ratio.begin(), ratio.end()), true);
}

void se_para_energy_l1(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    std::vector<DyadicInterval> all;
    for (int j = 0; j <= 5; ++j)
        for (int m = 0; m < (1 << j); ++m) all.push_back(DyadicInterval::make(j, m));
    std::uniform_real_distribution<double> u;
    double worst = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto h = rand_mask(rng, GridSpec::make(8), 0.02 + 0.3 * u(rng));
        for (bool lac : {false, true}) worst = std::max(worst, paraproduct_energy(h, all, lac) / lp_norm(h, 1));
    }
    metric(r, "c_para_energy", worst, true);
}

void se_size_vs_simple(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int runs = 5 * c.trials;
    double up = 0.0, down = 0.0;
    for (int t = 0; t < runs; ++t) {
        const auto s = random_subset(canonical(8), 40, rng);
        const auto f = mixed_input(rng, 8, t);
        const double sz = size(coefficients(f, s, t % 3)).value;
        const double ss = simple_size(f, s, c.chi_exp);
        up = std::max(up, sz / ss);
        if (sz > 0.0) down = std::max(down, ss / sz);
    }
    metric(r, "runs", runs);
    metric(r, "size_over_averaged", up, true);
    metric(r, "averaged_over_size", down, true);
    require(r, up <= 5.0, "size exceeds 5 x averaged size");
}

void op_size_energy_bound(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const auto& s = canonical(8);
    const auto& bank = canonical_bank(8);
    const std::array<std::array<double, 3>, 3> thetas = {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.5, 0.25, 0.25}, {0.1, 0.45, 0.45}}};
    const int runs = 5 * c.trials;
    std::array<double, 3> worst{};
    for (int t = 0; t < runs; ++t) {
        const auto f = mixed_input(rng, 8, t), g = mixed_input(rng, 8, t + 1), h = mixed_input(rng, 8, t + 2);
        const auto bc = trilinear_size_energy_bound_check(f, g, h, s, thetas[0], bank);
        for (std::size_t k = 0; k < 3; ++k) {
            double rhs = 1.0;
            for (std::size_t j = 0; j < 3; ++j) rhs *= std::pow(bc.sizes[j], thetas[k][j]) * std::pow(bc.energies[j], 1.0 - thetas[k][j]);
            if (rhs > 0.0) worst[k] = std::max(worst[k], bc.lhs / rhs);
        }
    }
    metric(r, "runs", runs);
    metric(r, "ratio_theta_equal", worst[0], true);
    metric(r, "ratio_theta_half", worst[1], true);
    metric(r, "ratio_theta_tenth", worst[2], true);
}

void helicoid_pn(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    const auto g = GridSpec::make(8);
    const auto& s = canonical(8);
    const auto& bank = canonical_bank(8);
    for (int level = 0; level <= 1; ++level) {
        PnConfig pc;
        pc.level = level;
        pc.eps = c.epsilon;
        pc.mexp = c.chi_exp;
        pc.inv_r = {0.5, 0.5, 0.25};
        std::array<double, 3> worst{};
        for (int j = 2; j <= 4; ++j)
            for (int t = 0; t < c.trials; ++t) {
                const auto i0 = DyadicInterval::make(j, t % (1 << j));
                const auto inst = random_pn_instance(g, i0, pc, level == 0 ? 1 : 3, 0.1 + 0.8 * ((t * 7) % 10) / 10.0,
                                                     mix_seed(seed, static_cast<std::uint64_t>(level * 1000 + j * 100 + t)));
                worst[static_cast<std::size_t>(j - 2)] = std::max(worst[static_cast<std::size_t>(j - 2)], pn_ratio(inst, s, bank, pc).ratio);
            }
        const std::string p = "level" + std::to_string(level);
        metric(r, p + "_quarter", worst[0], true);
        metric(r, p + "_eighth", worst[1], true);
        metric(r, p + "_sixteenth", worst[2], true);
        const double lo = *std::min_element(worst.begin(), worst.end()), hi = *std::max_element(worst.begin(), worst.end());
        metric(r, p + "_spread", lo > 0.0 ? hi / lo : kInf, true);
        require(r, std::isfinite(hi) && lo > 0.0, p + " ratio is degenerate");
    }
}

void se_weak11(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n;
    const auto g = GridSpec::make(l);
    std::uniform_real_distribution<double> u;
    double worst = 0.0;
    for (int t = 0; t < 5 * c.trials; ++t) {
        Signal1D f(g);
        switch (t % 4) {
            case 0: f = rand_mask(rng, g, 0.01 + 0.5 * u(rng)); break;
            case 1: f[static_cast<int>(rng() % static_cast<std::uint64_t>(g.size()))] = 1.0; break;
            case 2: f = rand_sig(rng, l); break;
            default: {
                const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(g.size()));
                const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(g.size() / 4));
                for (int x = 0; x < len; ++x) f[(a + x) % g.size()] = 1.0;
            }
        }
        worst = std::max(worst, weak11_ratio(f));
    }
    metric(r, "c_weak11", worst, true);
    require(r, worst <= 4.0, "weak (1,1) constant above 4");
}

void helicoid_packing(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u;
    const auto g = GridSpec::make(8);
    const auto& s = canonical(8);
    double single = 0.0, triple = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto w = rand_mask(rng, g, 0.02 + 0.5 * u(rng));
        single = std::max(single, packing_constant(stopping_time_select(s, w, c.chi_exp), w));
        const auto w2 = rand_mask(rng, g, 0.05 + 0.5 * u(rng)), w3 = rand_mask(rng, g, 0.05 + 0.5 * u(rng));
        const auto ts = triple_stopping(s, w, w2, w3, c.chi_exp);
        for (double p : ts.packing) triple = std::max(triple, p);
    }
    metric(r, "packing", single, true);
    metric(r, "triple_packing", triple, true);
}

void vv_rf_bound(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n, n = 1 << l;
    IntervalFamily lac;
    for (int k = 0; k + 2 <= l; ++k) {
        lac.intervals.push_back({1LL << k, (2LL << k) - 1});
        lac.intervals.push_back({-(2LL << k) + 1, -(1LL << k)});
    }
    for (double p : {2.0, 3.0, 4.0}) {
        double worst = 0.0;
        for (int t = 0; t < c.trials; ++t) {
            IntervalFamily ks = lac;
            if (t % 2) {
                // random cut points splitting the spectrum into at most 8 intervals
                std::vector<long long> cuts{-n / 2 + 1, n / 2 + 1};
                for (int k = 0; k < 7; ++k) cuts.push_back(-n / 2 + 1 + static_cast<long long>(rng() % static_cast<std::uint64_t>(n)));
                std::sort(cuts.begin(), cuts.end());
                cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
                ks.intervals.clear();
                for (std::size_t k = 0; k + 1 < cuts.size(); ++k) ks.intervals.push_back({cuts[k], cuts[k + 1] - 1});
            }
            const auto f = mixed_input(rng, l, t);
            worst = std::max(worst, lp_norm(rf_operator(f, ks, 2.0), p) / lp_norm(f, p));
        }
        metric(r, "c_rf_p" + std::to_string(static_cast<int>(p)), worst, true);
    }
}

void op_carleson(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto f = mixed_input(rng, c.log_n, t);
        worst = std::max(worst, lp_norm(carleson(f), 2) / lp_norm(f, 2));
    }
    metric(r, "c_carleson_l2", worst, true);
}

void op_square_function(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const int l = c.log_n;
    for (double p : {1.0, 2.0, 3.0}) {
        double worst = 0.0;
        for (int t = 0; t < c.trials; ++t) {
            const auto f = band_sig(rng, l, 1 << (l - 2));
            cplx mean = 0.0;
            for (const auto& z : f.samples) mean += z;
            mean /= static_cast<double>(f.size());
            auto sq = square_function(f);
            for (auto& z : sq.samples) z = z.real() + std::abs(mean);
            worst = std::max(worst, lp_norm(f, p) / lp_norm(sq, p));
        }
        metric(r, "c_square_p" + std::to_string(static_cast<int>(p)), worst, true);
    }
}

void leibniz_scan_suite(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    const Rational h(1, 2), t(1, 3), q(3, 4);
    std::vector<Rational> mixed1{1, 1}, mixed2{Rational(3, 2), h};
    for (int k = 0; k < 4; ++k) {
        mixed1.insert(mixed1.end(), {h, h, h, h});
        mixed2.insert(mixed2.end(), {q, 0, q, h});
    }
    const std::vector<std::pair<std::string, LeibnizExponents>> cells = {
        {"1d_holder", lex(LeibnizKind::one_d, h, 0, {1, h, h, h, h})},
        {"1d_alpha1_s3/2", lex(LeibnizKind::one_d, 1, 0, {Rational(2, 3), t, t, t, t})},
        {"2d_holder", lex(LeibnizKind::two_d, h, Rational(3, 2), {1, h, h, h, h, h, h, h, h})},
        {"mixed_holder", lex(LeibnizKind::mixed, h, h, mixed1)},
        {"mixed_s2/3", lex(LeibnizKind::mixed, 1, 1, mixed2)},
    };
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const bool one = cells[k].second.kind == LeibnizKind::one_d;
        const auto s = leibniz_scan(cells[k].second, one ? c.log_n : 5, one ? 5 * c.trials : c.trials, mix_seed(seed, k));
        metric(r, cells[k].first, s.max_ratio, true);
    }
}

void leibniz_tail_rate(const RunConfig&, std::uint64_t seed, SuiteResult& r) {
    Rng rng(seed);
    const auto f = band_sig(rng, 10, 256), h = band_sig(rng, 10, 256);
    for (double a : {0.5, 1.0}) {
        double lo = kInf, hi = 0.0;
        bool bounded = true;
        for (int nm : {8, 16, 32, 64}) {
            const auto d = paraproduct_decomposition_check(f, h, a, nm);
            bounded = bounded && d.residual <= d.tail_bound * (1 + 1e-9) + 1e-12;
            const double rate = 2.0 / a * std::pow(static_cast<double>(nm), -a);
            lo = std::min(lo, d.residual / d.reference / rate);
            hi = std::max(hi, d.residual / d.reference / rate);
        }
        const std::string name = a == 0.5 ? "spread_alpha_half" : "spread_alpha_one";
        metric(r, name, hi / lo, true);
        require(r, hi / lo <= 4.0, name + " above 4");
        require(r, bounded, "residual exceeds the coefficient tail bound");
    }
}

void op_norm_scan(const RunConfig& c, std::uint64_t seed, SuiteResult& r) {
    const auto res = scan_norm(scan_operator_names(), {ScanExponents{2, 2, 1}}, {7, 8, 9}, std::max(2, c.trials / 4), seed);
    for (const auto& row : res.rows) {
        if (row.n != 512) continue;
        metric(r, row.op, row.ratio, true);
        if (row.op == "product") require(r, std::abs(row.ratio - 1.0) <= 1e-12, "product control is not 1");
    }
    for (const auto& sl : res.slopes) metric(r, "slope_" + sl.op, sl.slope);
}

}  // namespace

std::uint64_t name_hash(const char* s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 1099511628211ULL;
    }
    return h;
}

const std::vector<SuiteDef>& suite_registry() {
    using K = SuiteKind;
    static const std::vector<SuiteDef> reg = {
        {"grid.dft_roundtrip", K::identity, grid_dft_roundtrip},
        {"grid.lp_reconstruction", K::identity, grid_lp_reconstruction},
        {"grid.signal_csv", K::identity, grid_signal_csv},
        {"grid.family_norm", K::identity, grid_family_norm},
        {"dyadic.rank_one", K::structural, dyadic_rank_one},
        {"dyadic.tree_partition", K::structural, dyadic_tree_partition},
        {"dyadic.json", K::identity, dyadic_json},
        {"wavepacket.normalization", K::identity, wavepacket_normalization},
        {"wavepacket.fractional_derivative", K::identity, wavepacket_fractional_derivative},
        {"size_energy.chains", K::structural, size_energy_chains},
        {"operators.bht_reference", K::identity, op_bht_reference},
        {"operators.duality", K::identity, op_duality},
        {"operators.tensor_identity", K::identity, op_tensor_identity},
        {"operators.dilation", K::identity, op_dilation},
        {"operators.bilinearity", K::identity, op_bilinearity},
        {"vector_valued.hybrid_split", K::identity, vv_hybrid_split},
        {"vector_valued.m1_rewrite", K::identity, vv_m1_rewrite},
        {"vector_valued.t_r_identity", K::identity, vv_t_r_identity},
        {"vector_valued.range_golden", K::identity, vv_range_golden},
        {"vector_valued.range_case_i", K::identity, vv_range_case_i},
        {"vector_valued.rf_sup", K::identity, vv_rf_sup},
        {"helicoid.stopping_time", K::structural, helicoid_stopping},
        {"helicoid.triple_stopping", K::structural, helicoid_triple},
        {"helicoid.localized", K::identity, helicoid_localized},
        {"leibniz.single_frequency", K::identity, leibniz_single_frequency},
        {"leibniz.beta_zero", K::identity, leibniz_beta_zero},
        {"leibniz.decomposition_exact", K::identity, leibniz_decomposition_exact},
        {"size_energy.energy_l2", K::empirical, se_energy_l2},
        {"size_energy.para_energy_l1", K::empirical, se_para_energy_l1},
        {"size_energy.size_vs_averaged", K::empirical, se_size_vs_simple},
        {"size_energy.weak11", K::empirical, se_weak11},
        {"operators.size_energy_bound", K::empirical, op_size_energy_bound},
        {"operators.carleson_l2", K::empirical, op_carleson},
        {"operators.square_function", K::empirical, op_square_function},
        {"operators.norm_scan", K::empirical, op_norm_scan},
        {"vector_valued.rf_bound", K::empirical, vv_rf_bound},
        {"helicoid.localized_ratio", K::empirical, helicoid_pn},
        {"helicoid.packing", K::empirical, helicoid_packing},
        {"leibniz.scan", K::empirical, leibniz_scan_suite},
        {"leibniz.tail_rate", K::empirical, leibniz_tail_rate},
    };
    return reg;
}

}  // namespace htf::detail
