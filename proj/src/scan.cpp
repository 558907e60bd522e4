#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"

#include "htf/experiments.hpp"
#include "htf/operators.hpp"

namespace htf {

namespace {

using Rng = std::mt19937_64;

struct Inputs {
    Signal1D f, g, mask;  // mask = 1_F, used for the product control
    Signal2D f2, g2;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Even trials are restricted type (|f| <= 1_F with random phase), odd trials band-limited to |xi| <= N/8.
void fill(std::vector<cplx>& f, std::vector<cplx>& mask, std::size_t n_axis, int dims, bool restricted, Rng& rng) {
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> d;
    const std::size_t total = dims == 1 ? n_axis : n_axis * n_axis;
    f.assign(total, 0.0);
    mask.assign(total, 0.0);
    if (restricted) {
        const double density = 0.05 + 0.45 * u(rng);
        for (std::size_t i = 0; i < total; ++i)
            if (u(rng) < density) {
                mask[i] = 1.0;
                f[i] = std::polar(1.0, 2.0 * M_PI * u(rng));
            }
        if (std::all_of(mask.begin(), mask.end(), [](cplx z) { return z == cplx(0.0); })) {
            mask[0] = 1.0;
            f[0] = 1.0;
        }
        return;
    }
    const long long n = static_cast<long long>(n_axis);
    const long long band = std::max(1LL, n / 8);
    auto in_band = [&](std::size_t k) { return std::llabs(freq_rep(static_cast<int>(k), static_cast<int>(n))) <= band; };
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t kx = dims == 1 ? i : i / n_axis, ky = dims == 1 ? 0 : i % n_axis;
        const double re = d(rng), im = d(rng);
        if (in_band(kx) && in_band(ky)) f[i] = cplx(re, im);
    }
    const int log_n = static_cast<int>(std::lround(std::log2(static_cast<double>(n_axis))));
    if (dims == 1) {
        f = idft(Signal1D(GridSpec::make(log_n), f)).samples;
    } else {
        f = idft(Signal2D(GridSpec::make(log_n, 2), f)).samples;
    }
    for (std::size_t i = 0; i < total; ++i) mask[i] = std::abs(f[i]) > 0.0 ? 1.0 : 0.0;
}

Inputs make_inputs(int log_n, int trial, std::uint64_t seed) {
    Inputs in;
    const bool restricted = trial % 2 == 0;
    const auto g1 = GridSpec::make(log_n);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(log_n) * 100000 + static_cast<std::uint64_t>(trial)));
    std::vector<cplx> f, g, m, unused;
    fill(f, m, static_cast<std::size_t>(g1.size()), 1, restricted, rng);
    fill(g, unused, static_cast<std::size_t>(g1.size()), 1, restricted, rng);
    in.f = Signal1D(g1, f);
    in.g = Signal1D(g1, g);
    in.mask = Signal1D(g1, m);
    const int l2 = std::max(2, log_n - 3);
    const auto g2 = GridSpec::make(l2, 2);
    Rng rng2(mix_seed(seed, 1ULL << 40 | (static_cast<std::uint64_t>(log_n) * 100000 + static_cast<std::uint64_t>(trial))));
    fill(f, unused, static_cast<std::size_t>(g2.size()), 2, restricted, rng2);
    fill(g, unused, static_cast<std::size_t>(g2.size()), 2, restricted, rng2);
    in.f2 = Signal2D(g2, f);
    in.g2 = Signal2D(g2, g);
    return in;
}

IntervalFamily lacunary_family(int log_n) {
    IntervalFamily ks;
    for (int k = 0; k + 2 <= log_n; ++k) {
        ks.intervals.push_back({1LL << k, (2LL << k) - 1});
        ks.intervals.push_back({-(2LL << k) + 1, -(1LL << k)});
    }
    return ks;
}

bool is_2d(const std::string& op) { return op == "para_tensor"; }

}  // namespace

std::string ScanExponents::label() const {
    auto one = [](double v) {
        if (v == kInf) return std::string("inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };
    return one(p) + ":" + one(q) + ":" + one(s);
}

std::vector<std::string> scan_operator_names() {
    return {"product", "bht_direct", "bht_model", "para_I", "para_II", "para_III", "para_tensor", "t_r_1", "t_r_3/2", "t_r_2"};
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& ratio) {
    if (n.size() != ratio.size() || n.size() < 2) fail(ErrorCode::domain, "slope needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log(n[i]);
        my += std::log(ratio[i]);
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double dx = std::log(n[i]) - mx;
        sxy += dx * (std::log(ratio[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ScanResult scan_norm(const std::vector<std::string>& ops, const std::vector<ScanExponents>& exps, const std::vector<int>& log_ladder,
                     int trials, std::uint64_t seed) {
    const auto known = scan_operator_names();
    for (const auto& op : ops)
        if (std::find(known.begin(), known.end(), op) == known.end()) fail(ErrorCode::usage, "unknown operator '" + op + "'");
    if (trials < 1) fail(ErrorCode::usage, "scan needs at least one trial");
    if (exps.empty() || log_ladder.empty()) fail(ErrorCode::usage, "scan needs exponents and a ladder");
    for (const auto& e : exps)
        if (!(e.p >= 1.0 && e.q >= 1.0 && e.s > 0.0)) fail(ErrorCode::usage, "scan exponents need p, q >= 1 and s > 0");
    for (int l : log_ladder)
        if (l < 5 || l > 14) fail(ErrorCode::usage, "scan grid sizes must lie in [32, 16384]");

    ScanResult res;
    // ratios[op][exp][ladder index]
    std::vector<std::vector<std::vector<double>>> ratios(ops.size(), std::vector<std::vector<double>>(exps.size()));
    for (int l : log_ladder) {
        const auto grid = GridSpec::make(l);
        const bool need_model = std::find(ops.begin(), ops.end(), "bht_model") != ops.end();
        TileSet family;
        PacketBank bank;
        if (need_model) {
            family = certify(canonical_tileset(grid, canonical_scales(grid)));
            bank = make_packets(family, Window{}, grid);
        }
        const auto lac = lacunary_family(l);
        std::vector<Inputs> inputs(static_cast<std::size_t>(trials));
        parallel_for(inputs.size(), [&](std::size_t t) { inputs[t] = make_inputs(l, static_cast<int>(t), seed); });

        for (std::size_t oi = 0; oi < ops.size(); ++oi) {
            const std::string& op = ops[oi];
            // per trial and exponent cell
            std::vector<std::vector<double>> cell(inputs.size(), std::vector<double>(exps.size(), 0.0));
            parallel_for(inputs.size(), [&](std::size_t t) {
                const Inputs& in = inputs[t];
                const bool restricted = t % 2 == 0;
                std::vector<cplx> out;
                const std::vector<cplx>* a = &in.f.samples;
                const std::vector<cplx>* b = &in.g.samples;
                if (op == "product") {
                    if (restricted) a = b = &in.mask.samples;
                    out.resize(a->size());
                    for (std::size_t x = 0; x < out.size(); ++x) out[x] = (*a)[x] * (*b)[x];
                } else if (op == "bht_direct") {
                    out = bht_direct(in.f, in.g).samples;
                } else if (op == "bht_model") {
                    out = bht_model(in.f, in.g, family, bank).samples;
                } else if (op == "para_I" || op == "para_II" || op == "para_III") {
                    const ParaKind k = op == "para_I" ? ParaKind::I : op == "para_II" ? ParaKind::II : ParaKind::III;
                    out = paraproduct(in.f, in.g, {k, {}}).samples;
                } else if (op == "para_tensor") {
                    a = &in.f2.samples;
                    b = &in.g2.samples;
                    out = biparam_paraproduct(in.f2, in.g2, {ParaproductSpec{ParaKind::II, {}}, ParaproductSpec{ParaKind::II, {}}}).samples;
                } else {
                    const double r = op == "t_r_1" ? 1.0 : op == "t_r_2" ? 2.0 : 1.5;
                    out = t_r(in.f, in.g, lac, r).samples;
                }
                for (std::size_t e = 0; e < exps.size(); ++e) {
                    const double den = lp_norm(*a, exps[e].p) * lp_norm(*b, exps[e].q);
                    cell[t][e] = den > 0.0 ? lp_norm(out, exps[e].s) / den : 0.0;
                }
            });
            for (std::size_t e = 0; e < exps.size(); ++e) {
                double m = 0.0;
                for (const auto& row : cell) m = std::max(m, row[e]);
                ratios[oi][e].push_back(m);
                ScanRow row;
                row.n = grid.size();
                row.op = op;
                row.exponents = exps[e].label();
                row.ratio = m;
                row.trials = trials;
                res.rows.push_back(row);
            }
        }
    }
    std::vector<double> ns;
    for (int l : log_ladder) ns.push_back(std::ldexp(1.0, l));
    for (std::size_t oi = 0; oi < ops.size(); ++oi)
        for (std::size_t e = 0; e < exps.size(); ++e) {
            ScanSlope sl;
            sl.op = ops[oi];
            sl.exponents = exps[e].label();
            sl.slope = ns.size() >= 2 ? loglog_slope(ns, ratios[oi][e]) : 0.0;
            res.slopes.push_back(sl);
        }
    return res;
}

std::string scan_csv(const ScanResult& r) {
    std::ostringstream out;
    out << "N,grid,operator,exponents,ratio,trials\n";
    for (const auto& row : r.rows) {
        const int side = is_2d(row.op) ? std::max(4, row.n / 8) : row.n;
        out << row.n << ',' << (is_2d(row.op) ? std::to_string(side) + "x" + std::to_string(side) : std::to_string(side)) << ','
            << row.op << ',' << row.exponents << ',' << fmt(row.ratio) << ',' << row.trials << '\n';
    }
    for (const auto& s : r.slopes) out << "# slope," << s.op << ',' << s.exponents << ',' << fmt(s.slope) << '\n';
    return out.str();
}

std::string scan_json(const ScanResult& r) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"N", row.n}, {"operator", row.op}, {"exponents", row.exponents}, {"ratio", row.ratio}, {"trials", row.trials}});
    j["slopes"] = nlohmann::ordered_json::array();
    for (const auto& s : r.slopes) j["slopes"].push_back({{"operator", s.op}, {"exponents", s.exponents}, {"slope", s.slope}});
    return j.dump(2) + "\n";
}

}  // namespace htf
