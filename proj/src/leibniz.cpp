#include "htf/leibniz.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "htf/wavepacket.hpp"

namespace htf {

namespace {

using R = Rational;

double to_p(const R& inv) { return inv.numerator() == 0 ? kInf : 1.0 / boost::rational_cast<double>(inv); }

std::string idx_name(const char* what, std::size_t i) { return std::string(what) + std::to_string(i); }

Admissibility check(const LeibnizExponents& e, bool with_lower_bound) {
    Admissibility a;
    auto no = [&](const std::string& why) {
        a.ok = false;
        a.violated = why;
        return a;
    };
    if (e.inv.size() != leibniz_arity(e.kind))
        return no("expected " + std::to_string(leibniz_arity(e.kind)) + " reciprocal exponents");
    if (!(e.alpha.numerator() > 0)) return no("alpha must be positive");
    if (e.kind != LeibnizKind::one_d && e.beta.numerator() < 0) return no("beta must be non-negative");
    const R one(1), zero(0);
    auto pq_ok = [&](const R& v) { return v >= zero && v < one; };
    const R smin = e.kind == LeibnizKind::one_d ? one + e.alpha : one + std::min(e.alpha, e.beta);
    if (e.kind == LeibnizKind::mixed) {
        const R is1 = e.inv[0], is2 = e.inv[1];
        if (!(is1 > zero)) return no("s1 must be finite");
        if (!(is1 < R(2))) return no("s1 must exceed 1/2");
        if (!(is2 > zero && is2 <= one)) return no("s2 must lie in [1, inf)");
        if (with_lower_bound && !(is1 < smin)) return no("s1 must exceed max(1/(1+alpha), 1/(1+beta))");
        for (std::size_t t = 0; t < 4; ++t) {
            const R px = e.inv[2 + 4 * t], py = e.inv[3 + 4 * t], qx = e.inv[4 + 4 * t], qy = e.inv[5 + 4 * t];
            for (const R& v : {px, py, qx, qy})
                if (!pq_ok(v)) return no("term " + std::to_string(t + 1) + ": exponents must lie in (1, inf]");
            if (px + qx != is1) return no("term " + std::to_string(t + 1) + ": Hoelder fails in x (1/p + 1/q != 1/s1)");
            if (py + qy != is2) return no("term " + std::to_string(t + 1) + ": Hoelder fails in y (1/p + 1/q != 1/s2)");
        }
        return a;
    }
    const R is = e.inv[0];
    if (!(is > zero)) return no("s must be finite");
    if (with_lower_bound && !(is < smin))
        return no(e.kind == LeibnizKind::one_d ? "s must exceed 1/(1+alpha)" : "s must exceed max(1/(1+alpha), 1/(1+beta))");
    const std::size_t terms = (e.inv.size() - 1) / 2;
    for (std::size_t t = 0; t < terms; ++t) {
        const R p = e.inv[1 + 2 * t], q = e.inv[2 + 2 * t];
        if (!pq_ok(p)) return no(idx_name("p_", t + 1) + " must lie in (1, inf]");
        if (!pq_ok(q)) return no(idx_name("q_", t + 1) + " must lie in (1, inf]");
        if (p + q != is) return no("Hoelder fails: 1/p_" + std::to_string(t + 1) + " + 1/q_" + std::to_string(t + 1) + " != 1/s");
    }
    return a;
}

void require(const LeibnizExponents& e, LeibnizKind k, bool probe) {
    if (e.kind != k) fail(ErrorCode::domain, std::string("exponents are for the ") + leibniz_kind_name(e.kind) + " rule");
    const auto a = probe ? leibniz_holder_only(e) : leibniz_admissible(e);
    if (!a.ok) fail(ErrorCode::domain, "inadmissible exponents: " + a.violated);
}

double ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? kInf : 0.0;
}

Signal1D times(const Signal1D& a, const Signal1D& b) {
    Signal1D out(a.grid);
    for (int x = 0; x < a.size(); ++x) out[x] = a[x] * b[x];
    return out;
}

Signal2D times(const Signal2D& a, const Signal2D& b) {
    Signal2D out(a.grid);
    for (std::size_t i = 0; i < a.samples.size(); ++i) out.samples[i] = a.samples[i] * b.samples[i];
    return out;
}

Signal2D dxy(const Signal2D& f, double a, double b) { return derivative_axis(derivative_axis(f, a, 0), b, 1); }

}  // namespace

std::size_t leibniz_arity(LeibnizKind k) {
    switch (k) {
        case LeibnizKind::one_d: return 5;
        case LeibnizKind::two_d: return 9;
        case LeibnizKind::mixed: return 18;
    }
    return 0;
}

const char* leibniz_kind_name(LeibnizKind k) {
    switch (k) {
        case LeibnizKind::one_d: return "1d";
        case LeibnizKind::two_d: return "2d";
        case LeibnizKind::mixed: return "mixed";
    }
    return "?";
}

LeibnizKind leibniz_kind_from_name(const std::string& s) {
    if (s == "1d") return LeibnizKind::one_d;
    if (s == "2d") return LeibnizKind::two_d;
    if (s == "mixed") return LeibnizKind::mixed;
    fail(ErrorCode::usage, "unknown Leibniz rule kind '" + s + "' (1d, 2d, mixed)");
}

Admissibility leibniz_admissible(const LeibnizExponents& e) { return check(e, true); }
Admissibility leibniz_holder_only(const LeibnizExponents& e) { return check(e, false); }

Signal2D derivative_axis(const Signal2D& f, double a, int axis) {
    if (a > 0.0) return fractional_derivative(f, a, axis);
    if (a < 0.0) fail(ErrorCode::domain, "derivative order must be >= 0");
    return apply_symbol_axis(f, axis, [](long long xi) { return xi == 0 ? 0.0 : 1.0; });
}

double leibniz_ratio_1d(const Signal1D& f, const Signal1D& g, const LeibnizExponents& e, bool probe) {
    require(e, LeibnizKind::one_d, probe);
    require_same_grid(f.grid, g.grid, "leibniz_ratio_1d");
    const double a = boost::rational_cast<double>(e.alpha);
    const auto df = fractional_derivative(f, a), dg = fractional_derivative(g, a);
    const double lhs = lp_norm(fractional_derivative(times(f, g), a), to_p(e.inv[0]));
    const double rhs = lp_norm(df, to_p(e.inv[1])) * lp_norm(g, to_p(e.inv[2])) + lp_norm(f, to_p(e.inv[3])) * lp_norm(dg, to_p(e.inv[4]));
    return ratio(lhs, rhs);
}

double leibniz_ratio_2d(const Signal2D& f, const Signal2D& g, const LeibnizExponents& e, bool probe) {
    require(e, LeibnizKind::two_d, probe);
    require_same_grid(f.grid, g.grid, "leibniz_ratio_2d");
    const double a = boost::rational_cast<double>(e.alpha), b = boost::rational_cast<double>(e.beta);
    auto n = [&](const Signal2D& h, std::size_t i) { return lp_norm(h, to_p(e.inv[i])); };
    const double lhs = n(dxy(times(f, g), a, b), 0);
    const double rhs = n(dxy(f, a, b), 1) * n(g, 2) + n(f, 3) * n(dxy(g, a, b), 4) +
                       n(derivative_axis(f, a, 0), 5) * n(derivative_axis(g, b, 1), 6) +
                       n(derivative_axis(f, b, 1), 7) * n(derivative_axis(g, a, 0), 8);
    return ratio(lhs, rhs);
}

double leibniz_ratio_mixed(const Signal2D& f, const Signal2D& g, const LeibnizExponents& e, bool probe) {
    require(e, LeibnizKind::mixed, probe);
    require_same_grid(f.grid, g.grid, "leibniz_ratio_mixed");
    const double a = boost::rational_cast<double>(e.alpha), b = boost::rational_cast<double>(e.beta);
    auto n = [&](const Signal2D& h, std::size_t i) { return mixed_norm(h, to_p(e.inv[i]), to_p(e.inv[i + 1])); };
    const double lhs = n(dxy(times(f, g), a, b), 0);
    const double rhs = n(dxy(f, a, b), 2) * n(g, 4) + n(f, 6) * n(dxy(g, a, b), 8) +
                       n(derivative_axis(f, a, 0), 10) * n(derivative_axis(g, b, 1), 12) +
                       n(derivative_axis(f, b, 1), 14) * n(derivative_axis(g, a, 0), 16);
    return ratio(lhs, rhs);
}

namespace {

Signal1D band_signal(const GridSpec& g, std::mt19937_64& rng) {
    const int n = g.size();
    std::normal_distribution<double> d;
    Signal1D fh(g);
    for (int k = 0; k < n; ++k)
        if (std::abs(freq_rep(k, n)) <= n / 4) fh[k] = cplx(d(rng), d(rng));
    return idft(fh);
}

Signal2D band_signal2(const GridSpec& g, std::mt19937_64& rng) {
    const int n = g.size();
    std::normal_distribution<double> d;
    Signal2D fh(g);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (std::abs(freq_rep(x, n)) <= n / 4 && std::abs(freq_rep(y, n)) <= n / 4) fh.at(x, y) = cplx(d(rng), d(rng));
    return idft(fh);
}

}  // namespace

LeibnizScan leibniz_scan(const LeibnizExponents& e, int log_n, int trials, std::uint64_t seed, bool probe) {
    if (trials < 1) fail(ErrorCode::domain, "trials must be >= 1");
    const auto a = probe ? leibniz_holder_only(e) : leibniz_admissible(e);
    if (!a.ok) fail(ErrorCode::domain, "inadmissible exponents: " + a.violated);
    const bool two = e.kind != LeibnizKind::one_d;
    const GridSpec g = GridSpec::make(log_n, two ? 2 : 1);
    std::vector<double> r(static_cast<std::size_t>(trials));
    parallel_for(r.size(), [&](std::size_t t) {
        std::mt19937_64 rng(mix_seed(seed, t));
        if (!two) {
            const GridSpec g1 = GridSpec::make(log_n);
            const auto f = band_signal(g1, rng);
            const auto h = band_signal(g1, rng);
            r[t] = leibniz_ratio_1d(f, h, e, probe);
        } else {
            const auto f = band_signal2(g, rng);
            const auto h = band_signal2(g, rng);
            r[t] = e.kind == LeibnizKind::two_d ? leibniz_ratio_2d(f, h, e, probe) : leibniz_ratio_mixed(f, h, e, probe);
        }
    });
    LeibnizScan out;
    out.trials = trials;
    out.n = g.size();
    for (double v : r) out.max_ratio = std::max(out.max_ratio, v);
    return out;
}

// ---- paraproduct reconstruction ----

double outer_symbol(double alpha, OuterShape shape, int log_period, long long zeta) {
    const double z = static_cast<double>(zeta);
    const double mag = zeta == 0 ? 0.0 : std::pow(std::abs(z), alpha);
    if (shape == OuterShape::ball) return mag * lp_bump(z / std::ldexp(1.0, log_period - 1));
    const double t = z / std::ldexp(1.0, log_period - 3);
    return mag * Window{0.53125}(t / 4.0) * (1.0 - Window{0.5}(t / 0.375));
}

std::vector<double> shift_coefficients(double alpha, OuterShape shape, int log_period) {
    if (log_period < 1 || log_period > 30) fail(ErrorCode::domain, "shift series period out of range");
    const long long p = 1LL << log_period;
    std::vector<cplx> buf(static_cast<std::size_t>(p));
    for (long long z = 0; z < p; ++z) buf[z] = outer_symbol(alpha, shape, log_period, z > p / 2 ? z - p : z);
    fft_inplace(buf, -1);
    std::vector<double> c(static_cast<std::size_t>(p));
    for (long long n = -p / 2 + 1; n <= p / 2; ++n) c[n + p / 2 - 1] = buf[(n % p + p) % p].real() / static_cast<double>(p);
    return c;
}

namespace {

struct Piece {
    Signal1D signal;
    OuterShape shape;
    int log_period;
};

bool touches_top(const Signal1D& fh) {
    const int n = fh.size();
    double peak = 0.0, top = 0.0;
    for (int k = 0; k < n; ++k) {
        const double a = std::abs(fh[k]);
        peak = std::max(peak, a);
        if (std::abs(freq_rep(k, n)) > n / 4) top = std::max(top, a);
    }
    return top > 1e-9 * peak;
}

}  // namespace

ParaDecompResidual paraproduct_decomposition_check(const Signal1D& f, const Signal1D& g, double alpha, int n_max) {
    require_same_grid(f.grid, g.grid, "paraproduct_decomposition_check");
    if (!(alpha > 0.0)) fail(ErrorCode::domain, "alpha must be positive");
    if (n_max < 0) fail(ErrorCode::domain, "n_max must be >= 0");
    if (f.grid.log_size < 3) fail(ErrorCode::resolution, "grid too small for the decomposition");
    if (touches_top(dft(f)) || touches_top(dft(g))) fail(ErrorCode::refused, "inputs reach above N/4; the product would alias");
    const int l = f.grid.log_size;
    const int n = f.size();
    // Q_{-1} is the mean, Q_j = P_{j+1} - P_j; they sum to 1 on |xi| <= N/4
    auto q_sym = [](int j) { return [j](long long xi) -> cplx { return j < 0 ? lp_p_symbol(xi, -1) : lp_q_symbol(xi, j); }; };
    std::vector<Signal1D> fq, gq;
    for (int j = -1; j <= l - 2; ++j) {
        fq.push_back(apply_symbol(f, q_sym(j)));
        gq.push_back(apply_symbol(g, q_sym(j)));
    }
    auto at = [](std::vector<Signal1D>& v, int j) -> Signal1D& { return v[static_cast<std::size_t>(j + 1)]; };
    auto low = [&](const Signal1D& h, int k) { return apply_symbol(h, [k](long long xi) -> cplx { return lp_p_symbol(xi, k); }); };

    std::vector<Piece> pieces;
    for (int k = 3; k <= l - 2; ++k) {
        pieces.push_back({times(low(f, k - 3), at(gq, k)), OuterShape::annulus, k + 3});
        pieces.push_back({times(at(fq, k), low(g, k - 3)), OuterShape::annulus, k + 3});
    }
    for (int m = -1; m <= l - 2; ++m) {
        Signal1D acc(f.grid);
        for (int j = std::max(-1, m - 3); j <= m; ++j) {
            const auto add = [&](const Signal1D& a, const Signal1D& b) {
                for (int x = 0; x < n; ++x) acc[x] += a[x] * b[x];
            };
            add(at(fq, j), at(gq, m));
            if (j != m) add(at(fq, m), at(gq, j));
        }
        pieces.push_back({acc, OuterShape::ball, m + 4});
    }

    ParaDecompResidual out;
    out.n_max = n_max;
    out.pieces = static_cast<int>(pieces.size());
    std::vector<Signal1D> hats(pieces.size());
    std::vector<double> tails(pieces.size());
    parallel_for(pieces.size(), [&](std::size_t i) {
        const auto& pc = pieces[i];
        const long long p = 1LL << pc.log_period;
        const auto c = shift_coefficients(alpha, pc.shape, pc.log_period);
        double tail = 0.0;
        for (long long nn = -p / 2 + 1; nn <= p / 2; ++nn)
            if (std::llabs(nn) > n_max) tail += std::abs(c[nn + p / 2 - 1]);
        tails[i] = tail * lp_norm(pc.signal, 2.0);
        Signal1D h = dft(pc.signal);
        const long long lim = std::min<long long>(n_max, p / 2);
        for (int k = 0; k < n; ++k) {
            if (h[k] == cplx(0.0)) continue;
            const long long z = freq_rep(k, n);
            cplx s = 0.0;
            for (long long nn = -lim; nn <= lim; ++nn) {
                if (nn == -p / 2) continue;  // same lattice point as +P/2
                const long long r = ((nn * z) % p + p) % p;
                s += c[nn + p / 2 - 1] * std::polar(1.0, 2.0 * std::acos(-1.0) * static_cast<double>(r) / static_cast<double>(p));
            }
            h[k] *= s;
        }
        hats[i] = std::move(h);
    });
    Signal1D total(f.grid);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (int k = 0; k < n; ++k) total[k] += hats[i][k];
        out.tail_bound += tails[i];
    }
    const Signal1D rebuilt = idft(total);
    const Signal1D ref = fractional_derivative(times(f, g), alpha);
    Signal1D diff(f.grid);
    for (int x = 0; x < n; ++x) diff[x] = rebuilt[x] - ref[x];
    out.residual = lp_norm(diff, 2.0);
    out.reference = lp_norm(ref, 2.0);
    return out;
}

ParaDecompResidual paraproduct_decomposition_check(const Signal2D& f, const Signal2D& g, double alpha, int axis, int n_max) {
    require_same_grid(f.grid, g.grid, "paraproduct_decomposition_check");
    if (axis != 0 && axis != 1) fail(ErrorCode::domain, "axis must be 0 or 1");
    const int n = f.size();
    const GridSpec g1 = GridSpec::make(f.grid.log_size);
    std::vector<ParaDecompResidual> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Signal1D a(g1), b(g1);
        for (int t = 0; t < n; ++t) {
            a[t] = axis == 0 ? f.at(t, i) : f.at(i, t);
            b[t] = axis == 0 ? g.at(t, i) : g.at(i, t);
        }
        rows[i] = paraproduct_decomposition_check(a, b, alpha, n_max);
    }
    ParaDecompResidual out;
    out.n_max = n_max;
    double r2 = 0.0, ref2 = 0.0, b2 = 0.0;
    for (const auto& r : rows) {
        r2 += r.residual * r.residual;
        ref2 += r.reference * r.reference;
        b2 += r.tail_bound * r.tail_bound;
        out.pieces = r.pieces;
    }
    out.residual = std::sqrt(r2 / n);
    out.reference = std::sqrt(ref2 / n);
    out.tail_bound = std::sqrt(b2 / n);
    return out;
}

}  // namespace htf
