#include "htf/vector_valued.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "htf/operators.hpp"

namespace htf {

namespace {

const Rational kZero(0), kOne(1), kHalf(1, 2), kThreeHalves(3, 2);

void check_plane(const Rational& a, const Rational& b, const Rational& c, const char* what) {
    if (a + b + c != kOne) fail(ErrorCode::domain, std::string(what) + ": coordinates must sum to 1");
}

}  // namespace

RangePoint RangePoint::make(Rational inv_p, Rational inv_q) { return {inv_p, inv_q, kOne - inv_p - inv_q}; }

RangePoint RangePoint::make(Rational inv_p, Rational inv_q, Rational inv_sprime) {
    check_plane(inv_p, inv_q, inv_sprime, "range point");
    return {inv_p, inv_q, inv_sprime};
}

TupleR TupleR::make(Rational inv_r1, Rational inv_r2) { return make(inv_r1, inv_r2, kOne - inv_r1 - inv_r2); }

TupleR TupleR::make(Rational inv_r1, Rational inv_r2, Rational inv_rprime) {
    check_plane(inv_r1, inv_r2, inv_rprime, "exponent tuple");
    if (inv_r1 < kZero || inv_r1 >= kOne || inv_r2 < kZero || inv_r2 >= kOne)
        fail(ErrorCode::domain, "exponent tuple: need 1 < r1, r2 <= infinity");
    if (inv_rprime < kZero || inv_rprime > kOne) fail(ErrorCode::domain, "exponent tuple: need 1 <= r < infinity");
    if (inv_r1 + inv_r2 == kZero) fail(ErrorCode::domain, "exponent tuple: r must be finite");
    return {inv_r1, inv_r2, inv_rprime};
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    auto bad = [&]() -> Rational { fail(ErrorCode::usage, "not a rational number: '" + text + "'"); };
    if (s.empty()) return bad();
    try {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            std::size_t used = 0;
            const long long num = std::stoll(s.substr(0, slash), &used);
            if (used != slash) return bad();
            const std::string den_s = s.substr(slash + 1);
            const long long den = std::stoll(den_s, &used);
            if (used != den_s.size() || den == 0) return bad();
            return Rational(num, den);
        }
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '-' || s[0] == '+') {
            neg = s[0] == '-';
            i = 1;
        }
        long long num = 0, den = 1;
        bool digits = false, dot = false;
        for (; i < s.size(); ++i) {
            if (s[i] == '.' && !dot) {
                dot = true;
                continue;
            }
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return bad();
            digits = true;
            if (num > 100000000000000LL || den > 100000000000000LL) return bad();
            num = num * 10 + (s[i] - '0');
            if (dot) den *= 10;
        }
        if (!digits) return bad();
        return Rational(neg ? -num : num, den);
    } catch (const std::logic_error&) {
        return bad();
    }
}

std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool range_bht(const RangePoint& pt) {
    check_plane(pt.inv_p, pt.inv_q, pt.inv_sprime, "range point");
    const Rational s = pt.inv_p + pt.inv_q;
    return pt.inv_p >= kZero && pt.inv_p < kOne && pt.inv_q >= kZero && pt.inv_q < kOne && s < kThreeHalves && s > kZero;
}

RangeAnswer range_D_answer(const TupleR& r, const RangePoint& pt) {
    const int big = (r.inv_r1 > kHalf) + (r.inv_r2 > kHalf) + (r.inv_rprime > kHalf);
    if (big > 1) return RangeAnswer::uncovered;
    bool in = range_bht(pt);
    if (r.inv_r1 > kHalf) {
        in = in && pt.inv_q < kThreeHalves - r.inv_r1;
    } else if (r.inv_r2 > kHalf) {
        in = in && pt.inv_p < kThreeHalves - r.inv_r2;
    } else if (r.inv_rprime > kHalf) {
        const Rational bound = kHalf + r.inv_r();
        in = in && pt.inv_p < bound && pt.inv_q < bound && -r.inv_r() < pt.inv_sprime && pt.inv_sprime < kOne;
    }
    return in ? RangeAnswer::inside : RangeAnswer::outside;
}

bool range_D(const TupleR& r, const RangePoint& pt) {
    const auto a = range_D_answer(r, pt);
    if (a == RangeAnswer::uncovered) fail(ErrorCode::domain, "exponent tuple outside theorem coverage");
    return a == RangeAnswer::inside;
}

IteratedRange range_D_iterated(const std::vector<TupleR>& rs) {
    if (rs.empty()) fail(ErrorCode::domain, "iterated range needs at least one tuple");
    IteratedRange out;
    for (std::size_t j = 0; j + 1 < rs.size(); ++j) {
        if (!range_D(rs[j + 1], rs[j].as_point())) {
            out.failing_link = static_cast<int>(j);
            return out;
        }
    }
    out.admissible = true;
    out.governing = rs[0];
    return out;
}

RangeAnswer range_Tr_answer(const Rational& inv_r, const RangePoint& pt) {
    if (inv_r < kZero || inv_r > kOne) fail(ErrorCode::domain, "T_r needs r >= 1");
    check_plane(pt.inv_p, pt.inv_q, pt.inv_sprime, "range point");
    if (inv_r <= kHalf) return range_bht(pt) ? RangeAnswer::inside : RangeAnswer::outside;
    const Rational bound = kHalf + inv_r;
    const Rational inv_rprime = kOne - inv_r;
    const bool in = pt.inv_p >= kZero && pt.inv_q >= kZero && pt.inv_p < bound && pt.inv_q < bound &&
                    -inv_rprime < pt.inv_sprime && pt.inv_sprime < kOne;
    return in ? RangeAnswer::inside : RangeAnswer::outside;
}

bool range_Tr(const Rational& inv_r, const RangePoint& pt) { return range_Tr_answer(inv_r, pt) == RangeAnswer::inside; }

SignalFamily vv_members(const BilinearOp& op, const SignalFamily& f, const SignalFamily& g) {
    if (f.nested() != g.nested()) fail(ErrorCode::domain, "families have different nesting");
    SignalFamily out;
    if (f.nested()) {
        if (f.children.size() != g.children.size()) fail(ErrorCode::domain, "family length mismatch");
        for (std::size_t i = 0; i < f.children.size(); ++i) out.children.push_back(vv_members(op, f.children[i], g.children[i]));
        return out;
    }
    if (f.members.size() != g.members.size()) fail(ErrorCode::domain, "family length mismatch");
    if (f.members.empty()) fail(ErrorCode::domain, "empty family");
    out.members.resize(f.members.size());
    parallel_for(f.members.size(), [&](std::size_t i) { out.members[i] = op(f.members[i], g.members[i]); });
    return out;
}

Signal1D vv_apply(const BilinearOp& op, const SignalFamily& f, const SignalFamily& g, const std::vector<double>& rs) {
    return lr_family_norm(vv_members(op, f, g), rs);
}

void IntervalFamily::validate() const {
    if (intervals.empty()) fail(ErrorCode::domain, "interval family is empty");
    auto iv = intervals;
    for (const auto& i : iv)
        if (i.a > i.b) fail(ErrorCode::domain, "interval with a > b");
    std::sort(iv.begin(), iv.end(), [](const FreqInterval& x, const FreqInterval& y) { return x.a < y.a; });
    for (std::size_t i = 1; i < iv.size(); ++i)
        if (iv[i].a <= iv[i - 1].b) fail(ErrorCode::domain, "overlapping intervals");
}

namespace {

Signal1D lnu_combine(const std::vector<Signal1D>& parts, double nu, const GridSpec& grid) {
    if (!(nu > 0.0)) fail(ErrorCode::domain, "exponent must be positive");
    const int n = grid.size();
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    for (const auto& p : parts)
        for (int x = 0; x < n; ++x) {
            const double v = std::abs(p[x]);
            if (nu == kInf) acc[x] = std::max(acc[x], v);
            else acc[x] += std::pow(v, nu);
        }
    Signal1D out(grid);
    for (int x = 0; x < n; ++x) out[x] = nu == kInf ? acc[x] : std::pow(acc[x], 1.0 / nu);
    return out;
}

}  // namespace

Signal1D rf_operator(const Signal1D& f, const IntervalFamily& ks, double nu) {
    ks.validate();
    std::vector<Signal1D> parts(ks.intervals.size());
    parallel_for(parts.size(), [&](std::size_t i) { parts[i] = fourier_project(f, ks.intervals[i], true); });
    return lnu_combine(parts, nu, f.grid);
}

Signal1D t_r(const Signal1D& f, const Signal1D& g, const IntervalFamily& ks, double r) {
    require_same_grid(f.grid, g.grid, "t_r");
    ks.validate();
    std::vector<Signal1D> parts(ks.intervals.size());
    parallel_for(parts.size(), [&](std::size_t i) {
        parts[i] = bht_direct(fourier_project(f, ks.intervals[i], true), fourier_project(g, ks.intervals[i], true));
    });
    return lnu_combine(parts, r, f.grid);
}

Signal1D t_r_reference(const Signal1D& f, const Signal1D& g, const IntervalFamily& ks, double r) {
    require_same_grid(f.grid, g.grid, "t_r");
    ks.validate();
    const int n = f.size();
    const Signal1D fh = dft(f), gh = dft(g);
    std::vector<Signal1D> parts;
    for (const auto& iv : ks.intervals) {
        Signal1D oh(f.grid);
        const long long lo = std::max<long long>(iv.a, -n / 2 + 1), hi = std::min<long long>(iv.b, n / 2);
        for (long long x1 = lo; x1 <= hi; ++x1)
            for (long long x2 = x1 + 1; x2 <= hi; ++x2)
                oh[freq_bin(x1 + x2, n)] += fh[freq_bin(x1, n)] * gh[freq_bin(x2, n)];
        for (auto& z : oh.samples) z /= n;
        parts.push_back(idft(oh));
    }
    return lnu_combine(parts, r, f.grid);
}

// ---- filtration ----

Filtration filtration_phi(const Signal1D& g, double p) {
    if (!(p > 0.0) || p == kInf) fail(ErrorCode::domain, "filtration exponent must be finite and positive");
    const int n = g.size();
    Filtration fl;
    fl.cum.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int x = 0; x < n; ++x) fl.cum[x + 1] = fl.cum[x] + std::pow(std::abs(g[x]), p) / n;
    if (fl.cum[n] == 0.0) fail(ErrorCode::domain, "filtration of the zero function");
    if (std::abs(fl.cum[n] - 1.0) > 1e-9) fail(ErrorCode::precondition, "filtration needs ||g||_p = 1");
    fl.phi.resize(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) fl.phi[x] = 0.5 * (fl.cum[x] + fl.cum[x + 1]);
    return fl;
}

IndexRange Filtration::preimage(const DyadicOmega& w) const {
    const double l = w.left(), r = w.right();
    IndexRange out;
    out.lo = static_cast<int>(std::lower_bound(phi.begin(), phi.end(), l) - phi.begin());
    // intervals touching 1 keep the endpoint
    out.hi = r >= 1.0 ? static_cast<int>(phi.size()) : static_cast<int>(std::lower_bound(phi.begin(), phi.end(), r) - phi.begin());
    return out;
}

std::optional<DyadicOmega> Filtration::separate(int x2, int x3) const {
    const double a = phi.at(static_cast<std::size_t>(x2)), b = phi.at(static_cast<std::size_t>(x3));
    if (!(a < b)) return std::nullopt;
    DyadicOmega w;
    for (int guard = 0; guard < 1100; ++guard) {
        const double mid = std::ldexp(static_cast<double>(2 * w.m + 1), -(w.k + 1));
        if (a < mid && b >= mid) return w;
        w = b < mid ? w.left_half() : w.right_half();
    }
    return std::nullopt;
}

std::vector<DyadicOmega> Filtration::splitting_omegas() const {
    std::vector<DyadicOmega> out;
    std::vector<DyadicOmega> stack{DyadicOmega{}};
    while (!stack.empty()) {
        const DyadicOmega w = stack.back();
        stack.pop_back();
        const IndexRange r = preimage(w);
        if (r.hi - r.lo < 2 || phi[r.lo] == phi[r.hi - 1] || w.k > 1100) continue;
        if (!preimage(w.left_half()).empty() && !preimage(w.right_half()).empty()) out.push_back(w);
        stack.push_back(w.right_half());
        stack.push_back(w.left_half());
    }
    return out;
}

// ---- hybrid operator and its split ----

namespace {

struct Hybrid {
    std::vector<cplx> a, b, c;
    int n = 0;
};

Hybrid hybrid_inputs(const Signal1D& f1, const Signal1D& f2, const Signal1D& g) {
    require_same_grid(f1.grid, f2.grid, "hybrid operator");
    require_same_grid(f1.grid, g.grid, "hybrid operator");
    Hybrid h;
    h.n = f1.size();
    const Signal1D a = dft(f1), b = dft(f2);
    h.a = a.samples;
    h.b = b.samples;
    for (auto& z : h.a) z /= h.n;
    for (auto& z : h.b) z /= h.n;
    h.c = g.samples;
    return h;
}

// sum_s t[s] e^{2 pi i xi s / N}
Signal1D synthesize(std::vector<cplx> t, const GridSpec& grid) {
    fft_inplace(t, 1);
    return Signal1D(grid, std::move(t));
}

Filtration normalized_filtration(const Signal1D& g, double p) {
    const double norm = lp_norm(g, p);
    if (norm == 0.0) fail(ErrorCode::domain, "filtration of the zero function");
    Signal1D gn = g;
    for (auto& z : gn.samples) z /= norm;
    return filtration_phi(gn, p);
}

void check_cap(int n) {
    if (n > kTripleSumCap) fail(ErrorCode::refused, "brute-force triple sum is capped at N = 64");
}

}  // namespace

Signal1D m_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g) {
    check_cap(f1.size());
    const Hybrid h = hybrid_inputs(f1, f2, g);
    const int n = h.n;
    std::vector<cplx> t(static_cast<std::size_t>(n));
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = x1 + 1; x2 < n; ++x2) {
            const cplx ab = h.a[x1] * h.b[x2];
            for (int x3 = x2 + 1; x3 < n; ++x3) t[(x1 + x2 + x3) % n] += ab * h.c[x3];
        }
    return synthesize(std::move(t), f1.grid);
}

Signal1D m1_region(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p) {
    check_cap(f1.size());
    const Hybrid h = hybrid_inputs(f1, f2, g);
    const Filtration fl = normalized_filtration(g, p);
    const int n = h.n;
    std::vector<cplx> t(static_cast<std::size_t>(n));
    for (int x2 = 0; x2 < n; ++x2)
        for (int x3 = x2 + 1; x3 < n; ++x3) {
            const auto w = fl.separate(x2, x3);
            if (!w) continue;
            const int lo = fl.preimage(w->left_half()).lo;
            for (int x1 = std::max(lo, 0); x1 < x2; ++x1) t[(x1 + x2 + x3) % n] += h.a[x1] * h.b[x2] * h.c[x3];
        }
    return synthesize(std::move(t), f1.grid);
}

Signal1D m1_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p) {
    const Hybrid h = hybrid_inputs(f1, f2, g);
    const Filtration fl = normalized_filtration(g, p);
    const int n = h.n;
    const auto omegas = fl.splitting_omegas();
    std::vector<std::vector<cplx>> terms(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t i) {
        const IndexRange l = fl.preimage(omegas[i].left_half()), r = fl.preimage(omegas[i].right_half());
        // BHT-type piece on the left preimage: x1 < x2 both in it
        std::vector<cplx> pairs(static_cast<std::size_t>(n)), right(static_cast<std::size_t>(n));
        for (int x1 = l.lo; x1 < l.hi; ++x1)
            for (int x2 = x1 + 1; x2 < l.hi; ++x2) pairs[(x1 + x2) % n] += h.a[x1] * h.b[x2];
        for (int x3 = r.lo; x3 < r.hi; ++x3) right[x3] += h.c[x3];
        fft_inplace(pairs, 1);
        fft_inplace(right, 1);
        for (int k = 0; k < n; ++k) pairs[k] *= right[k];
        terms[i] = std::move(pairs);
    });
    Signal1D out(f1.grid);
    for (const auto& t : terms)
        for (int k = 0; k < n; ++k) out[k] += t[k];
    return out;
}

Signal1D m2_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p) {
    const Hybrid h = hybrid_inputs(f1, f2, g);
    const Filtration fl = normalized_filtration(g, p);
    const int n = h.n;
    const auto omegas = fl.splitting_omegas();
    std::vector<std::vector<cplx>> terms(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t i) {
        const IndexRange l = fl.preimage(omegas[i].left_half()), r = fl.preimage(omegas[i].right_half());
        std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
        for (int x1 = 0; x1 < l.lo; ++x1) a[x1] = h.a[x1];
        for (int x2 = l.lo; x2 < l.hi; ++x2) b[x2] = h.b[x2];
        for (int x3 = r.lo; x3 < r.hi; ++x3) c[x3] = h.c[x3];
        fft_inplace(a, 1);
        fft_inplace(b, 1);
        fft_inplace(c, 1);
        for (int k = 0; k < n; ++k) a[k] *= b[k] * c[k];
        terms[i] = std::move(a);
    });
    Signal1D out(f1.grid);
    for (const auto& t : terms)
        for (int k = 0; k < n; ++k) out[k] += t[k];
    return out;
}

}  // namespace htf
