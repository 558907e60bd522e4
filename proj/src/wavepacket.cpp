#include "htf/wavepacket.hpp"

#include <cmath>
#include <numbers>

namespace htf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

void check_hat_grid(const Signal1D& fhat, const WavePacket& phi) {
    require_same_grid(fhat.grid, phi.grid, "inner_product");
}
}  // namespace

double Window::operator()(double t) const {
    const double u = std::abs(t);
    if (u <= flat_fraction) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - smooth_step((u - flat_fraction) / (1.0 - flat_fraction));
}

WavePacket make_packet_at(const Tile& t, double c, double h, double xc, const Window& w, const GridSpec& grid) {
    const int n = grid.size();
    const long long lo = static_cast<long long>(std::ceil(c - h));
    const long long hi = static_cast<long long>(std::floor(c + h));
    WavePacket p;
    p.tile = t;
    p.grid = grid;
    double mass = 0.0;
    std::vector<double> amp;
    long long first = 0;
    for (long long k = lo; k <= hi; ++k) {
        const double a = w((static_cast<double>(k) - c) / h);
        if (a <= 0.0) continue;
        if (amp.empty()) first = k;
        amp.resize(static_cast<std::size_t>(k - first + 1), 0.0);
        amp.back() = a;
        mass += a * a;
    }
    if (amp.empty()) fail(ErrorCode::resolution, "packet window contains no grid bins");
    const long long last = first + static_cast<long long>(amp.size()) - 1;
    if (first <= -n / 2 || last > n / 2) fail(ErrorCode::resolution, "packet frequency support leaves the representable band");
    const double scale = n / std::sqrt(mass);
    p.k_lo = first;
    p.spectrum.resize(amp.size());
    for (std::size_t i = 0; i < amp.size(); ++i) {
        const double k = static_cast<double>(first + static_cast<long long>(i));
        p.spectrum[i] = amp[i] * scale * std::polar(1.0, -kTwoPi * k * xc);
    }
    return p;
}

WavePacket make_wave_packet(const Tile& t, const Window& w, const GridSpec& grid) {
    if (t.freq.j > 0 || t.freq.length() < 4.0) fail(ErrorCode::resolution, "tile frequency interval spans fewer than 4 bins");
    if (t.space.j < 0) fail(ErrorCode::resolution, "tile space interval longer than the torus");
    const double c = 0.5 * (t.freq.left() + t.freq.right());
    const double h = 0.45 * t.freq.length();
    const double xc = 0.5 * (t.space.left() + t.space.right());
    return make_packet_at(t, c, h, xc, w, grid);
}

Signal1D WavePacket::spectrum_full() const {
    Signal1D out(grid);
    const int n = grid.size();
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        out.samples[freq_bin(k_lo + static_cast<long long>(i), n)] = spectrum[i];
    return out;
}

Signal1D WavePacket::samples() const { return idft(spectrum_full()); }

cplx inner_product(const Signal1D& f, const WavePacket& phi) { return inner_product_hat(dft(f), phi); }

cplx inner_product(const WavePacket& a, const WavePacket& b) {
    require_same_grid(a.grid, b.grid, "inner_product");
    const int n = a.grid.size();
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.spectrum.size(); ++i) {
        const long long k = a.k_lo + static_cast<long long>(i);
        for (std::size_t jj = 0; jj < b.spectrum.size(); ++jj)
            if (freq_bin(b.k_lo + static_cast<long long>(jj), n) == freq_bin(k, n)) s += a.spectrum[i] * std::conj(b.spectrum[jj]);
    }
    return s / (static_cast<double>(n) * n);
}

cplx inner_product_hat(const Signal1D& fhat, const WavePacket& phi) {
    check_hat_grid(fhat, phi);
    const int n = fhat.size();
    cplx s = 0.0;
    for (std::size_t i = 0; i < phi.spectrum.size(); ++i)
        s += fhat.samples[freq_bin(phi.k_lo + static_cast<long long>(i), n)] * std::conj(phi.spectrum[i]);
    return s / (static_cast<double>(n) * n);
}

cplx pairing_hat(const Signal1D& fhat, const WavePacket& phi) {
    check_hat_grid(fhat, phi);
    const int n = fhat.size();
    cplx s = 0.0;
    for (std::size_t i = 0; i < phi.spectrum.size(); ++i)
        s += fhat.samples[freq_bin(-(phi.k_lo + static_cast<long long>(i)), n)] * phi.spectrum[i];
    return s / (static_cast<double>(n) * n);
}

void accumulate_packet(Signal1D& acc_hat, const WavePacket& phi, cplx c) {
    check_hat_grid(acc_hat, phi);
    const int n = acc_hat.size();
    for (std::size_t i = 0; i < phi.spectrum.size(); ++i)
        acc_hat.samples[freq_bin(phi.k_lo + static_cast<long long>(i), n)] += c * phi.spectrum[i];
}

namespace {

template <class Symbol>
Signal1D apply_multiplier(const Signal1D& f, Symbol&& sym) {
    Signal1D fh = dft(f);
    const int n = f.size();
    for (int k = 0; k < n; ++k) fh.samples[k] *= sym(static_cast<long long>(freq_rep(k, n)));
    return idft(fh);
}

}  // namespace

Signal1D apply_symbol(const Signal1D& f, const std::function<cplx(long long)>& sym) {
    return apply_multiplier(f, sym);
}

Signal2D apply_symbol_axis(const Signal2D& f, int axis, const std::function<cplx(long long)>& sym) {
    if (axis != 0 && axis != 1) fail(ErrorCode::domain, "axis must be 0 or 1");
    Signal2D fh = dft_axis(f, axis);
    const int n = f.size();
    std::vector<cplx> m(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) m[k] = sym(freq_rep(k, n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) fh.at(x, y) *= m[axis == 0 ? x : y];
    return idft_axis(fh, axis);
}

Signal1D fourier_project(const Signal1D& f, const FreqInterval& iv, bool sharp) {
    if (sharp) return apply_multiplier(f, [&](long long xi) { return iv.contains(xi) ? 1.0 : 0.0; });
    const double c = 0.5 * static_cast<double>(iv.a + iv.b);
    const double h = 0.5 * static_cast<double>(iv.b - iv.a + 1);
    const Window w{0.8};
    return apply_multiplier(f, [&](long long xi) { return w((static_cast<double>(xi) - c) / h); });
}

double lp_bump(double t) { return Window{0.5}(t); }

double lp_p_symbol(long long xi, int k) {
    if (k < 0) return xi == 0 ? 1.0 : 0.0;
    return lp_bump(static_cast<double>(xi) / std::ldexp(1.0, k));
}

double lp_q_symbol(long long xi, int k) { return lp_p_symbol(xi, k + 1) - lp_p_symbol(xi, k); }

namespace {
void check_scale(const Signal1D& f, int k) {
    if (k < 0 || k > f.grid.log_size - 1) fail(ErrorCode::domain, "Littlewood-Paley scale out of range");
}
}  // namespace

LPPair lp_projections(const Signal1D& f, int k) {
    check_scale(f, k);
    return {apply_multiplier(f, [&](long long xi) { return lp_p_symbol(xi, k); }),
            apply_multiplier(f, [&](long long xi) { return lp_q_symbol(xi, k); })};
}

LPPair shifted_ops(const Signal1D& f, int k, long long n) {
    check_scale(f, k);
    if (std::llabs(n) > f.size()) fail(ErrorCode::domain, "shift |n| must not exceed N");
    auto phase = [&](long long xi) {
        // e^{2 pi i n xi / 2^k}, reduced exactly before the float conversion
        const long long period = 1LL << k;
        long long r = (n * xi) % period;
        return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(period));
    };
    return {apply_multiplier(f, [&](long long xi) { return lp_p_symbol(xi, k) * phase(xi); }),
            apply_multiplier(f, [&](long long xi) { return lp_q_symbol(xi, k) * phase(xi); })};
}

namespace {
void check_alpha(double alpha) {
    if (!(alpha > 0.0)) fail(ErrorCode::domain, "fractional derivative order must be positive");
}
}  // namespace

Signal1D fractional_derivative(const Signal1D& f, double alpha) {
    check_alpha(alpha);
    return apply_multiplier(f, [&](long long xi) { return xi == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(xi)), alpha); });
}

Signal2D fractional_derivative(const Signal2D& f, double alpha, int axis) {
    check_alpha(alpha);
    Signal2D fh = dft_axis(f, axis);
    const int n = f.size();
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const int xi = freq_rep(axis == 0 ? x : y, n);
            fh.at(x, y) *= xi == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(xi)), alpha);
        }
    }
    return idft_axis(fh, axis);
}

Signal1D chi_tilde(const DyadicInterval& iv, int mexp, const GridSpec& grid) {
    if (mexp < 1) fail(ErrorCode::domain, "chi_tilde exponent must be >= 1");
    const int n = grid.size();
    Signal1D out(grid);
    const double len = iv.length();
    const double l = iv.left(), r = iv.right();
    auto circ = [](double u, double v) {
        double d = std::fmod(std::abs(u - v), 1.0);
        return std::min(d, 1.0 - d);
    };
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        double dist = 0.0;
        if (len < 1.0) {
            const double xr = x - std::floor(x - l);  // representative of x in [l, l+1)
            if (xr >= r) dist = std::min(circ(x, l), circ(x, r));
        }
        out.samples[i] = std::pow(1.0 + dist / len, -static_cast<double>(mexp));
    }
    return out;
}

namespace {

int third_shift(int k) { return k % 2 == 0 ? 1 : -1; }

bool triple_fits(long long w, long long a, long long n, int sh) {
    // thirds of w are not integral, compare 3x
    const long long lo1 = 3 * w * a, hi2 = 3 * w * (a + 9), hi3 = w * (3 * (2 * a + 9) + sh), lo3 = w * (3 * (2 * a + 8) + sh);
    return lo1 >= -3 * n / 2 && hi2 <= 3 * n / 2 && hi3 <= 3 * n / 2 && lo3 >= -3 * n / 2;
}

}  // namespace

TileSet canonical_tileset(const GridSpec& grid, const std::vector<int>& scales) {
    const long long n = grid.size();
    TileSet out;
    for (int s : scales) {
        if (s < 0) fail(ErrorCode::domain, "canonical scale index must be >= 0");
        const int k = s + 2;
        const long long w = 1LL << k;
        std::vector<long long> as;
        for (long long a = -n / (2 * w); a <= n / (2 * w); ++a)
            if (triple_fits(w, a, n, third_shift(k))) as.push_back(a);
        if (as.empty()) fail(ErrorCode::resolution, "canonical scale does not fit on the grid");
        for (long long m = 0; m < w; ++m) {
            for (long long a : as) {
                TriTile t;
                t.space = DyadicInterval::make(k, m);
                t.freqs[0] = DyadicInterval::make(-k, a);
                t.freqs[1] = DyadicInterval::make(-k, a + 8);
                t.freqs[2] = DyadicInterval::make(-k, 2 * a + 8, third_shift(k));
                out.tiles.push_back(t);
            }
        }
    }
    return out;
}

std::vector<int> canonical_scales(const GridSpec& grid) {
    const long long n = grid.size();
    std::vector<int> out;
    for (int s = 0;; ++s) {
        const long long w = 4LL << s;
        if (w > n) break;
        bool any = false;
        for (long long a = -n / (2 * w); a <= n / (2 * w) && !any; ++a) any = triple_fits(w, a, n, third_shift(s + 2));
        if (!any) break;
        out.push_back(s);
    }
    return out;
}

}  // namespace htf
