#include <cstdio>

#include "doctest.h"
#include "htf/wavepacket.hpp"
#include "test_util.hpp"

using namespace htf;
using namespace testutil;

namespace {
Tile tile(int j, long long m, long long fm, int sh = 0) {
    return {DyadicInterval::make(j, m), DyadicInterval::make(-j, fm, sh)};
}

// direct spatial inner product
cplx direct_ip(const Signal1D& f, const Signal1D& phi) {
    cplx s = 0;
    for (int i = 0; i < f.size(); ++i) s += f[i] * std::conj(phi[i]);
    return s / static_cast<double>(f.size());
}
}  // namespace

TEST_CASE("window profile") {
    Window w;
    CHECK(w(0.0) == 1.0);
    CHECK(w(0.8) == 1.0);
    CHECK(w(-0.8) == 1.0);
    CHECK(w(1.0) == 0.0);
    CHECK(w(1.5) == 0.0);
    for (double t = 0; t < 1; t += 0.01) {
        CHECK(w(t) >= 0.0);
        CHECK(w(t) <= 1.0);
        CHECK(w(t) == w(-t));
        CHECK(w(t + 0.01) <= w(t) + 1e-15);
    }
    CHECK(lp_bump(0.5) == 1.0);
    CHECK(lp_bump(1.0) == 0.0);
}

TEST_CASE("wave packet normalization and support") {
    auto g = GridSpec::make(8);
    const int n = g.size();
    SUBCASE("low-frequency packet on the whole torus") {
        // the torus-scale tile needs a frequency interval of >= 4 bins, so use a 4-bin tile at scale 2
        auto p = make_wave_packet(tile(2, 0, 0), Window{}, g);
        CHECK(std::abs(lp_norm(p.samples(), 2) - 1.0) <= 1e-12);
    }
    SUBCASE("every canonical packet") {
        auto s = canonical_tileset(g, canonical_scales(g));
        for (const auto& t : s.tiles) {
            for (int c = 0; c < 3; ++c) {
                auto p = make_wave_packet(t.component(c), Window{}, g);
                REQUIRE(std::abs(lp_norm(p.samples(), 2) - 1.0) <= 1e-12);
                auto full = dft(p.samples());
                const double ctr = 0.5 * (t.freqs[c].left() + t.freqs[c].right());
                const double half = 0.45 * t.freqs[c].length();
                for (int k = 0; k < n; ++k) {
                    const double xi = freq_rep(k, n);
                    if (std::abs(xi - ctr) >= half) REQUIRE(p.spectrum_full()[k] == cplx(0, 0));
                }
                REQUIRE(max_abs_diff(full.samples, p.spectrum_full().samples) < 1e-9);
            }
        }
    }
    CHECK_THROWS_AS(make_wave_packet(tile(1, 0, 0), Window{}, g), Error);
    CHECK_THROWS_AS(make_wave_packet(tile(2, 0, 40), Window{}, g), Error);
}

TEST_CASE("wave packet spatial decay constant") {
    auto g = GridSpec::make(10);
    const int n = g.size();
    double worst = 0;
    for (auto t : {tile(2, 1, 3), tile(4, 7, -20, 1), tile(6, 40, 2)}) {
        auto p = make_wave_packet(t, Window{}, g).samples();
        const double len = t.space.length();
        auto chi = chi_tilde(t.space, 10, g);
        for (int i = 0; i < n; ++i) {
            const double bound = std::pow(len, -0.5) * chi[i].real();
            if (bound < 1e-4) continue;  // below this the comparison measures roundoff, not decay
            worst = std::max(worst, std::abs(p[i]) / bound);
        }
    }
    MESSAGE("packet decay constant C (M_check = 10): " << worst);
    CHECK(worst < 1e4);
}

TEST_CASE("inner products") {
    auto g = GridSpec::make(8);
    auto p = make_wave_packet(tile(3, 2, 5), Window{}, g);
    auto q = make_wave_packet(tile(3, 2, 7), Window{}, g);
    auto ps = p.samples();
    CHECK(std::abs(inner_product(ps, p) - 1.0) < 1e-12);
    CHECK(inner_product(q, p) == cplx(0, 0));
    CHECK(std::abs(inner_product(p, p) - 1.0) < 1e-12);
    CHECK(std::abs(direct_ip(q.samples(), ps)) < 1e-15);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_signal(rng, 8);
        CHECK(std::abs(inner_product(f, p) - direct_ip(f, ps)) <= 1e-12 * (1 + std::abs(direct_ip(f, ps))));
        // third-slot pairing (1/N) sum f phi
        cplx s = 0;
        for (int i = 0; i < 256; ++i) s += f[i] * ps[i];
        CHECK(std::abs(pairing_hat(dft(f), p) - s / 256.0) <= 1e-12 * (1 + std::abs(s)));
    }
    CHECK_THROWS_AS(inner_product(Signal1D(GridSpec::make(7)), p), Error);
}

TEST_CASE("fourier projections") {
    auto g = GridSpec::make(6);
    auto e5 = exp_mode(g, 5);
    CHECK(max_abs_diff(fourier_project(e5, {3, 9}, true).samples, e5.samples) < 1e-13);
    CHECK(max_abs(fourier_project(e5, {6, 9}, true).samples) < 1e-13);
    std::mt19937_64 rng(22);
    auto f = random_signal(rng, 6);
    auto p1 = fourier_project(f, {-7, 12}, true);
    CHECK(max_abs_diff(fourier_project(p1, {-7, 12}, true).samples, p1.samples) < 1e-12);
    // P_I P_J = P_{I cap J}
    auto pij = fourier_project(fourier_project(f, {-7, 12}, true), {4, 20}, true);
    CHECK(max_abs_diff(pij.samples, fourier_project(f, {4, 12}, true).samples) < 1e-12);
    auto sm = fourier_project(e5, {0, 10}, false);
    CHECK(max_abs_diff(sm.samples, e5.samples) < 1e-13);
}

TEST_CASE("Littlewood-Paley projections") {
    auto g = GridSpec::make(7);
    auto e = exp_mode(g, 3);
    auto lp = lp_projections(e, 3);  // |3| <= 2^{3-1}
    CHECK(max_abs_diff(lp.p.samples, e.samples) < 1e-13);
    CHECK(max_abs(lp.q.samples) < 1e-13);
    Signal1D c(g, std::vector<cplx>(128, 2.0));
    for (int k = 0; k < 7; ++k) {
        auto q = lp_projections(c, k);
        CHECK(max_abs(q.q.samples) < 1e-13);
        CHECK(max_abs_diff(q.p.samples, c.samples) < 1e-13);
    }
    CHECK_THROWS_AS(lp_projections(c, 7), Error);
    CHECK_THROWS_AS(lp_projections(c, -1), Error);

    std::mt19937_64 rng(23);
    for (int l = 3; l <= 10; ++l) {
        auto f = random_signal(rng, l);
        // telescoping oracle: sum of symbols is 1 on every representable frequency
        const int n = 1 << l;
        for (int k = 0; k < n; ++k) {
            double s = lp_p_symbol(freq_rep(k, n), 0);
            for (int j = 0; j < l; ++j) s += lp_q_symbol(freq_rep(k, n), j);
            REQUIRE(std::abs(s - 1.0) < 1e-14);
        }
        Signal1D acc = lp_projections(f, 0).p;
        for (int j = 0; j < l; ++j) {
            auto q = lp_projections(f, j).q;
            for (int i = 0; i < n; ++i) acc[i] += q[i];
        }
        Signal1D diff(f.grid);
        for (int i = 0; i < n; ++i) diff[i] = acc[i] - f[i];
        CHECK(lp_norm(diff, 2) <= 1e-10 * lp_norm(f, 2));
    }
}

TEST_CASE("fractional derivative") {
    auto g = GridSpec::make(6);
    auto e = exp_mode(g, -7);
    auto d = fractional_derivative(e, 0.5);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(d[i] - std::sqrt(7.0) * e[i]) < 1e-12);
    Signal1D c(g, std::vector<cplx>(64, 1.0));
    CHECK(max_abs(fractional_derivative(c, 1.3).samples) < 1e-13);
    CHECK_THROWS_AS(fractional_derivative(c, 0.0), Error);
    std::mt19937_64 rng(24);
    auto f = random_signal(rng, 8);
    auto ab = fractional_derivative(fractional_derivative(f, 0.3), 0.9);
    auto direct = fractional_derivative(f, 1.2);
    CHECK(max_abs_diff(ab.samples, direct.samples) <= 1e-10 * max_abs(direct.samples));
    // homogeneity and linearity
    auto f2 = random_signal(rng, 8);
    Signal1D comb(f.grid);
    for (int i = 0; i < 256; ++i) comb[i] = 2.0 * f[i] - cplx(0, 1) * f2[i];
    auto lhs = fractional_derivative(comb, 0.7);
    auto a = fractional_derivative(f, 0.7), b = fractional_derivative(f2, 0.7);
    for (int i = 0; i < 256; ++i) CHECK(std::abs(lhs[i] - (2.0 * a[i] - cplx(0, 1) * b[i])) < 1e-9);

    auto g2 = GridSpec::make(4, 2);
    Signal2D s(g2);
    for (int x = 0; x < 16; ++x)
        for (int y = 0; y < 16; ++y) s.at(x, y) = std::polar(1.0, 2 * M_PI * (3.0 * x + 5.0 * y) / 16);
    auto dx = fractional_derivative(s, 2.0, 0);
    auto dy = fractional_derivative(s, 1.0, 1);
    CHECK(std::abs(dx.at(2, 3) - 9.0 * s.at(2, 3)) < 1e-11);
    CHECK(std::abs(dy.at(2, 3) - 5.0 * s.at(2, 3)) < 1e-11);
}

TEST_CASE("chi tilde weight") {
    auto g = GridSpec::make(10);
    auto iv = DyadicInterval::make(3, 2);  // [1/4, 3/8)
    auto w = chi_tilde(iv, 20, g);
    CHECK(w[256].real() == 1.0);
    CHECK(w[300].real() == 1.0);
    // dist = |I| = 1/8 -> 2^{-20}
    CHECK(w[256 + 128 + 128].real() == doctest::Approx(std::pow(2.0, -20)));
    CHECK(w[256 - 128].real() == doctest::Approx(std::pow(2.0, -20)));
    for (int j = 0; j <= 6; ++j) {
        auto v = chi_tilde(DyadicInterval::make(j, 0), 20, g);
        double integral = 0;
        for (auto& z : v.samples) integral += z.real();
        integral /= 1024;
        const double c = integral / std::ldexp(1.0, -j);
        CHECK(c >= 1.0);
        CHECK(c <= 3.0);
    }
    CHECK_THROWS_AS(chi_tilde(iv, 0, g), Error);
}

TEST_CASE("shifted operators") {
    std::mt19937_64 rng(25);
    auto f = random_signal(rng, 7);
    for (int k = 0; k < 7; ++k) {
        auto a = shifted_ops(f, k, 0), b = lp_projections(f, k);
        CHECK(max_abs_diff(a.p.samples, b.p.samples) < 1e-13);
        CHECK(max_abs_diff(a.q.samples, b.q.samples) < 1e-13);
    }
    auto g = f.grid;
    auto e = exp_mode(g, 11);
    auto s = shifted_ops(e, 3, 5).q;
    auto base = lp_projections(e, 3).q;
    for (int i = 0; i < 128; ++i) CHECK(std::abs(std::abs(s[i]) - std::abs(base[i])) < 1e-12);
    // phase additivity: shifting by n1 then n2 (as multipliers) equals shifting by n1 + n2
    auto p1 = shifted_ops(f, 4, 3).p;
    auto p12 = shifted_ops(f, 4, 7).p;
    auto fh = dft(p1);
    for (int k = 0; k < 128; ++k) fh[k] *= std::polar(1.0, 2 * M_PI * 4.0 * freq_rep(k, 128) / 16.0);
    CHECK(max_abs_diff(idft(fh).samples, p12.samples) < 1e-12);
    CHECK_THROWS_AS(shifted_ops(f, 3, 1000), Error);
}
