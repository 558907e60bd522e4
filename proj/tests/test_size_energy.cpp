#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "htf/size_energy.hpp"
#include "test_util.hpp"

using namespace htf;

namespace {

const GridSpec g256 = GridSpec::make(8);

TileSet family256() {
    static const TileSet s = certify(canonical_tileset(g256, canonical_scales(g256)));
    return s;
}

TileSet random_subset(const TileSet& s, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    TileSet out;
    for (auto i : idx) out.tiles.push_back(s.tiles[i]);
    return certify(out);
}

// independent floating-point reading of P' <= P
bool le_oracle(const Tile& a, const Tile& b) {
    if (a.space == b.space && a.freq == b.freq) return true;
    const bool inside = a.space.left() >= b.space.left() && a.space.right() <= b.space.right() &&
                        a.space.length() < b.space.length();
    // the larger tile's frequency interval sits inside three times the smaller one's
    const double c = 0.5 * (a.freq.left() + a.freq.right());
    const double h = 1.5 * a.freq.length();
    return inside && b.freq.left() >= c - h && b.freq.right() <= c + h;
}

double size_oracle(const CoeffMap& c) {
    double best = 0.0;
    const auto& t = c.tileset.tiles;
    for (std::size_t top = 0; top < t.size(); ++top)
        for (int i = 0; i < 3; ++i) {
            if (i == c.component) continue;
            double m = 0.0;
            for (std::size_t p = 0; p < t.size(); ++p)
                if (le_oracle(t[p].component(i), t[top].component(i))) m += std::norm(c.values[p]);
            best = std::max(best, std::sqrt(m / t[top].space.length()));
        }
    return best;
}

double chi_avg_oracle(const Signal1D& f, const DyadicInterval& iv, int mexp) {
    const int n = f.size();
    double s = 0.0;
    for (int x = 0; x < n; ++x) {
        const double u = static_cast<double>(x) / n;
        double d = 0.0;
        if (!(u >= iv.left() && u < iv.right()) && !(u + 1 >= iv.left() && u + 1 < iv.right())) {
            auto circ = [](double a, double b) {
                double e = std::fmod(std::abs(a - b), 1.0);
                return std::min(e, 1.0 - e);
            };
            d = std::min(circ(u, iv.left()), circ(u, iv.right()));
        }
        s += std::abs(f[x]) * std::pow(1.0 + d / iv.length(), -mexp);
    }
    return s / n / iv.length();
}

}  // namespace

TEST_CASE("size: trivial cases") {
    TileSet s;
    s.tiles.push_back(family256().tiles[0]);
    CoeffMap c{s, 0, {cplx(3, 4)}};
    CHECK(size(c).value == doctest::Approx(5.0 / std::sqrt(s.tiles[0].space.length())).epsilon(1e-14));
    c.values[0] = 0;
    CHECK(size(c).value == 0.0);
    CoeffMap empty{TileSet{}, 0, {}};
    CHECK(size(empty).value == 0.0);
    CHECK_FALSE(size(empty).has_witness);
}

TEST_CASE("size: exhaustive oracle on random 30-tile families") {
    std::mt19937_64 rng(11);
    for (int run = 0; run < 10; ++run) {
        const TileSet s = random_subset(family256(), 30, rng);
        const auto f = testutil::random_signal(rng, 8);
        for (int j = 0; j < 3; ++j) {
            const CoeffMap c = coefficients(f, s, j);
            const auto rep = size(c);
            CHECK(rep.value == doctest::Approx(size_oracle(c)).epsilon(1e-12));
            REQUIRE(rep.has_witness);
            CHECK(tree_size_value(c, rep.witness) == doctest::Approx(rep.value).epsilon(1e-12));
            CHECK(size(c, true).value <= rep.value * (1 + 1e-12));
        }
    }
}

TEST_CASE("simple_size: constant mass and loop oracle") {
    Signal1D one(g256, std::vector<cplx>(256, 1.0));
    const double v = simple_size(one, family256());
    CHECK(v >= 1.0);
    CHECK(v <= 3.0);
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.2);
    for (int run = 0; run < 5; ++run) {
        Signal1D f(g256);
        for (auto& z : f.samples) z = coin(rng) ? 1.0 : 0.0;
        double best = 0.0;
        for (const auto& t : family256().tiles) best = std::max(best, chi_avg_oracle(f, t.space, kDefaultChiExp));
        CHECK(simple_size(f, family256()) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("simple_size: far support decays with the weight exponent") {
    TileSet s;
    s.tiles.push_back(family256().tiles.front());
    const auto iv = s.tiles[0].space;
    Signal1D f(g256);
    const int x = static_cast<int>((iv.right() + 4 * iv.length()) * 256) % 256;
    f[x] = 1.0;
    const double d = scaled_distance(static_cast<double>(x) / 256, iv);
    CHECK(simple_size(f, s) == doctest::Approx(std::pow(1 + d, -kDefaultChiExp) / 256 / iv.length()).epsilon(1e-12));
}

TEST_CASE("modified_size dominates the averaged size on P(I0)") {
    std::mt19937_64 rng(9);
    const auto i0 = DyadicInterval::make(2, 1);
    const TileSet r = restrict_to(family256(), i0);
    REQUIRE_FALSE(r.empty());
    for (int run = 0; run < 10; ++run) {
        const auto f = testutil::random_signal(rng, 8);
        const auto m = modified_size(f, family256(), i0);
        CHECK(m.value >= simple_size(f, r) * (1 - 1e-12));
        CHECK(chi_average(f, m.witness, kDefaultChiExp) == doctest::Approx(m.value).epsilon(1e-12));
    }
    Signal1D one(g256, std::vector<cplx>(256, 1.0));
    const auto torus = DyadicInterval::make(0, 0);
    CHECK(modified_size(one, family256(), torus).value == doctest::Approx(simple_size(one, family256())).epsilon(1e-12));
    // f supported away from 3 I0
    Signal1D far(g256);
    for (int x = 0; x < 256; ++x)
        if (scaled_distance(x / 256.0, i0) > 1.0) far[x] = 1.0;
    CHECK(modified_size(far, family256(), i0).value < simple_size(far, family256()));
    CHECK_THROWS_AS(modified_size(far, TileSet{}, i0), Error);
}

TEST_CASE("energy: single tile and zero") {
    TileSet s;
    s.tiles.push_back(family256().tiles[5]);
    const double len = s.tiles[0].space.length();
    for (double a : {0.3, 1.0, 7.5}) {
        CoeffMap c{s, 1, {cplx(a, 0)}};
        const auto e = energy(c);
        CHECK(e.value <= a * (1 + 1e-12));
        CHECK(e.value > a / 2);
        CHECK(std::ldexp(1.0, e.level) * std::sqrt(len) <= a);
    }
    CoeffMap z{s, 1, {cplx(0, 0)}};
    CHECK(energy(z).value == 0.0);
}

TEST_CASE("energy: chains are strongly disjoint and bounded by the L2 norm") {
    std::mt19937_64 rng(21);
    double worst = 0.0;
    const TileSet s = family256();
    const auto bank = make_packets(s, Window{}, g256);
    for (int run = 0; run < 12; ++run) {
        const auto f = testutil::random_signal(rng, 8);
        const int j = run % 3;
        const CoeffMap c = coefficients(f, s, bank, j);
        for (auto& [n, chain] : energy_chains(c)) {
            if (chain.empty()) continue;
            // each tree is an i-tree with i != j; the disjointness conditions only involve component j
            CHECK(strongly_disjoint_check(s, chain, j));
        }
        worst = std::max(worst, energy(c).value / lp_norm(f, 2));
    }
    MESSAGE("energy / ||f||_2 worst ratio " << worst);
    CHECK(worst < 10.0);
}

TEST_CASE("energy: dyadic scaling is exact") {
    std::mt19937_64 rng(3);
    const auto f = testutil::random_signal(rng, 8);
    const TileSet s = random_subset(family256(), 60, rng);
    CoeffMap c = coefficients(f, s, 0);
    const double e = energy(c).value;
    for (auto& v : c.values) v *= 4.0;
    CHECK(energy(c).value == doctest::Approx(4.0 * e).epsilon(1e-12));
    CoeffMap c2 = coefficients(f, s, 0);
    for (auto& v : c2.values) v *= 3.0;
    const double sz = size(coefficients(f, s, 0)).value;
    CHECK(size(c2).value == doctest::Approx(3.0 * sz).epsilon(1e-12));
}

TEST_CASE("localized energy: shell precondition and decay table") {
    const GridSpec g = GridSpec::make(9);
    const TileSet s = certify(canonical_tileset(g, canonical_scales(g)));
    const auto i0 = DyadicInterval::make(5, 3);
    std::mt19937_64 rng(17);
    const auto gsig = testutil::random_signal(rng, 9);
    CHECK_THROWS_AS(localized_energy(gsig, s, i0, 1, 0), Error);
    CHECK(localized_energy(Signal1D(g), s, i0, 2, 0) == 0.0);
    const auto rows = localized_energy_decay(gsig, s, i0, 0, 3);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) MESSAGE("k=" << r.k << " energy=" << r.energy << " l2=" << r.l2);
    CHECK(rows[0].energy > 0.0);
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(rows[k].energy / rows[k].l2 < rows[k - 1].energy / rows[k - 1].l2);
}

TEST_CASE("paraproduct size and energy") {
    const auto iv = DyadicInterval::make(3, 2);
    std::mt19937_64 rng(2);
    const auto f = testutil::random_signal(rng, 8);
    const auto c = para_coefficients(f, {iv}, false);
    CHECK(paraproduct_size(f, {iv}, false).value == doctest::Approx(std::abs(c[0]) / std::sqrt(iv.length())).epsilon(1e-14));

    std::vector<DyadicInterval> all;
    for (int j = 0; j <= 5; ++j)
        for (int m = 0; m < (1 << j); ++m) all.push_back(DyadicInterval::make(j, m));
    Signal1D one(g256, std::vector<cplx>(256, 1.0));
    CHECK(paraproduct_size(one, all, true).value <= 1e-8);

    // non-lacunary packet has nonzero mean: constant input is detected at every scale
    CHECK(paraproduct_size(one, all, false).value > 0.5);

    double worst = 0.0;
    std::bernoulli_distribution coin(0.1);
    for (int run = 0; run < 10; ++run) {
        Signal1D h(g256);
        for (auto& z : h.samples) z = coin(rng) ? 1.0 : 0.0;
        if (lp_norm(h, 1) == 0.0) continue;
        for (bool lac : {false, true}) worst = std::max(worst, paraproduct_energy(h, all, lac) / lp_norm(h, 1));
    }
    MESSAGE("paraproduct energy / ||f||_1 worst ratio " << worst);
    CHECK(worst < 20.0);
}

TEST_CASE("weak L1 quasinorm is exact on level sets") {
    // values 4,2,1,1 on 4 samples: max(4*1/4, 2*2/4, 1*4/4) = 1
    CHECK(weak_l1({1, 4, 1, 2}) == doctest::Approx(1.0));
    CHECK(weak_l1({0, 0, 8, 0}) == doctest::Approx(2.0));
    CHECK(weak_l1({}) == 0.0);
}

TEST_CASE("maximal functions") {
    Signal1D c(g256, std::vector<cplx>(256, 2.5));
    const auto m = maximal_function(c);
    for (auto z : m.samples) CHECK(z.real() == doctest::Approx(2.5));

    Signal1D d(g256);
    d[37] = 1.0;
    const auto md = maximal_function(d);
    for (int x = 0; x < 256; ++x) {
        // smallest dyadic block containing both x and 37
        int block = 1;
        while (x / block != 37 / block) block *= 2;
        CHECK(md[x].real() == doctest::Approx(1.0 / block));
    }

    std::mt19937_64 rng(4);
    std::bernoulli_distribution coin(0.05);
    double worst = 0.0;
    for (int run = 0; run < 50; ++run) {
        Signal1D f(g256);
        for (auto& z : f.samples) z = coin(rng) ? 1.0 : 0.0;
        worst = std::max(worst, weak11_ratio(f));
    }
    MESSAGE("weak (1,1) constant " << worst);
    CHECK(worst <= 4.0);

    const auto sm = shifted_maximal(c, 3);
    for (auto z : sm.samples) CHECK(z.real() == doctest::Approx(2.5));
}
