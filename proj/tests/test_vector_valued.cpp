#include <cmath>
#include <random>

#include "doctest.h"
#include "htf/operators.hpp"
#include "htf/vector_valued.hpp"
#include "test_util.hpp"

using namespace htf;
using testutil::max_abs;
using testutil::max_abs_diff;

namespace {

Rational R(long long a, long long b = 1) { return Rational(a, b); }

RangePoint pt(Rational p, Rational q) { return RangePoint::make(p, q); }

double rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const double m = std::max(max_abs(a), max_abs(b));
    // unit floor: inputs are O(1), and an all-zero side would otherwise read as relative error 1
    return max_abs_diff(a, b) / std::max(m, 1.0);
}

Signal1D normalized(Signal1D g, double p) {
    const double n = lp_norm(g, p);
    for (auto& z : g.samples) z /= n;
    return g;
}

}  // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/2") == R(1, 2));
    CHECK(parse_rational(" -3/4 ") == R(-3, 4));
    CHECK(parse_rational("0.9") == R(9, 10));
    CHECK(parse_rational("-0.6") == R(-3, 5));
    CHECK(parse_rational("2") == R(2));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1/2x"), Error);
    CHECK(format_rational(R(6, 8)) == "3/4");
    CHECK(format_rational(R(-2)) == "-2");
}

TEST_CASE("range of the scalar operator") {
    CHECK(range_bht(pt(R(1, 2), R(1, 2))));
    CHECK_FALSE(range_bht(pt(R(3, 4), R(3, 4))));  // s = 2/3
    CHECK_FALSE(range_bht(pt(R(1), R(0))));
    CHECK_FALSE(range_bht(pt(R(0), R(0))));  // s = infinity
    CHECK(range_bht(pt(R(0), R(1, 100))));
    // hull vertices: (0,0,1) (1,0,0) (1,1/2,-1/2) (1/2,1,-1/2) (0,1,0) all sit on excluded faces
    CHECK_FALSE(range_bht(RangePoint::make(R(0), R(0), R(1))));
    CHECK_FALSE(range_bht(RangePoint::make(R(1), R(0), R(0))));
    CHECK_FALSE(range_bht(RangePoint::make(R(1), R(1, 2), R(-1, 2))));
    CHECK_FALSE(range_bht(RangePoint::make(R(1, 2), R(1), R(-1, 2))));
    CHECK_FALSE(range_bht(RangePoint::make(R(0), R(1), R(0))));
    CHECK_THROWS_AS(RangePoint::make(R(1, 2), R(1, 2), R(1, 2)), Error);
}

TEST_CASE("vector-valued range cases") {
    const auto r442 = TupleR::make(R(1, 4), R(1, 4));
    CHECK(range_D(r442, pt(R(1, 2), R(1, 2))));
    // case ii with 1/r1 = 2/3
    const auto c2 = TupleR::make(R(2, 3), R(1, 6));
    CHECK_FALSE(range_D(c2, pt(R(1, 10), R(5, 6))));
    CHECK(range_D(c2, pt(R(1, 10), R(4, 5))));
    // case iii mirrors it
    const auto c3 = TupleR::make(R(1, 6), R(2, 3));
    CHECK_FALSE(range_D(c3, pt(R(5, 6), R(1, 10))));
    CHECK(range_D(c3, pt(R(4, 5), R(1, 10))));
    // (3,6,2): case i
    const auto r362 = TupleR::make(R(1, 3), R(1, 6));
    CHECK_FALSE(range_D(r362, RangePoint::make(parse_rational("0.9"), parse_rational("0.7"), parse_rational("-0.6"))));
    // case iv: 1/r' = 3/4, 1/r = 1/4, bound 3/4
    const auto c4 = TupleR::make(R(1, 8), R(1, 8));
    CHECK(range_D(c4, pt(R(1, 2), R(1, 2))));
    CHECK_FALSE(range_D(c4, pt(R(3, 4), R(1, 10))));
    CHECK_FALSE(range_D(c4, pt(R(7, 10), R(11, 20))));  // 1/s' = -1/4 is not > -1/4
    CHECK(range_D(c4, pt(R(7, 10), R(27, 50))));

    // case i agrees with the scalar range on a lattice
    int checked = 0;
    for (int a = -2; a <= 12; ++a)
        for (int b = -2; b <= 12; ++b) {
            if (checked >= 200) break;
            const auto p = pt(R(a, 10), R(b, 10));
            CHECK(range_D(r442, p) == range_bht(p));
            ++checked;
        }
    CHECK(checked == 200);
    CHECK_THROWS_AS(TupleR::make(R(1), R(0)), Error);
}

TEST_CASE("iterated range") {
    const auto r221 = TupleR::make(R(1, 2), R(1, 2));
    const auto r442 = TupleR::make(R(1, 4), R(1, 4));
    auto single = range_D_iterated({r442});
    CHECK(single.admissible);
    CHECK(single.governing.inv_r1 == R(1, 4));
    // the (2,2,1) tuple read as the point (1/2, 1/2, 0) lies in D_{4,4,2}
    const auto chain = range_D_iterated({r221, r442});
    CHECK(chain.admissible);
    CHECK(chain.governing.inv_r1 == R(1, 2));
}

TEST_CASE("iterated range: admissible and failing links") {
    const auto r442 = TupleR::make(R(1, 4), R(1, 4));
    const auto r332 = TupleR::make(R(1, 3), R(1, 3));
    const auto a = range_D_iterated({r442, r332});
    CHECK(a.admissible);
    CHECK(a.failing_link == -1);
    // (1/r1, 1/r2) = (9/10, 1/20): 1/r1 > 1/2 puts the point outside D_{4,4,2}? 1/p = 9/10 < 1, 1/s = 19/20 -> inside
    const auto odd = TupleR::make(R(9, 10), R(1, 20));
    // case ii tuple as the outer link: point (1/4, 1/4) needs 1/q < 3/2 - 9/10 = 3/5
    CHECK(range_D_iterated({r442, odd}).admissible);
    const auto tight = TupleR::make(R(19, 20), R(1, 40));
    const auto steep = TupleR::make(R(1, 4), R(11, 20));
    // steep as point: 1/q = 11/20 is not < 3/2 - 19/20 = 11/20
    const auto bad = range_D_iterated({r442, steep, tight});
    CHECK_FALSE(bad.admissible);
    CHECK(bad.failing_link == 1);
    CHECK_THROWS_AS(range_D_iterated({}), Error);
}

TEST_CASE("range of T_r") {
    CHECK(range_Tr(R(1, 2), pt(R(1, 2), R(1, 2))));
    CHECK_FALSE(range_Tr(R(1), pt(R(1, 2), R(1, 2))));  // 1/s' = 0 must be > 0
    CHECK(range_Tr(R(1), pt(R(1, 2), R(1, 4))));
    CHECK(range_Tr(R(1), pt(R(1, 4), R(1, 4))));
    CHECK_FALSE(range_Tr(R(2, 3), pt(R(7, 6), R(-1, 6))));
    CHECK_FALSE(range_Tr(R(2, 3), pt(R(7, 6), R(0))));
    CHECK(range_Tr(R(0), pt(R(1, 3), R(1, 3))));
    CHECK_THROWS_AS(range_Tr(R(3, 2), pt(R(1, 2), R(1, 2))), Error);
}

TEST_CASE("vv_apply") {
    std::mt19937_64 rng(1);
    const BilinearOp op = [](const Signal1D& f, const Signal1D& g) { return bht_direct(f, g); };
    const auto f = testutil::random_signal(rng, 6), g = testutil::random_signal(rng, 6);
    SignalFamily F, G;
    F.members = {f};
    G.members = {g};
    const auto single = vv_apply(op, F, G, {2.0});
    const auto direct = bht_direct(f, g);
    for (int x = 0; x < 64; ++x) CHECK(single[x].real() == doctest::Approx(std::abs(direct[x])).epsilon(1e-12));
    F.members = {f, f};
    G.members = {g, g};
    const auto dup = vv_apply(op, F, G, {2.0});
    for (int x = 0; x < 64; ++x) CHECK(dup[x].real() == doctest::Approx(std::sqrt(2.0) * std::abs(direct[x])).epsilon(1e-12));

    SignalFamily F4, G4;
    for (int i = 0; i < 4; ++i) {
        F4.members.push_back(testutil::random_signal(rng, 6));
        G4.members.push_back(testutil::random_signal(rng, 6));
    }
    const auto out = vv_apply(op, F4, G4, {3.0});
    for (int x = 0; x < 64; ++x) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += std::pow(std::abs(bht_direct(F4.members[i], G4.members[i])[x]), 3.0);
        CHECK(out[x].real() == doctest::Approx(std::cbrt(s)).epsilon(1e-12));
    }
    SignalFamily short_g;
    short_g.members = {g};
    CHECK_THROWS_AS(vv_apply(op, F4, short_g, {2.0}), Error);

    // nested: outer l^2 of inner l^inf
    SignalFamily NF, NG;
    NF.children = {F, F4};
    NG.children = {G, G4};
    const auto nested = vv_apply(op, NF, NG, {2.0, kInf});
    const auto inner1 = vv_apply(op, F, G, {kInf}), inner2 = vv_apply(op, F4, G4, {kInf});
    for (int x = 0; x < 64; ++x)
        CHECK(nested[x].real() == doctest::Approx(std::hypot(inner1[x].real(), inner2[x].real())).epsilon(1e-12));
}

TEST_CASE("Rubio de Francia operators") {
    const auto grid = GridSpec::make(7);
    std::mt19937_64 rng(2);
    const auto f = testutil::random_signal(rng, 7);
    IntervalFamily full{{{-63, 64}}};
    const auto rf = rf_operator(f, full, 2.0);
    for (int x = 0; x < 128; ++x) CHECK(rf[x].real() == doctest::Approx(std::abs(f[x])).epsilon(1e-12));

    IntervalFamily lac;
    for (int k = 0; k < 6; ++k) lac.intervals.push_back({1LL << k, (2LL << k) - 1});
    const auto e = testutil::exp_mode(grid, 13);
    for (double nu : {1.0, 2.0, kInf}) {
        const auto r = rf_operator(e, lac, nu);
        for (auto z : r.samples) CHECK(z.real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto rinf = rf_operator(f, lac, kInf);
    for (int x = 0; x < 128; ++x) {
        double m = 0.0;
        for (const auto& iv : lac.intervals) m = std::max(m, std::abs(fourier_project(f, iv, true)[x]));
        CHECK(rinf[x].real() == doctest::Approx(m).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rf_operator(f, IntervalFamily{{{0, 5}, {5, 9}}}, 2.0), Error);

    for (double p : {2.0, 3.0, 4.0}) {
        double worst = 0.0;
        for (int run = 0; run < 10; ++run) {
            const auto h = testutil::random_signal(rng, 7);
            worst = std::max(worst, lp_norm(rf_operator(h, lac, 2.0), p) / lp_norm(h, p));
        }
        MESSAGE("RF_2 constant p=" << p << ": " << worst);
        CHECK(worst < 5.0);
    }
}

TEST_CASE("T_r: projection identity against the nested sum") {
    std::mt19937_64 rng(3);
    for (int l : {4, 5, 6}) {
        const int n = 1 << l;
        for (int nk = 1; nk <= 5; ++nk) {
            IntervalFamily ks;
            const int width = std::max(1, n / (2 * nk));
            for (int k = 0; k < nk; ++k) ks.intervals.push_back({-n / 2 + 1 + k * width, -n / 2 + (k + 1) * width - 1 + 1});
            const auto f = testutil::random_signal(rng, l), g = testutil::random_signal(rng, l);
            for (double r : {1.0, 1.5, 2.0, kInf})
                CHECK_MESSAGE(rel(t_r(f, g, ks, r).samples, t_r_reference(f, g, ks, r).samples) < 1e-9, "l=" << l << " nk=" << nk << " r=" << r);
        }
    }
    const auto grid = GridSpec::make(6);
    const auto f = testutil::random_signal(rng, 6), g = testutil::random_signal(rng, 6);
    const auto full = t_r(f, g, IntervalFamily{{{-31, 32}}}, 2.0);
    const auto b = bht_direct(f, g);
    for (int x = 0; x < 64; ++x) CHECK(full[x].real() == doctest::Approx(std::abs(b[x])).epsilon(1e-10));
    const auto cross = t_r(testutil::exp_mode(grid, 2), testutil::exp_mode(grid, 9), IntervalFamily{{{0, 4}, {5, 12}}}, 2.0);
    CHECK(max_abs(cross.samples) < 1e-13);
}

TEST_CASE("filtration") {
    const auto grid = GridSpec::make(6);
    const Signal1D uni(grid, std::vector<cplx>(64, 1.0));
    const auto fl = filtration_phi(uni, 1.5);
    for (int x = 0; x < 64; ++x) CHECK(fl.phi[x] == doctest::Approx((x + 0.5) / 64.0).epsilon(1e-14));
    const auto left = fl.preimage({1, 0});
    CHECK(left.lo == 0);
    CHECK(left.hi == 32);
    CHECK(fl.preimage({1, 1}).hi == 64);
    CHECK_THROWS_AS(filtration_phi(Signal1D(grid), 2.0), Error);
    CHECK_THROWS_AS(filtration_phi(Signal1D(grid, std::vector<cplx>(64, 2.0)), 2.0), Error);

    std::mt19937_64 rng(4);
    for (int run = 0; run < 5; ++run) {
        auto g = normalized(testutil::random_signal(rng, 6), 1.5);
        const auto f = filtration_phi(g, 1.5);
        CHECK(f.cum.back() == doctest::Approx(1.0).epsilon(1e-12));
        for (int x = 1; x < 64; ++x) CHECK(f.phi[x] >= f.phi[x - 1]);
        std::uniform_int_distribution<int> d(0, 63);
        for (int t = 0; t < 50; ++t) {
            int x2 = d(rng), x3 = d(rng);
            if (x2 >= x3) continue;
            const auto w = f.separate(x2, x3);
            REQUIRE(w.has_value());
            // exhaustive search over dyadic intervals down to depth 30
            int found = 0;
            for (int k = 0; k <= 30; ++k) {
                const long long m = static_cast<long long>(std::floor(std::ldexp(f.phi[x2], k)));
                const DyadicOmega c{k, m};
                const double mid = 0.5 * (c.left() + c.right());
                if (f.phi[x2] >= c.left() && f.phi[x2] < mid && f.phi[x3] >= mid && f.phi[x3] < c.right() + (k == 0)) {
                    ++found;
                    CHECK(c.k == w->k);
                    CHECK(c.m == w->m);
                }
            }
            CHECK(found == 1);
        }
    }
}

TEST_CASE("hybrid operator splits into M1 + M2") {
    std::mt19937_64 rng(5);
    for (int l : {4, 5}) {
        for (int run = 0; run < 5; ++run) {
            const auto f1 = testutil::random_signal(rng, l), f2 = testutil::random_signal(rng, l);
            auto g = testutil::random_signal(rng, l);
            if (run == 4)
                for (int x = 0; x < (1 << l); x += 3) g[x] = 0;  // flat stretches in phi
            const auto m = m_operator(f1, f2, g);
            const auto m1 = m1_operator(f1, f2, g, 1.5), m2 = m2_operator(f1, f2, g, 1.5);
            std::vector<cplx> sum(m.samples.size());
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = m1.samples[i] + m2.samples[i];
            CHECK(rel(m.samples, sum) < 1e-9);
            CHECK(rel(m1.samples, m1_region(f1, f2, g, 1.5).samples) < 1e-9);
        }
    }
    const auto grid = GridSpec::make(4);
    const auto f1 = testutil::random_signal(rng, 4);
    CHECK(max_abs(m_operator(f1, f1, Signal1D(grid)).samples) == 0.0);
    CHECK_THROWS_AS(m_operator(testutil::random_signal(rng, 7), testutil::random_signal(rng, 7), testutil::random_signal(rng, 7)), Error);
}
