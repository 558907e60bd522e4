#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "htf/grid.hpp"
#include "htf/wavepacket.hpp"

namespace htf {

// (1/p, 1/q, 1/s') on the Hoelder plane: the three coordinates sum to 1.
struct RangePoint {
    Rational inv_p, inv_q, inv_sprime;

    static RangePoint make(Rational inv_p, Rational inv_q);
    static RangePoint make(Rational inv_p, Rational inv_q, Rational inv_sprime);  // checks the plane
    Rational inv_s() const { return inv_p + inv_q; }
};

// (1/r1, 1/r2, 1/r'), summing to 1, with 1/r = 1/r1 + 1/r2.
struct TupleR {
    Rational inv_r1, inv_r2, inv_rprime;

    static TupleR make(Rational inv_r1, Rational inv_r2);
    static TupleR make(Rational inv_r1, Rational inv_r2, Rational inv_rprime);
    Rational inv_r() const { return inv_r1 + inv_r2; }
    RangePoint as_point() const { return RangePoint::make(inv_r1, inv_r2, inv_rprime); }
};

enum class RangeAnswer { inside, outside, uncovered };

Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& r);

bool range_bht(const RangePoint& pt);
RangeAnswer range_D_answer(const TupleR& r, const RangePoint& pt);
// throws domain error when the tuple falls outside the theorem's cases
bool range_D(const TupleR& r, const RangePoint& pt);

struct IteratedRange {
    bool admissible = false;
    int failing_link = -1;  // j with rs[j] not in D(rs[j+1])
    TupleR governing;       // rs[0] when admissible
};
// rs[0] is the first tuple; each rs[j], read as a point, must lie in D(rs[j+1])
IteratedRange range_D_iterated(const std::vector<TupleR>& rs);

// inv_r = 1/r in [0, 1]; inv_r = 0 is r = infinity
RangeAnswer range_Tr_answer(const Rational& inv_r, const RangePoint& pt);
bool range_Tr(const Rational& inv_r, const RangePoint& pt);

using BilinearOp = std::function<Signal1D(const Signal1D&, const Signal1D&)>;

// memberwise op on matching families, then the l^r family norm (rs outermost first)
Signal1D vv_apply(const BilinearOp& op, const SignalFamily& f, const SignalFamily& g, const std::vector<double>& rs);
SignalFamily vv_members(const BilinearOp& op, const SignalFamily& f, const SignalFamily& g);

// inclusive integer frequency ranges, pairwise disjoint
struct IntervalFamily {
    std::vector<FreqInterval> intervals;
    void validate() const;
};

Signal1D rf_operator(const Signal1D& f, const IntervalFamily& ks, double nu);
Signal1D t_r(const Signal1D& f, const Signal1D& g, const IntervalFamily& ks, double r);
// direct nested sum over a_k <= xi1 < xi2 <= b_k
Signal1D t_r_reference(const Signal1D& f, const Signal1D& g, const IntervalFamily& ks, double r);

// dyadic omega = [m 2^-k, (m+1) 2^-k) in [0, 1]; the top interval keeps the point 1
struct DyadicOmega {
    int k = 0;
    long long m = 0;
    double left() const { return std::ldexp(static_cast<double>(m), -k); }
    double right() const { return std::ldexp(static_cast<double>(m + 1), -k); }
    DyadicOmega left_half() const { return {k + 1, 2 * m}; }
    DyadicOmega right_half() const { return {k + 1, 2 * m + 1}; }
};

struct IndexRange {
    int lo = 0, hi = 0;  // [lo, hi)
    bool empty() const { return hi <= lo; }
};

// phi(x) = integral of |g|^p up to x; grid point x sits at the centre of its cell.
struct Filtration {
    std::vector<double> cum;  // cum[i] = mass of cells < i, cum[N] = 1
    std::vector<double> phi;  // phi[x] = (cum[x] + cum[x+1]) / 2

    IndexRange preimage(const DyadicOmega& w) const;
    // unique omega with phi(x2) in the left half and phi(x3) in the right half;
    // none when phi(x2) == phi(x3). Midpoints belong to the right half.
    std::optional<DyadicOmega> separate(int x2, int x3) const;
    // every omega whose two halves both have non-empty preimages
    std::vector<DyadicOmega> splitting_omegas() const;
};

Filtration filtration_phi(const Signal1D& g, double p);

// hybrid operator over index triples x1 < x2 < x3 with a = fhat1/N, b = fhat2/N, c = g
Signal1D m_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g);
Signal1D m1_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p);
Signal1D m1_region(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p);
Signal1D m2_operator(const Signal1D& f1, const Signal1D& f2, const Signal1D& g, double p);
constexpr int kTripleSumCap = 64;

}  // namespace htf
