#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htf/grid.hpp"

namespace htf {

enum class LeibnizKind { one_d, two_d, mixed };

// Reciprocal exponents, 0 meaning infinity. Layouts:
//   one_d: 1/s, then (1/p_i, 1/q_i) for the two terms               (5 entries)
//   two_d: 1/s, then (1/p_i, 1/q_i) for the four terms              (9 entries)
//   mixed: 1/s1, 1/s2, then per term (1/p_x, 1/p_y, 1/q_x, 1/q_y)    (18 entries)
// Term order: D f with g, f with D g, D1 f with D2 g, D2 f with D1 g.
struct LeibnizExponents {
    LeibnizKind kind = LeibnizKind::one_d;
    Rational alpha{1, 2};
    Rational beta{1, 2};
    std::vector<Rational> inv;
};

struct Admissibility {
    bool ok = true;
    std::string violated;
};

Admissibility leibniz_admissible(const LeibnizExponents& e);
// Hoelder and range conditions only; skips the lower bound on s (used by the inadmissible probe)
Admissibility leibniz_holder_only(const LeibnizExponents& e);
std::size_t leibniz_arity(LeibnizKind k);
const char* leibniz_kind_name(LeibnizKind k);
LeibnizKind leibniz_kind_from_name(const std::string& s);

// D along one axis; exponent 0 removes the zero mode along that axis
Signal2D derivative_axis(const Signal2D& f, double a, int axis);

// LHS / RHS; throws domain naming the violated condition unless probe is set
double leibniz_ratio_1d(const Signal1D& f, const Signal1D& g, const LeibnizExponents& e, bool probe = false);
double leibniz_ratio_2d(const Signal2D& f, const Signal2D& g, const LeibnizExponents& e, bool probe = false);
double leibniz_ratio_mixed(const Signal2D& f, const Signal2D& g, const LeibnizExponents& e, bool probe = false);

// random pairs with spectrum in |xi| <= N/4 per axis
struct LeibnizScan {
    double max_ratio = 0.0;
    int trials = 0;
    int n = 0;
};
LeibnizScan leibniz_scan(const LeibnizExponents& e, int log_n, int trials, std::uint64_t seed, bool probe = false);

// Fourier-series coefficients of an outer multiplier on the period lattice Z / P:
//   ball:    |zeta|^alpha bump(zeta / (P/2))           (P = 2^{m+4} for the diagonal block m)
//   annulus: |zeta|^alpha A(zeta / 2^k)                (P = 2^{k+3}), A = 1 on [0.375, 2.125]
// c[n + P/2 - 1] holds c_n for n in (-P/2, P/2].
enum class OuterShape { ball, annulus };
std::vector<double> shift_coefficients(double alpha, OuterShape shape, int log_period);
double outer_symbol(double alpha, OuterShape shape, int log_period, long long zeta);

struct ParaDecompResidual {
    double residual = 0.0;    // ||reconstruction - D^alpha(fg)||_2
    double reference = 0.0;   // ||D^alpha(fg)||_2
    double tail_bound = 0.0;  // sum over pieces of (sum_{|n| > n_max} |c_n|) ||piece||_2
    int n_max = 0;
    int pieces = 0;
};

// D^alpha(fg) rebuilt from the three paraproduct families with outer symbols replaced by
// their shift series truncated at |n| <= n_max. Inputs touching |xi| > N/4 are refused.
ParaDecompResidual paraproduct_decomposition_check(const Signal1D& f, const Signal1D& g, double alpha, int n_max = 64);
// along one axis of a 2D pair, line by line
ParaDecompResidual paraproduct_decomposition_check(const Signal2D& f, const Signal2D& g, double alpha, int axis, int n_max = 64);

}  // namespace htf
