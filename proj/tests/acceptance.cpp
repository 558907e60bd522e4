// One PASS/FAIL line per acceptance criterion. Exits 0 once every line is printed; --strict exits 1 if any line failed.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "htf/experiments.hpp"
#include "htf/leibniz.hpp"

using namespace htf;

namespace {

// pinned tolerances
constexpr double kSlopeMax = 0.05;
constexpr double kControlTol = 1e-12;
constexpr double kScanSeconds = 600.0;
const std::vector<int> kScanLadder = {8, 9, 10, 11};  // N = 256 .. 2048
constexpr int kScanTrials = 20;
constexpr std::uint64_t kScanSeed = 7;
const std::vector<int> kMixedLadder = {5, 6, 7, 8};  // per-axis sizes for the mixed-norm scan
constexpr int kMixedTrials = 20;

int failures = 0;

void line(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// all suites of one kind; detail lists the failures
void suites_of_kind(int id, const char* name, SuiteKind kind) {
    const RunConfig c;
    int count = 0;
    std::string bad;
    for (const auto& s : suite_names()) {
        if (suite_kind(s) != kind) continue;
        const auto r = run_suite(s, c);
        ++count;
        if (!r.passed) bad += " " + s + "(" + r.detail + ")";
    }
    line(id, name, bad.empty() && count > 0, std::to_string(count) + " suites" + (bad.empty() ? "" : ", failed:" + bad));
}

void empirical() {
    const RunConfig c;
    std::vector<std::string> only;
    for (const auto& s : suite_names())
        if (suite_kind(s) == SuiteKind::empirical) only.push_back(s);
    try {
        const auto rep = run_verify(c, HTF_BASELINE_PATH, false, only);
        std::string detail = std::to_string(rep.suites.size()) + " suites, " + std::to_string(rep.drift.size()) + " tracked constants";
        for (const auto& s : rep.suites)
            if (!s.passed) detail += ", bound failed: " + s.name + " (" + s.detail + ")";
        for (const auto& d : rep.drift)
            if (!d.ok) detail += ", drift: " + d.key + " " + num(d.value) + " vs " + num(d.baseline);
        line(3, "empirical-constants", rep.exit_code == 0, detail);
    } catch (const Error& e) {
        line(3, "empirical-constants", false, e.what());
    }
}

void range_golden() {
    const auto bad = range_golden_mismatches();
    line(4, "range-golden", bad.empty() && range_golden_table().size() == 60,
         std::to_string(range_golden_table().size()) + " points, " + std::to_string(bad.size()) + " mismatches");
}

void norm_scan() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = scan_norm(scan_operator_names(), {ScanExponents{2, 2, 1}, ScanExponents{4, 4, 2}}, kScanLadder, kScanTrials, kScanSeed);
    const double secs = seconds_since(t0);
    bool ok = secs <= kScanSeconds;
    double worst = -kInf, control = 0.0;
    std::string worst_at, bad;
    for (const auto& s : res.slopes) {
        if (s.op == "product") continue;
        if (s.slope > worst) {
            worst = s.slope;
            worst_at = s.op + "@" + s.exponents;
        }
        if (s.slope > kSlopeMax) {
            ok = false;
            bad += " " + s.op + "@" + s.exponents + "=" + num(s.slope);
        }
    }
    for (const auto& r : res.rows)
        if (r.op == "product") control = std::max(control, std::abs(r.ratio - 1.0));
    ok = ok && control <= kControlTol;
    line(5, "norm-ratio-slopes", ok,
         "max slope " + num(worst) + " (" + worst_at + "), product |r-1| " + num(control) + ", " + num(secs) + " s" +
             (bad.empty() ? "" : ", over:" + bad));
}

void leibniz_criteria() {
    const RunConfig c;
    bool ok = true;
    std::string detail;
    for (const char* s : {"leibniz.single_frequency", "leibniz.tail_rate"}) {
        const auto r = run_suite(s, c);
        ok = ok && r.passed;
        for (const auto& m : r.metrics) detail += m.name + "=" + num(m.value) + " ";
        if (!r.passed) detail += "[" + std::string(s) + " failed: " + r.detail + "] ";
    }
    // two admissible mixed-norm cells
    const Rational h(1, 2), q(3, 4);
    LeibnizExponents a, b;
    a.kind = b.kind = LeibnizKind::mixed;
    a.alpha = a.beta = h;
    b.alpha = b.beta = 1;
    a.inv = {1, 1};
    b.inv = {Rational(3, 2), h};
    for (int k = 0; k < 4; ++k) {
        a.inv.insert(a.inv.end(), {h, h, h, h});
        b.inv.insert(b.inv.end(), {q, 0, q, h});
    }
    int cell = 0;
    for (const auto* e : {&a, &b}) {
        ok = ok && leibniz_admissible(*e).ok;
        std::vector<double> ns, ratios;
        for (int l : kMixedLadder) {
            const auto s = leibniz_scan(*e, l, kMixedTrials, mix_seed(kScanSeed, static_cast<std::uint64_t>(cell)));
            ns.push_back(std::ldexp(1.0, l));
            ratios.push_back(s.max_ratio);
        }
        const double slope = loglog_slope(ns, ratios);
        ok = ok && slope <= kSlopeMax;
        detail += "mixed" + std::to_string(cell) + "_slope=" + num(slope) + " ";
        ++cell;
    }
    line(6, "leibniz", ok, detail);
}

void determinism() {
    const RunConfig c;
    try {
        set_thread_count(1);
        const auto one = report_csv(run_verify(c, HTF_BASELINE_PATH, false));
        set_thread_count(8);
        const auto eight = report_csv(run_verify(c, HTF_BASELINE_PATH, false));
        set_thread_count(0);
        line(7, "determinism-1-vs-8-threads", one == eight, std::to_string(one.size()) + " bytes " + (one == eight ? "identical" : "differ"));
    } catch (const Error& e) {
        line(7, "determinism-1-vs-8-threads", false, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    suites_of_kind(1, "exact-identities", SuiteKind::identity);
    suites_of_kind(2, "structural-invariants", SuiteKind::structural);
    empirical();
    range_golden();
    norm_scan();
    leibniz_criteria();
    determinism();
    std::printf("%d of 7 criteria failed\n", failures);
    return strict && failures > 0 ? 1 : 0;
}
