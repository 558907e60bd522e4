#include "htf/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "experiments_internal.hpp"

namespace htf {

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const detail::SuiteDef* find_suite(const std::string& name) {
    for (const auto& d : detail::suite_registry())
        if (name == d.name) return &d;
    return nullptr;
}

std::string metric_key(const SuiteResult& s, const Metric& m) { return s.name + "/" + m.name; }

ojson load_baseline(const std::string& path, bool must_exist) {
    std::ifstream in(path);
    if (!in) {
        if (must_exist) fail(ErrorCode::io, "baseline file not found: " + path + " (run verify with --init to create it)");
        return ojson{{"format", 1}, {"tolerance", kDriftTolerance}, {"configs", ojson::object()}};
    }
    try {
        ojson j = ojson::parse(in);
        if (!j.is_object() || !j.contains("configs") || !j["configs"].is_object()) fail(ErrorCode::io, "baseline file has no configs object: " + path);
        return j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io, "baseline file is not valid json: " + path + ": " + e.what());
    }
}

void save_baseline(const std::string& path, const ojson& j) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write baseline file: " + path);
    out << j.dump(2) << '\n';
    if (!out) fail(ErrorCode::io, "write failed: " + path);
}

}  // namespace

void check_run_config(const RunConfig& c) {
    if (c.log_n < 6 || c.log_n > 12) fail(ErrorCode::usage, "--n must be a power of two in [64, 4096]");
    if (c.trials < 1 || c.trials > 10000) fail(ErrorCode::usage, "--trials must lie in [1, 10000]");
    if (c.chi_exp < 2 || c.chi_exp > 200) fail(ErrorCode::usage, "--chi-exp must lie in [2, 200]");
    if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) fail(ErrorCode::usage, "--epsilon must lie in (0, 1/2)");
}

// shortest text that round-trips, so 0.05 stays "0.05"
std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string config_fingerprint(const RunConfig& c) {
    return "seed=" + std::to_string(c.seed) + ";n=" + std::to_string(1 << c.log_n) + ";trials=" + std::to_string(c.trials) +
           ";chi=" + std::to_string(c.chi_exp) + ";eps=" + shortest(c.epsilon);
}

const char* suite_kind_name(SuiteKind k) {
    switch (k) {
        case SuiteKind::identity: return "identity";
        case SuiteKind::structural: return "structural";
        case SuiteKind::empirical: return "empirical";
    }
    return "?";
}

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& d : detail::suite_registry()) out.emplace_back(d.name);
    return out;
}

SuiteKind suite_kind(const std::string& name) {
    const auto* def = find_suite(name);
    if (!def) fail(ErrorCode::usage, "unknown suite '" + name + "'");
    return def->kind;
}

SuiteResult run_suite(const std::string& name, const RunConfig& c) {
    const auto* def = find_suite(name);
    if (!def) fail(ErrorCode::usage, "unknown suite '" + name + "'");
    SuiteResult r;
    r.name = def->name;
    r.kind = def->kind;
    try {
        def->run(c, mix_seed(c.seed, detail::name_hash(def->name)), r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

VerifyReport run_verify(const RunConfig& c, const std::string& baseline_path, bool init, const std::vector<std::string>& only) {
    check_run_config(c);
    for (const auto& n : only)
        if (!find_suite(n)) fail(ErrorCode::usage, "unknown suite '" + n + "'");
    const std::string fp = config_fingerprint(c);
    ojson base = load_baseline(baseline_path, !init);
    if (!init && !base["configs"].contains(fp))
        fail(ErrorCode::io, "baseline has no entry for " + fp + " (run verify with --init to record it)");

    VerifyReport rep;
    rep.config = c;
    for (const auto& d : detail::suite_registry()) {
        if (!only.empty() && std::find(only.begin(), only.end(), d.name) == only.end()) continue;
        rep.suites.push_back(run_suite(d.name, c));
    }
    for (const auto& s : rep.suites) rep.failures += !s.passed;

    if (init) {
        ojson& entry = base["configs"][fp];
        if (!entry.is_object()) entry = ojson::object();
        for (const auto& s : rep.suites)
            for (const auto& m : s.metrics)
                if (m.tracked) entry[metric_key(s, m)] = m.value;
        save_baseline(baseline_path, base);
        rep.baseline_written = true;
    } else {
        const ojson& entry = base["configs"][fp];
        const double tol = base.contains("tolerance") ? base["tolerance"].get<double>() : kDriftTolerance;
        for (const auto& s : rep.suites)
            for (const auto& m : s.metrics) {
                if (!m.tracked) continue;
                DriftRow row;
                row.key = metric_key(s, m);
                row.value = m.value;
                if (!entry.contains(row.key) || !entry[row.key].is_number()) {
                    row.baseline = std::nan("");
                    row.ok = false;
                } else {
                    row.baseline = entry[row.key].get<double>();
                    row.ok = std::abs(m.value - row.baseline) <= tol * std::abs(row.baseline) + 1e-12;
                }
                rep.drift_failures += !row.ok;
                rep.drift.push_back(row);
            }
    }
    rep.exit_code = rep.failures > 0 ? 1 : rep.drift_failures > 0 ? 2 : 0;
    return rep;
}

std::string report_csv(const VerifyReport& r) {
    std::map<std::string, const DriftRow*> drift;
    for (const auto& d : r.drift) drift[d.key] = &d;
    std::ostringstream out;
    out << "# " << config_fingerprint(r.config) << " exit=" << r.exit_code << " suites=" << r.suites.size() << " failures=" << r.failures
        << " drift_failures=" << r.drift_failures << '\n';
    out << "suite,kind,status,metric,value,baseline,drift\n";
    for (const auto& s : r.suites) {
        const char* status = s.passed ? "pass" : "fail";
        if (s.metrics.empty()) out << s.name << ',' << suite_kind_name(s.kind) << ',' << status << ",,,,\n";
        for (const auto& m : s.metrics) {
            out << s.name << ',' << suite_kind_name(s.kind) << ',' << status << ',' << m.name << ',' << fmt(m.value) << ',';
            const auto it = drift.find(metric_key(s, m));
            if (it != drift.end()) out << fmt(it->second->baseline) << ',' << (it->second->ok ? "ok" : "drift");
            else out << ',';
            out << '\n';
        }
    }
    return out.str();
}

std::string report_json(const VerifyReport& r) {
    ojson j;
    j["config"] = {{"seed", r.config.seed}, {"n", 1 << r.config.log_n}, {"trials", r.config.trials}, {"chi_exp", r.config.chi_exp},
                   {"epsilon", r.config.epsilon}};
    j["exit_code"] = r.exit_code;
    j["failures"] = r.failures;
    j["drift_failures"] = r.drift_failures;
    j["baseline_written"] = r.baseline_written;
    j["suites"] = ojson::array();
    for (const auto& s : r.suites) {
        ojson sj{{"name", s.name}, {"kind", suite_kind_name(s.kind)}, {"passed", s.passed}};
        if (!s.detail.empty()) sj["detail"] = s.detail;
        sj["metrics"] = ojson::object();
        for (const auto& m : s.metrics) sj["metrics"][m.name] = m.value;
        j["suites"].push_back(sj);
    }
    j["drift"] = ojson::array();
    for (const auto& d : r.drift) {
        ojson dj{{"key", d.key}, {"value", d.value}, {"ok", d.ok}};
        if (std::isnan(d.baseline)) dj["baseline"] = nullptr;
        else dj["baseline"] = d.baseline;
        j["drift"].push_back(dj);
    }
    return j.dump(2) + "\n";
}

void set_fault_injection(const std::string& name) {
    if (name.empty() || name == "none") set_dft_fault(false);
    else if (name == "dft") set_dft_fault(true);
    else fail(ErrorCode::usage, "unknown fault '" + name + "'");
}

// ---- range verdicts

const std::vector<RangeGolden>& range_golden_table() {
    // Each verdict worked out by hand from the strict and non-strict inequalities of the
    // respective region; "a:b" in a chain is the tuple (1/r1, 1/r2).
    static const std::vector<RangeGolden> t = {
        // scalar range: 0 <= 1/p, 1/q < 1 and 0 < 1/p + 1/q < 3/2
        {"bht", {"1/2", "1/2"}, "in"},
        {"bht", {"3/4", "3/4"}, "out"},
        {"bht", {"1", "0"}, "out"},
        {"bht", {"0", "1"}, "out"},
        {"bht", {"0", "0"}, "out"},
        {"bht", {"1/2", "1"}, "out"},
        {"bht", {"1", "1/2"}, "out"},
        {"bht", {"0", "1/2"}, "in"},
        {"bht", {"9/10", "1/2"}, "in"},
        {"bht", {"9/10", "3/5"}, "out"},
        {"bht", {"9/10", "59/100"}, "in"},
        {"bht", {"1/100", "0"}, "in"},
        {"bht", {"-1/10", "1/2"}, "out"},
        {"bht", {"1/3", "1/3"}, "in"},
        {"bht", {"2/3", "5/6"}, "out"},
        {"bht", {"99/100", "1/2"}, "in"},
        // every reciprocal at most 1/2
        {"d", {"1/4", "1/4", "1/2", "1/2"}, "in"},
        {"d", {"1/4", "1/4", "9/10", "7/10"}, "out"},
        {"d", {"1/4", "1/4", "3/4", "1/2"}, "in"},
        {"d", {"1/3", "1/6", "9/10", "3/5"}, "out"},
        {"d", {"1/2", "1/2", "1/2", "1/2"}, "in"},
        {"d", {"1/2", "0", "0", "0"}, "out"},
        // 1/r1 > 1/2: 1/q < 3/2 - 1/r1
        {"d", {"2/3", "1/6", "1/2", "5/6"}, "out"},
        {"d", {"2/3", "1/6", "1/2", "4/5"}, "in"},
        {"d", {"2/3", "1/6", "9/10", "4/5"}, "out"},
        {"d", {"2/3", "1/6", "0", "0"}, "out"},
        {"d", {"3/4", "0", "1/2", "3/4"}, "out"},
        {"d", {"3/4", "0", "3/4", "2/3"}, "in"},
        {"d", {"3/4", "0", "0", "7/10"}, "in"},
        // 1/r2 > 1/2: 1/p < 3/2 - 1/r2
        {"d", {"1/6", "2/3", "5/6", "1/2"}, "out"},
        {"d", {"1/6", "2/3", "4/5", "1/2"}, "in"},
        {"d", {"1/6", "2/3", "1/2", "9/10"}, "in"},
        {"d", {"0", "9/10", "3/5", "0"}, "out"},
        {"d", {"0", "9/10", "1/2", "1/2"}, "in"},
        {"d", {"0", "9/10", "1/2", "99/100"}, "in"},
        // 1/r' > 1/2: 1/p, 1/q < 1/2 + 1/r and -1/r < 1/s' < 1
        {"d", {"1/8", "1/8", "1/2", "1/2"}, "in"},
        {"d", {"1/8", "1/8", "3/4", "0"}, "out"},
        {"d", {"1/8", "1/8", "2/3", "2/3"}, "out"},
        {"d", {"1/8", "1/8", "5/8", "5/8"}, "out"},
        {"d", {"1/8", "1/8", "3/5", "3/5"}, "in"},
        {"d", {"1/8", "1/8", "0", "0"}, "out"},
        {"d", {"1/8", "1/8", "1/10", "0"}, "in"},
        {"d", {"0", "1/3", "5/6", "1/6"}, "out"},
        {"d", {"0", "1/3", "4/5", "1/2"}, "in"},
        {"d", {"0", "1/3", "1/2", "5/6"}, "out"},
        // chains: each tuple, read as a point, must lie in the next tuple's region
        {"chain", {"1/4:1/4"}, "admissible"},
        {"chain", {"1/2:1/2", "1/4:1/4"}, "admissible"},
        {"chain", {"1/4:1/4", "1/2:1/2"}, "admissible"},
        {"chain", {"2/3:1/6", "1/8:1/8"}, "admissible"},
        {"chain", {"3/4:0", "1/8:1/8"}, "fail@0"},
        {"chain", {"1/4:1/4", "1/4:1/4", "3/4:0"}, "admissible"},
        {"chain", {"1/4:1/4", "2/3:1/6", "0:9/10"}, "fail@1"},
        // T_r, argument 1/r
        {"tr", {"1/2", "1/2", "1/2"}, "in"},
        {"tr", {"1/3", "9/10", "3/5"}, "out"},
        {"tr", {"0", "1/2", "1/4"}, "in"},
        {"tr", {"1", "1/2", "1/2"}, "out"},
        {"tr", {"1", "1/2", "1/4"}, "in"},
        {"tr", {"2/3", "7/6", "0"}, "out"},
        {"tr", {"2/3", "1", "1/4"}, "in"},
        {"tr", {"2/3", "2/3", "2/3"}, "out"},
    };
    return t;
}

namespace {

std::string answer_name(RangeAnswer a) {
    switch (a) {
        case RangeAnswer::inside: return "in";
        case RangeAnswer::outside: return "out";
        case RangeAnswer::uncovered: return "outside-coverage";
    }
    return "?";
}

// Tuples violating 1 < r1, r2 and 1 <= r < inf are outside every case of the theorem.
bool build_tuple(const std::string& a, const std::string& b, TupleR& out) {
    const Rational r1 = parse_rational(a), r2 = parse_rational(b);
    try {
        out = TupleR::make(r1, r2);
        return true;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::domain) throw;
        return false;
    }
}

void need_args(const std::vector<std::string>& args, std::size_t n, const char* usage) {
    if (args.size() != n) fail(ErrorCode::usage, std::string("expected ") + usage);
}

}  // namespace

std::string range_verdict(const std::string& kind, const std::vector<std::string>& args) {
    if (kind == "bht") {
        need_args(args, 2, "bht <1/p> <1/q>");
        return range_bht(RangePoint::make(parse_rational(args[0]), parse_rational(args[1]))) ? "in" : "out";
    }
    if (kind == "d") {
        need_args(args, 4, "d <1/r1> <1/r2> <1/p> <1/q>");
        const auto pt = RangePoint::make(parse_rational(args[2]), parse_rational(args[3]));
        TupleR t;
        if (!build_tuple(args[0], args[1], t)) return "outside-coverage";
        return answer_name(range_D_answer(t, pt));
    }
    if (kind == "tr") {
        need_args(args, 3, "tr <1/r> <1/p> <1/q>");
        return answer_name(range_Tr_answer(parse_rational(args[0]), RangePoint::make(parse_rational(args[1]), parse_rational(args[2]))));
    }
    if (kind == "chain") {
        if (args.empty()) fail(ErrorCode::usage, "expected chain <1/r1:1/r2> ...");
        std::vector<TupleR> rs;
        for (const auto& a : args) {
            const auto colon = a.find(':');
            if (colon == std::string::npos) fail(ErrorCode::usage, "chain tuples are written 1/r1:1/r2, got '" + a + "'");
            TupleR t;
            if (!build_tuple(a.substr(0, colon), a.substr(colon + 1), t)) return "outside-coverage";
            rs.push_back(t);
        }
        const auto it = range_D_iterated(rs);
        return it.admissible ? "admissible" : "fail@" + std::to_string(it.failing_link);
    }
    fail(ErrorCode::usage, "unknown range kind '" + kind + "' (bht, d, tr, chain)");
}

std::vector<std::string> range_golden_mismatches() {
    std::vector<std::string> bad;
    for (const auto& g : range_golden_table()) {
        std::string got;
        try {
            got = range_verdict(g.kind, g.args);
        } catch (const std::exception& e) {
            got = std::string("error: ") + e.what();
        }
        if (got != g.expect) {
            std::string line = g.kind;
            for (const auto& a : g.args) line += " " + a;
            bad.push_back(line + ": expected " + g.expect + ", got " + got);
        }
    }
    return bad;
}

}  // namespace htf
