#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htf/grid.hpp"
#include "htf/vector_valued.hpp"

namespace htf {

struct RunConfig {
    std::uint64_t seed = 1;
    int log_n = 8;
    int trials = 20;
    int chi_exp = 20;
    double epsilon = 0.05;
};

void check_run_config(const RunConfig& c);
// stable key used to index baselines; threads are deliberately not part of it
std::string config_fingerprint(const RunConfig& c);

enum class SuiteKind { identity, structural, empirical };
const char* suite_kind_name(SuiteKind k);

struct Metric {
    std::string name;
    double value = 0.0;
    bool tracked = false;  // compared against the baseline
};

struct SuiteResult {
    std::string name;  // module.suite
    SuiteKind kind = SuiteKind::identity;
    bool passed = true;
    std::vector<Metric> metrics;
    std::string detail;
};

std::vector<std::string> suite_names();
SuiteKind suite_kind(const std::string& name);
SuiteResult run_suite(const std::string& name, const RunConfig& c);

constexpr double kDriftTolerance = 0.20;

struct DriftRow {
    std::string key;  // suite/metric
    double baseline = 0.0;
    double value = 0.0;
    bool ok = true;
};

struct VerifyReport {
    RunConfig config;
    std::vector<SuiteResult> suites;
    std::vector<DriftRow> drift;
    int failures = 0;
    int drift_failures = 0;
    bool baseline_written = false;
    int exit_code = 0;  // 0 ok, 1 failure, 2 drift
};

// Missing baseline file or config entry without init is an io error. With init the
// entry for this config is (re)written and drift is not checked.
VerifyReport run_verify(const RunConfig& c, const std::string& baseline_path, bool init,
                        const std::vector<std::string>& only = {});
std::string report_csv(const VerifyReport& r);
std::string report_json(const VerifyReport& r);

// Test hook: "dft" perturbs the forward 1D transform, "" clears it.
void set_fault_injection(const std::string& name);

// Hand-derived range verdicts.
struct RangeGolden {
    std::string kind;  // bht, d, tr, chain
    std::vector<std::string> args;
    std::string expect;  // in, out, outside-coverage, admissible, fail@j
};
const std::vector<RangeGolden>& range_golden_table();
std::string range_verdict(const std::string& kind, const std::vector<std::string>& args);
// mismatching rows, formatted for the report
std::vector<std::string> range_golden_mismatches();

struct ScanExponents {
    double p = 2.0, q = 2.0, s = 1.0;
    std::string label() const;
};

struct ScanRow {
    int n = 0;
    std::string op;
    std::string exponents;
    double ratio = 0.0;
    int trials = 0;
};

struct ScanSlope {
    std::string op;
    std::string exponents;
    double slope = 0.0;  // least squares d log(ratio) / d log(N)
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::vector<ScanSlope> slopes;
};

std::vector<std::string> scan_operator_names();
// ladder of log2 N; 2D operators run at N/8 per axis
ScanResult scan_norm(const std::vector<std::string>& ops, const std::vector<ScanExponents>& exps,
                     const std::vector<int>& log_ladder, int trials, std::uint64_t seed);
std::string scan_csv(const ScanResult& r);
std::string scan_json(const ScanResult& r);
double loglog_slope(const std::vector<double>& n, const std::vector<double>& ratio);

}  // namespace htf
