// Command-line front end. Talks to the library only through htf_c.h.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htf_c.h"

#ifndef HTF_DEFAULT_BASELINE
#define HTF_DEFAULT_BASELINE "data/baseline.json"
#endif

namespace {

enum Exit { ok = 0, identity = 1, drift = 2, usage = 3, io = 4 };

int exit_for(htf_status s) {
    if (s == HTF_OK) return ok;
    return s == HTF_ERR_IO ? io : usage;
}

int report_error(htf_status s) {
    std::cerr << "htf: " << htf_status_name(s) << ": " << htf_last_error() << '\n';
    return exit_for(s);
}

// Writes text to --out or stdout; returns an exit code.
int emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return ok;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) {
        std::cerr << "htf: io: cannot write '" << out << "'\n";
        return io;
    }
    return ok;
}

int emit_owned(char* text, const std::string& out) {
    const std::string s = text;
    htf_free_string(text);
    return emit(s, out);
}

// Grid sizes are given as N; the library wants log2 N.
bool log_size(long long n, int& out) {
    if (n < 1 || (n & (n - 1)) != 0) {
        std::cerr << "htf: usage: --n must be a power of two, got " << n << '\n';
        return false;
    }
    out = 0;
    while ((1LL << out) < n) ++out;
    return true;
}

struct Common {
    std::uint64_t seed = 1;
    long long n = 0;
    int trials = 20;
    std::string format = "csv";
    std::string out;
    int threads = 0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-frequency verification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    std::string fault;
    app.add_option("--threads", c.threads, "worker threads (0 = hardware)");
    app.add_option("--inject-fault", fault)->group("");

    // each subcommand has its own default N, resolved after parsing
    auto common = [&c](CLI::App* sub, long long default_n) {
        sub->add_option("--seed", c.seed, "master seed");
        sub->add_option("--n,--N", c.n, "grid size (power of two), default " + std::to_string(default_n));
        sub->add_option("--trials", c.trials, "random trials per check");
        sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", c.out, "output path (stdout when omitted)");
    };

    // verify
    auto* verify = app.add_subcommand("verify", "run every invariant suite and compare empirical constants to the baseline");
    htf_config cfg;
    htf_config_default(&cfg);
    std::string baseline = HTF_DEFAULT_BASELINE;
    bool init = false;
    std::string only;
    common(verify, 1LL << cfg.log_n);
    verify->add_option("--chi-exp", cfg.chi_exp, "decay exponent of the adapted weight");
    verify->add_option("--epsilon", cfg.epsilon, "size-power gain exponent");
    verify->add_option("--baseline", baseline, "baseline JSON path");
    verify->add_flag("--init", init, "write the baseline entry for this config instead of checking it");
    verify->add_option("--only", only, "comma-separated suite names");

    // range
    auto* range = app.add_subcommand("range", "three-valued range predicate on reciprocal exponents");
    std::string range_kind;
    std::vector<std::string> range_args;
    range->add_option("kind", range_kind, "bht, d, tr or chain")->required();
    range->add_option("args", range_args, "rational arguments");

    // scan-norm
    auto* scan = app.add_subcommand("scan-norm", "empirical norm ratios over a doubling ladder of grid sizes");
    std::vector<std::string> ops;
    std::vector<std::string> exps = {"2:2:1"};
    std::vector<long long> ladder;
    scan->add_option("--op", ops, "operator names (default all)")->delimiter(',');
    scan->add_option("--exponents", exps, "p:q:s cells")->delimiter(',');
    scan->add_option("--ladder", ladder, "explicit grid sizes")->delimiter(',');
    common(scan, 2048);

    // decompose
    auto* decompose = app.add_subcommand("decompose", "stopping-time decomposition of the canonical tile family as JSON");
    std::string mask_path;
    double density = 0.3;
    int chi_exp = cfg.chi_exp;
    decompose->add_option("--mask", mask_path, "1D signal file used as the 0/1 mask");
    decompose->add_option("--density", density, "density of the random mask");
    decompose->add_option("--chi-exp", chi_exp, "decay exponent of the adapted weight");
    common(decompose, 256);

    // leibniz
    auto* leibniz = app.add_subcommand("leibniz", "fractional Leibniz ratio scan per exponent cell");
    std::string lkind = "1d", alpha = "1/2", beta = "1/2";
    std::vector<std::string> cells;
    leibniz->add_option("--kind", lkind, "1d, 2d or mixed");
    leibniz->add_option("--alpha", alpha);
    leibniz->add_option("--beta", beta);
    leibniz->add_option("--exponents", cells, "comma-separated reciprocal exponents, one option per cell")->required();
    common(leibniz, 256);

    // signal-io
    auto* sio = app.add_subcommand("signal-io", "convert a signal file between CSV and binary");
    std::string sio_in;
    sio->add_option("input", sio_in, "input signal (format detected from contents)")->required();
    sio->add_option("--out", c.out, "output path")->required();
    std::string sio_format = "binary";
    sio->add_option("--format", sio_format, "csv or binary")->check(CLI::IsMember({"csv", "binary"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    auto default_n = [&c](long long n) {
        if (c.n == 0) c.n = n;
    };
    if (*verify) default_n(1LL << cfg.log_n);
    if (*scan) default_n(2048);
    default_n(256);

    htf_set_threads(c.threads);
    if (!fault.empty()) {
        const auto s = htf_set_fault(fault.c_str());
        if (s != HTF_OK) return report_error(s);
    }

    if (*verify) {
        cfg.seed = c.seed;
        cfg.trials = c.trials;
        if (!log_size(c.n, cfg.log_n)) return usage;
        htf_report* r = nullptr;
        auto s = htf_verify(&cfg, baseline.c_str(), init ? 1 : 0, only.empty() ? nullptr : only.c_str(), &r);
        if (s != HTF_OK) return report_error(s);
        char* text = nullptr;
        s = htf_report_render(r, c.format.c_str(), &text);
        const int code = htf_report_exit_code(r);
        const int fails = htf_report_failures(r), drifts = htf_report_drift_failures(r), suites = htf_report_suite_count(r);
        htf_report_free(r);
        if (s != HTF_OK) return report_error(s);
        const int wrote = emit_owned(text, c.out);
        if (wrote != ok) return wrote;
        std::cerr << "htf: " << suites << " suites, " << fails << " failed, " << drifts << " drifted\n";
        return code;
    }

    if (*range) {
        std::vector<const char*> argv_c;
        for (const auto& a : range_args) argv_c.push_back(a.c_str());
        char* verdict = nullptr;
        const auto s = htf_range(range_kind.c_str(), argv_c.data(), static_cast<int>(argv_c.size()), &verdict);
        if (s != HTF_OK) return report_error(s);
        std::printf("%s\n", verdict);
        htf_free_string(verdict);
        return ok;
    }

    if (*scan) {
        std::vector<int> logs;
        if (ladder.empty()) {
            int top = 0;
            if (!log_size(c.n, top)) return usage;
            for (int l = std::max(5, top - 3); l <= top; ++l) logs.push_back(l);
        }
        for (long long n : ladder) {
            int l = 0;
            if (!log_size(n, l)) return usage;
            logs.push_back(l);
        }
        std::string op_list, exp_list;
        for (const auto& o : ops) op_list += (op_list.empty() ? "" : ",") + o;
        for (const auto& e : exps) exp_list += (exp_list.empty() ? "" : ",") + e;
        char* text = nullptr;
        const auto s = htf_scan_norm(op_list.empty() ? nullptr : op_list.c_str(), exp_list.c_str(), logs.data(), static_cast<int>(logs.size()),
                                     c.trials, c.seed, c.format.c_str(), &text, nullptr);
        if (s != HTF_OK) return report_error(s);
        return emit_owned(text, c.out);
    }

    if (*decompose) {
        int l = 0;
        if (!log_size(c.n, l)) return usage;
        htf_signal* mask = nullptr;
        if (!mask_path.empty()) {
            const auto s = htf_signal_read(mask_path.c_str(), &mask);
            if (s != HTF_OK) return report_error(s);
        }
        char* text = nullptr;
        int good = 0;
        const auto s = htf_decompose(mask, l, density, c.seed, chi_exp, &text, &good);
        htf_signal_free(mask);
        if (s != HTF_OK) return report_error(s);
        const int wrote = emit_owned(text, c.out);
        if (wrote != ok) return wrote;
        return good ? ok : identity;
    }

    if (*leibniz) {
        int l = 0;
        if (!log_size(c.n, l)) return usage;
        std::string joined;
        for (const auto& cell : cells) joined += (joined.empty() ? "" : ";") + cell;
        char* text = nullptr;
        const auto s = htf_leibniz(lkind.c_str(), alpha.c_str(), beta.c_str(), joined.c_str(), l, c.trials, c.seed, &text);
        if (s != HTF_OK) return report_error(s);
        return emit_owned(text, c.out);
    }

    if (*sio) {
        htf_signal* sig = nullptr;
        auto s = htf_signal_read(sio_in.c_str(), &sig);
        if (s != HTF_OK) return report_error(s);
        s = htf_signal_write(sig, c.out.c_str(), sio_format.c_str());
        htf_signal_free(sig);
        if (s != HTF_OK) return report_error(s);
        return ok;
    }
    return usage;
}
