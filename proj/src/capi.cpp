#include "htf_c.h"

#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include "json.hpp"

#include "htf/experiments.hpp"
#include "htf/helicoid.hpp"
#include "htf/leibniz.hpp"

struct htf_signal {
    htf::SignalFile file;
};

struct htf_report {
    htf::VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

template <class F>
htf_status guard(F&& f) {
    try {
        f();
        g_last_error.clear();
        return HTF_OK;
    } catch (const htf::Error& e) {
        g_last_error = e.what();
        return static_cast<htf_status>(static_cast<int>(e.code()));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return HTF_ERR_INTERNAL;
    }
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void need(const void* p, const char* what) {
    if (!p) htf::fail(htf::ErrorCode::usage, std::string(what) + " must not be null");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

htf::RunConfig to_config(const htf_config* c) {
    htf::RunConfig r;
    if (c) {
        r.seed = c->seed;
        r.log_n = c->log_n;
        r.trials = c->trials;
        r.chi_exp = c->chi_exp;
        r.epsilon = c->epsilon;
    }
    return r;
}

double parse_exponent(const std::string& s) {
    if (s == "inf") return htf::kInf;
    const auto r = htf::parse_rational(s);
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace

extern "C" {

const char* htf_last_error(void) { return g_last_error.c_str(); }

const char* htf_status_name(htf_status s) {
    switch (s) {
        case HTF_OK: return "ok";
        case HTF_ERR_INTERNAL: return "internal";
        default:
            if (s >= HTF_ERR_DOMAIN && s <= HTF_ERR_REFUSED) return htf::error_code_name(static_cast<htf::ErrorCode>(static_cast<int>(s)));
    }
    return "unknown";
}

void htf_free_string(char* s) { std::free(s); }

void htf_config_default(htf_config* c) {
    if (!c) return;
    const htf::RunConfig d;
    c->seed = d.seed;
    c->log_n = d.log_n;
    c->trials = d.trials;
    c->chi_exp = d.chi_exp;
    c->epsilon = d.epsilon;
}

void htf_set_threads(int n) { htf::set_thread_count(n); }

htf_status htf_set_fault(const char* name) {
    return guard([&] { htf::set_fault_injection(name ? name : ""); });
}

htf_status htf_signal_create(int n, int axes, const double* interleaved, htf_signal** out) {
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        if (n < 1 || (axes != 1 && axes != 2)) htf::fail(htf::ErrorCode::usage, "signal needs n >= 1 and axes in {1, 2}");
        const std::size_t count = axes == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        auto s = std::make_unique<htf_signal>();
        s->file.n = n;
        s->file.axes = axes;
        s->file.samples.resize(count);
        if (interleaved)
            for (std::size_t i = 0; i < count; ++i) s->file.samples[i] = htf::cplx(interleaved[2 * i], interleaved[2 * i + 1]);
        *out = s.release();
    });
}

htf_status htf_signal_read(const char* path, htf_signal** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        auto s = std::make_unique<htf_signal>();
        s->file = htf::read_signal_file(path);
        *out = s.release();
    });
}

htf_status htf_signal_write(const htf_signal* s, const char* path, const char* format) {
    return guard([&] {
        need(s, "signal");
        need(path, "path");
        const std::string f = format ? format : "csv";
        if (f == "csv") htf::write_signal_csv(s->file, path);
        else if (f == "binary") htf::write_signal_binary(s->file, path);
        else htf::fail(htf::ErrorCode::usage, "signal format must be csv or binary");
    });
}

int htf_signal_size(const htf_signal* s) { return s ? s->file.n : 0; }
int htf_signal_axes(const htf_signal* s) { return s ? s->file.axes : 0; }
size_t htf_signal_count(const htf_signal* s) { return s ? s->file.samples.size() : 0; }

htf_status htf_signal_copy(const htf_signal* s, double* interleaved, size_t count) {
    return guard([&] {
        need(s, "signal");
        need(interleaved, "buffer");
        if (count < s->file.samples.size()) htf::fail(htf::ErrorCode::usage, "buffer holds fewer samples than the signal");
        for (std::size_t i = 0; i < s->file.samples.size(); ++i) {
            interleaved[2 * i] = s->file.samples[i].real();
            interleaved[2 * i + 1] = s->file.samples[i].imag();
        }
    });
}

void htf_signal_free(htf_signal* s) { delete s; }

size_t htf_suite_count(void) { return htf::suite_names().size(); }

const char* htf_suite_name(size_t i) {
    static const std::vector<std::string> names = htf::suite_names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

htf_status htf_verify(const htf_config* c, const char* baseline_path, int init, const char* only, htf_report** out) {
    return guard([&] {
        need(baseline_path, "baseline path");
        need(out, "out");
        *out = nullptr;
        auto r = std::make_unique<htf_report>();
        r->report = htf::run_verify(to_config(c), baseline_path, init != 0, only ? split(only, ',') : std::vector<std::string>{});
        *out = r.release();
    });
}

int htf_report_exit_code(const htf_report* r) { return r ? r->report.exit_code : -1; }
int htf_report_suite_count(const htf_report* r) { return r ? static_cast<int>(r->report.suites.size()) : 0; }
int htf_report_failures(const htf_report* r) { return r ? r->report.failures : 0; }
int htf_report_drift_failures(const htf_report* r) { return r ? r->report.drift_failures : 0; }

htf_status htf_report_render(const htf_report* r, const char* format, char** text) {
    return guard([&] {
        need(r, "report");
        need(text, "text");
        const std::string f = format ? format : "csv";
        if (f == "csv") *text = dup(htf::report_csv(r->report));
        else if (f == "json") *text = dup(htf::report_json(r->report));
        else htf::fail(htf::ErrorCode::usage, "report format must be csv or json");
    });
}

void htf_report_free(htf_report* r) { delete r; }

htf_status htf_range(const char* kind, const char* const* args, int nargs, char** verdict) {
    return guard([&] {
        need(kind, "kind");
        need(verdict, "verdict");
        if (nargs > 0) need(args, "args");
        std::vector<std::string> a;
        for (int i = 0; i < nargs; ++i) {
            need(args[i], "argument");
            a.emplace_back(args[i]);
        }
        *verdict = dup(htf::range_verdict(kind, a));
    });
}

size_t htf_range_golden_count(void) { return htf::range_golden_table().size(); }
int htf_range_golden_mismatches(void) { return static_cast<int>(htf::range_golden_mismatches().size()); }

const char* htf_scan_operators(void) {
    static const std::string list = [] {
        std::string s;
        for (const auto& n : htf::scan_operator_names()) s += (s.empty() ? "" : ",") + n;
        return s;
    }();
    return list.c_str();
}

htf_status htf_scan_norm(const char* ops, const char* exponents, const int* log_ladder, int ladder_len, int trials, uint64_t seed,
                         const char* format, char** text, double* max_slope) {
    return guard([&] {
        need(text, "text");
        need(log_ladder, "ladder");
        const auto names = ops && *ops ? split(ops, ',') : htf::scan_operator_names();
        std::vector<htf::ScanExponents> exps;
        for (const auto& cell : split(exponents && *exponents ? exponents : "2:2:1", ',')) {
            const auto parts = split(cell, ':');
            if (parts.size() != 3) htf::fail(htf::ErrorCode::usage, "exponent cells are written p:q:s, got '" + cell + "'");
            exps.push_back({parse_exponent(parts[0]), parse_exponent(parts[1]), parse_exponent(parts[2])});
        }
        const std::vector<int> ladder(log_ladder, log_ladder + std::max(0, ladder_len));
        const auto res = htf::scan_norm(names, exps, ladder, trials, seed);
        if (max_slope) {
            double m = -htf::kInf;
            for (const auto& s : res.slopes) m = std::max(m, s.slope);
            *max_slope = m;
        }
        const std::string f = format ? format : "csv";
        if (f == "csv") *text = dup(htf::scan_csv(res));
        else if (f == "json") *text = dup(htf::scan_json(res));
        else htf::fail(htf::ErrorCode::usage, "scan format must be csv or json");
    });
}

htf_status htf_decompose(const htf_signal* mask, int log_n, double density, uint64_t seed, int chi_exp, char** json, int* ok) {
    return guard([&] {
        need(json, "json");
        htf::Signal1D w;
        if (mask) {
            if (mask->file.axes != 1) htf::fail(htf::ErrorCode::usage, "decompose needs a 1D mask");
            w = htf::Signal1D(htf::GridSpec::from_size(mask->file.n), mask->file.samples);
        } else {
            if (!(density > 0.0 && density <= 1.0)) htf::fail(htf::ErrorCode::usage, "density must lie in (0, 1]");
            const auto g = htf::GridSpec::make(log_n);
            w = htf::Signal1D(g);
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u;
            for (auto& z : w.samples) z = u(rng) < density ? 1.0 : 0.0;
        }
        const auto s = htf::certify(htf::canonical_tileset(w.grid, htf::canonical_scales(w.grid)));
        const auto d = htf::stopping_time_select(s, w, chi_exp);
        const auto chk = htf::check_decomposition(s, w, d);
        auto j = nlohmann::ordered_json::parse(htf::decomposition_to_json(d, s));
        j["check"] = {{"partition", chk.partition}, {"disjoint", chk.disjoint}, {"certificates", chk.certificates},
                      {"maximal", chk.maximal},     {"violations", chk.violations}, {"first_problem", chk.first_problem}};
        j["packing_constant"] = htf::packing_constant(d, w);
        *json = dup(j.dump(2) + "\n");
        if (ok) *ok = chk.ok() ? 1 : 0;
    });
}

htf_status htf_leibniz(const char* kind, const char* alpha, const char* beta, const char* cells, int log_n, int trials, uint64_t seed,
                       char** csv) {
    return guard([&] {
        need(kind, "kind");
        need(cells, "cells");
        need(csv, "csv");
        htf::LeibnizExponents base;
        base.kind = htf::leibniz_kind_from_name(kind);
        base.alpha = htf::parse_rational(alpha ? alpha : "1/2");
        base.beta = htf::parse_rational(beta ? beta : "1/2");
        const auto list = split(cells, ';');
        if (list.empty()) htf::fail(htf::ErrorCode::usage, "no exponent cells given");
        std::vector<htf::LeibnizExponents> es;
        for (const auto& cell : list) {
            auto e = base;
            for (const auto& v : split(cell, ',')) e.inv.push_back(htf::parse_rational(v));
            const auto adm = htf::leibniz_admissible(e);
            if (!adm.ok) htf::fail(htf::ErrorCode::domain, "cell '" + cell + "' is not admissible: " + adm.violated);
            es.push_back(e);
        }
        std::ostringstream out;
        out << "cell,max_ratio,trials,N\n";
        for (std::size_t k = 0; k < es.size(); ++k) {
            const auto r = htf::leibniz_scan(es[k], log_n, trials, htf::mix_seed(seed, k));
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", r.max_ratio);
            out << k << ',' << buf << ',' << r.trials << ',' << r.n << '\n';
        }
        *csv = dup(out.str());
    });
}

}  // extern "C"
