#include "htf/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace htf {

GridSpec GridSpec::make(int log_size, int axes) {
    if (log_size < 3 || log_size > 24) fail(ErrorCode::domain, "grid log_size must be in [3, 24]");
    if (axes != 1 && axes != 2) fail(ErrorCode::domain, "grid axes must be 1 or 2");
    return GridSpec{log_size, axes};
}

GridSpec GridSpec::from_size(long long n, int axes) {
    if (!is_pow2(n)) fail(ErrorCode::domain, "grid size must be a power of two");
    int l = 0;
    while ((1LL << l) < n) ++l;
    return make(l, axes);
}

Signal1D::Signal1D(GridSpec g) : grid(g), samples(g.size()) {}
Signal1D::Signal1D(GridSpec g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
    if (static_cast<int>(samples.size()) != g.size()) fail(ErrorCode::grid_mismatch, "sample count differs from grid size");
}

Signal2D::Signal2D(GridSpec g) : grid(g), samples(static_cast<std::size_t>(g.size()) * g.size()) {}
Signal2D::Signal2D(GridSpec g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
    if (samples.size() != static_cast<std::size_t>(g.size()) * g.size())
        fail(ErrorCode::grid_mismatch, "sample count differs from grid size");
}

GridSpec SignalFamily::grid() const {
    if (nested()) return children.front().grid();
    if (members.empty()) fail(ErrorCode::precondition, "empty signal family");
    return members.front().grid;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (a.log_size != b.log_size) fail(ErrorCode::grid_mismatch, std::string(where) + ": grid mismatch");
}

// ---- FFT ----

namespace {

struct PlanKey {
    int n0, n1, sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(n0, n1, sign) < std::tie(o.n0, o.n1, o.sign);
    }
};

std::mutex g_plan_mu;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan get_plan(int n0, int n1, int sign) {
    std::lock_guard<std::mutex> lk(g_plan_mu);
    PlanKey key{n0, n1, sign};
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::size_t total = static_cast<std::size_t>(n0) * (n1 > 0 ? n1 : 1);
    fftw_complex* buf = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, buf, buf, sign, flags) : fftw_plan_dft_1d(n0, buf, buf, sign, flags);
    fftw_free(buf);
    g_plans.emplace(key, p);
    return p;
}

void run_1d(cplx* data, int n, int sign) {
    fftw_plan p = get_plan(n, 0, sign);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

void run_2d(cplx* data, int n, int sign) {
    fftw_plan p = get_plan(n, n, sign);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

Signal2D transform_axis(const Signal2D& f, int axis, int sign, bool normalize) {
    if (axis != 0 && axis != 1) fail(ErrorCode::domain, "axis must be 0 or 1");
    const int n = f.size();
    Signal2D out = f;
    std::vector<cplx> line(n);
    const double scale = normalize ? 1.0 / n : 1.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) line[b] = axis == 1 ? f.at(a, b) : f.at(b, a);
        run_1d(line.data(), n, sign);
        for (int b = 0; b < n; ++b) (axis == 1 ? out.at(a, b) : out.at(b, a)) = line[b] * scale;
    }
    return out;
}

}  // namespace

void fft_inplace(std::vector<cplx>& a, int sign) {
    if (!is_pow2(static_cast<long long>(a.size()))) fail(ErrorCode::domain, "fft length must be a power of two");
    run_1d(a.data(), static_cast<int>(a.size()), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
}

namespace {
std::atomic<bool> g_dft_fault{false};
}

void set_dft_fault(bool on) { g_dft_fault = on; }

Signal1D dft(const Signal1D& f) {
    Signal1D out = f;
    run_1d(out.samples.data(), f.size(), FFTW_FORWARD);
    if (g_dft_fault.load(std::memory_order_relaxed) && f.size() > 1) out.samples[1] *= 1.0 + 1e-6;
    return out;
}

Signal1D idft(const Signal1D& fhat) {
    Signal1D out = fhat;
    run_1d(out.samples.data(), fhat.size(), FFTW_BACKWARD);
    const double s = 1.0 / fhat.size();
    for (auto& v : out.samples) v *= s;
    return out;
}

Signal2D dft(const Signal2D& f) {
    Signal2D out = f;
    run_2d(out.samples.data(), f.size(), FFTW_FORWARD);
    return out;
}

Signal2D idft(const Signal2D& fhat) {
    Signal2D out = fhat;
    run_2d(out.samples.data(), fhat.size(), FFTW_BACKWARD);
    const double s = 1.0 / (static_cast<double>(fhat.size()) * fhat.size());
    for (auto& v : out.samples) v *= s;
    return out;
}

Signal2D dft_axis(const Signal2D& f, int axis) { return transform_axis(f, axis, FFTW_FORWARD, false); }
Signal2D idft_axis(const Signal2D& fhat, int axis) { return transform_axis(fhat, axis, FFTW_BACKWARD, true); }

// ---- norms ----

namespace {
void check_p(double p) {
    if (!(p > 0.0)) fail(ErrorCode::domain, "exponent p must be positive");
}
}  // namespace

double lp_norm(const std::vector<cplx>& v, double p) {
    check_p(p);
    if (v.empty()) return 0.0;
    if (p == kInf) {
        double m = 0.0;
        for (const auto& z : v) m = std::max(m, std::abs(z));
        return m;
    }
    double s = 0.0;
    for (const auto& z : v) s += std::pow(std::abs(z), p);
    return std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

double lp_norm(const Signal1D& f, double p) { return lp_norm(f.samples, p); }
double lp_norm(const Signal2D& f, double p) { return lp_norm(f.samples, p); }

double mixed_norm(const Signal2D& f, double p1, double p2) {
    check_p(p1);
    check_p(p2);
    const int n = f.size();
    std::vector<cplx> inner(n);
    std::vector<cplx> row(n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) row[y] = f.at(x, y);
        inner[x] = lp_norm(row, p2);
    }
    return lp_norm(inner, p1);
}

namespace {

std::vector<double> aggregate(const SignalFamily& fam, const std::vector<double>& rs, std::size_t level) {
    if (fam.length() == 0) fail(ErrorCode::precondition, "empty signal family");
    if (level >= rs.size()) fail(ErrorCode::precondition, "family nesting deeper than exponent list");
    const double r = rs[level];
    if (!(r >= 1.0)) fail(ErrorCode::domain, "family exponent r must be in [1, inf]");
    const int n = fam.grid().size();
    std::vector<double> acc(n, 0.0);
    auto add = [&](const std::vector<double>& mag) {
        for (int i = 0; i < n; ++i) {
            if (r == kInf) acc[i] = std::max(acc[i], mag[i]);
            else acc[i] += std::pow(mag[i], r);
        }
    };
    if (fam.nested()) {
        for (const auto& c : fam.children) {
            require_same_grid(c.grid(), fam.grid(), "lr_family_norm");
            add(aggregate(c, rs, level + 1));
        }
    } else {
        std::vector<double> mag(n);
        for (const auto& m : fam.members) {
            require_same_grid(m.grid, fam.grid(), "lr_family_norm");
            for (int i = 0; i < n; ++i) mag[i] = std::abs(m.samples[i]);
            add(mag);
        }
    }
    if (r != kInf)
        for (auto& v : acc) v = std::pow(v, 1.0 / r);
    return acc;
}

}  // namespace

Signal1D lr_family_norm(const SignalFamily& fam, const std::vector<double>& rs) {
    if (static_cast<int>(rs.size()) < fam.depth()) fail(ErrorCode::precondition, "missing exponent for nested family");
    auto acc = aggregate(fam, rs, 0);
    Signal1D out(fam.grid());
    for (std::size_t i = 0; i < acc.size(); ++i) out.samples[i] = acc[i];
    return out;
}

Signal1D lr_family_norm(const SignalFamily& fam, double r) {
    return lr_family_norm(fam, std::vector<double>(static_cast<std::size_t>(fam.depth()), r));
}

double lr_family_norm_value(const SignalFamily& fam, double r) { return lp_norm(lr_family_norm(fam, r), r); }

// ---- file formats ----

namespace {

void check_header(int n, int axes) {
    if (!is_pow2(n) || n < 8) fail(ErrorCode::io, "signal file: N must be a power of two >= 8");
    if (axes != 1 && axes != 2) fail(ErrorCode::io, "signal file: axes must be 1 or 2");
}

std::size_t expected_count(int n, int axes) {
    return axes == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write " + path);
    out << bytes;
    if (!out) fail(ErrorCode::io, "write failed for " + path);
}

}  // namespace

std::string signal_to_csv(const SignalFile& s) {
    check_header(s.n, s.axes);
    if (s.samples.size() != expected_count(s.n, s.axes)) fail(ErrorCode::io, "signal file: sample count mismatch");
    std::ostringstream out;
    out.precision(17);
    out << "# N=" << s.n << " axes=" << s.axes << "\nre,im\n";
    for (const auto& z : s.samples) out << z.real() << ',' << z.imag() << '\n';
    return out.str();
}

SignalFile signal_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    SignalFile s;
    if (!std::getline(in, line) || std::sscanf(line.c_str(), "# N=%d axes=%d", &s.n, &s.axes) != 2)
        fail(ErrorCode::io, "signal csv: missing '# N=<int> axes=<1|2>' line");
    check_header(s.n, s.axes);
    if (!std::getline(in, line) || line.rfind("re,im", 0) != 0) fail(ErrorCode::io, "signal csv: missing re,im header");
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) fail(ErrorCode::io, "signal csv: malformed row");
        try {
            s.samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            fail(ErrorCode::io, "signal csv: malformed number");
        }
    }
    if (s.samples.size() != expected_count(s.n, s.axes)) fail(ErrorCode::io, "signal csv: sample count mismatch");
    return s;
}

void write_signal_csv(const SignalFile& s, const std::string& path) { dump(path, signal_to_csv(s)); }

void write_signal_binary(const SignalFile& s, const std::string& path) {
    check_header(s.n, s.axes);
    if (s.samples.size() != expected_count(s.n, s.axes)) fail(ErrorCode::io, "signal file: sample count mismatch");
    std::string bytes = "HTF1";
    put_u32(bytes, static_cast<std::uint32_t>(s.n));
    put_u32(bytes, static_cast<std::uint32_t>(s.axes));
    put_u32(bytes, 0);
    for (const auto& z : s.samples) {
        put_f64(bytes, z.real());
        put_f64(bytes, z.imag());
    }
    dump(path, bytes);
}

SignalFile read_signal_file(const std::string& path) {
    std::string bytes = slurp(path);
    if (bytes.size() >= 4 && bytes.compare(0, 4, "HTF1") == 0) {
        if (bytes.size() < 16) fail(ErrorCode::io, "signal binary: truncated header");
        const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
        SignalFile s;
        s.n = static_cast<int>(get_u32(p + 4));
        s.axes = static_cast<int>(get_u32(p + 8));
        check_header(s.n, s.axes);
        std::size_t count = expected_count(s.n, s.axes);
        if (bytes.size() != 16 + 16 * count) fail(ErrorCode::io, "signal binary: payload size mismatch");
        s.samples.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            s.samples[i] = cplx(get_f64(p + 16 + 16 * i), get_f64(p + 24 + 16 * i));
        return s;
    }
    return signal_from_csv(bytes);
}

}  // namespace htf
