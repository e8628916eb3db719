#include "segwave/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "segwave/core/roots.hpp"
#include "segwave/error.hpp"

namespace segwave::sweep {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kMaxContinuationFactor = 10.0;
constexpr double kContinuationStart = 10.0;

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string clean_note(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ch == ',' ? ';' : ' ';
    return s;
}

void append_note(std::string& notes, const std::string& what) {
    if (!notes.empty()) notes += " | ";
    notes += clean_note(what);
}

// Every requested k, preceded by geometric steps so that consecutive
// values differ by at most a factor of 10 and the chain starts at k <= 10.
std::vector<double> warm_start_chain(const std::vector<double>& targets) {
    std::vector<double> chain;
    double last = std::min(kContinuationStart, targets.front());
    chain.push_back(last);
    for (double k : targets) {
        if (k <= last) continue;
        const int pieces = static_cast<int>(std::ceil(std::log(k / last) / std::log(kMaxContinuationFactor) - 1e-12));
        const double step = std::pow(k / last, 1.0 / std::max(1, pieces));
        for (int i = 1; i < pieces; ++i) chain.push_back(last * std::pow(step, i));
        chain.push_back(k);
        last = k;
    }
    return chain;
}

// Speeds at the requested k for one d. A failed step leaves its cell empty
// and the chain carries on from the last converged wave.
std::vector<std::optional<double>> finite_k_column(const SpeedCurve& curve, double d,
                                                   const SweepOptions& o, std::string& notes) {
    std::vector<std::optional<double>> out(curve.k_list.size());
    const std::vector<double> chain = warm_start_chain(curve.k_list);
    std::optional<wave::TravellingWave> prev;
    for (double k : chain) {
        const wave::SystemParams p{k, curve.alpha, curve.r, d};
        const auto it = std::find(curve.k_list.begin(), curve.k_list.end(), k);
        try {
            const wave::WaveMesh mesh = wave::WaveMesh::for_params(p);
            const wave::TravellingWave seed = prev ? wave::resample(*prev, mesh, p) : wave::seed_logistic(p, mesh);
            prev = wave::solve_wave(p, seed, wave::Normalization::Cross, o.wave);
            if (it != curve.k_list.end()) out[static_cast<std::size_t>(it - curve.k_list.begin())] = prev->c;
        } catch (const Error& e) {
            append_note(notes, "k=" + format_number(k) + ": " + e.what());
        }
    }
    return out;
}

double c_sign_value(double alpha, double r, double d, const limit::LimitOptions& o) {
    return limit::solve_limit_speed({alpha, r, d}, o);
}

}  // namespace

const char* tool_version() noexcept {
#ifdef SEGWAVE_VERSION
    return SEGWAVE_VERSION;
#else
    return "0.0.0";
#endif
}

Rescaled rescale_parameters(const RawEcologicalParams& p) {
    for (double x : {p.d1, p.d2, p.r1, p.r2, p.a1, p.a2, p.k1, p.k2})
        require(std::isfinite(x) && x > 0.0, ErrorKind::InvalidArgument,
                "ecological parameters must be positive and finite");
    const double stronger = p.k2 * p.a2 / (p.r2 * p.r2);
    const double weaker = p.k1 * p.a1 / (p.r1 * p.r1);
    require(stronger >= weaker, ErrorKind::AssumptionViolation,
            "need k2 a2 / r2^2 >= k1 a1 / r1^2 (got " + format_number(stronger) + " < " +
                format_number(weaker) + "); swap the species labels");
    return {p.k1 * p.r2 / (p.a2 * p.r1), p.k2 * p.a2 * p.r1 / (p.k1 * p.a1 * p.r2), p.d2 / p.d1,
            p.r2 / p.r1};
}

void SweepSpec::validate() const {
    limit::LimitParams{alpha, r, 1.0}.validate();
    require(!d_grid.empty(), ErrorKind::InvalidArgument, "d_grid is empty");
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        require(std::isfinite(d_grid[i]) && d_grid[i] > 0.0, ErrorKind::InvalidArgument,
                "d_grid values must be positive");
        if (i > 0)
            require(d_grid[i] > d_grid[i - 1], ErrorKind::InvalidArgument,
                    "d_grid must be strictly increasing");
    }
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        require(std::isfinite(k_list[i]) && k_list[i] > 1.0, ErrorKind::InvalidArgument,
                "k_list values must exceed 1");
        if (i > 0)
            require(k_list[i] > k_list[i - 1], ErrorKind::InvalidArgument,
                    "k_list must be strictly increasing");
    }
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo && n >= 2, ErrorKind::InvalidArgument,
            "geometric grid needs 0 < lo < hi and at least two points");
    std::vector<double> g(n);
    const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

double locate_sign_change(double alpha, double r, double d_lo, double d_hi, const SweepOptions& o) {
    const auto f = [&](double d) { return c_sign_value(alpha, r, d, o.limit); };
    const RootBracket b = make_bracket(f, d_lo, d_hi);
    require(b.valid(), ErrorKind::NoSignChange, "c_inf keeps its sign on [" + format_number(d_lo) +
                                                    ", " + format_number(d_hi) + "]");
    return bisect_root(f, b, BisectOptions{o.d_tol, 0.0, 200});
}

SpeedCurve run_sweep(const SweepSpec& spec, const SweepOptions& options) {
    spec.validate();
    SweepOptions o = options;
    halfline::GammaCache cache(o.limit.gamma);
    if (!o.limit.cache) o.limit.cache = &cache;

    SpeedCurve curve;
    curve.alpha = spec.alpha;
    curve.r = spec.r;
    curve.d_values = spec.d_grid;
    curve.k_list = spec.k_list;
    curve.predicted_threshold = spec.alpha * spec.alpha / spec.r;
    const std::size_t n = spec.d_grid.size();
    curve.c_inf.assign(n, std::nullopt);
    curve.c_k.assign(spec.k_list.size(), std::vector<std::optional<double>>(n));
    curve.diagnostics.assign(n, std::string());

    // Each row is written by exactly one worker, so the result does not
    // depend on the thread count or scheduling.
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex progress_mutex;
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            const double d = spec.d_grid[i];
            std::string notes;
            try {
                curve.c_inf[i] = c_sign_value(spec.alpha, spec.r, d, o.limit);
            } catch (const Error& e) {
                append_note(notes, std::string("c_inf: ") + e.what());
            }
            if (!spec.k_list.empty()) {
                const auto col = finite_k_column(curve, d, o, notes);
                for (std::size_t j = 0; j < col.size(); ++j) curve.c_k[j][i] = col[j];
            }
            curve.diagnostics[i] = std::move(notes);
            if (o.on_progress) {
                std::lock_guard lock(progress_mutex);
                o.on_progress(++done, n);
            }
        }
    };
    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // c_inf decreases in d; refine the first bracketing pair of grid cells.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!curve.c_inf[i] || !curve.c_inf[i + 1]) continue;
        const double a = *curve.c_inf[i];
        const double b = *curve.c_inf[i + 1];
        if (a == 0.0) {
            curve.sign_change_d = spec.d_grid[i];
            break;
        }
        if ((a > 0.0) != (b > 0.0) || b == 0.0) {
            try {
                curve.sign_change_d = locate_sign_change(spec.alpha, spec.r, spec.d_grid[i],
                                                         spec.d_grid[i + 1], o);
            } catch (const Error& e) {
                append_note(curve.diagnostics[i], std::string("sign change: ") + e.what());
            }
            break;
        }
    }
    return curve;
}

std::string format_csv(const SpeedCurve& c) {
    const bool with_notes = std::any_of(c.diagnostics.begin(), c.diagnostics.end(),
                                        [](const std::string& s) { return !s.empty(); });
    std::string out = "d,c_inf";
    for (double k : c.k_list) out += ",c_k_" + format_number(k);
    if (with_notes) out += ",diagnostics";
    out += '\n';
    for (std::size_t i = 0; i < c.d_values.size(); ++i) {
        out += format_number(c.d_values[i]);
        out += ',';
        if (i < c.c_inf.size() && c.c_inf[i]) out += format_number(*c.c_inf[i]);
        for (const auto& col : c.c_k) {
            out += ',';
            if (i < col.size() && col[i]) out += format_number(*col[i]);
        }
        if (with_notes) {
            out += ',';
            if (i < c.diagnostics.size()) out += clean_note(c.diagnostics[i]);
        }
        out += '\n';
    }
    return out;
}

std::string format_sidecar(const SpeedCurve& c) {
    ordered_json j;
    j["alpha"] = c.alpha;
    j["r"] = c.r;
    j["threshold"] = c.predicted_threshold;
    j["sign_change_d"] = c.sign_change_d ? json(*c.sign_change_d) : json(nullptr);
    j["tool_version"] = tool_version();
    return j.dump(2) + "\n";
}

std::string sidecar_path(const std::string& csv_path) {
    const auto slash = csv_path.find_last_of('/');
    const auto dot = csv_path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash) && dot > 0 &&
        (slash == std::string::npos || dot > slash + 1))
        return csv_path.substr(0, dot) + ".json";
    return csv_path + ".json";
}

void emit_report(const SpeedCurve& curve, const std::string& path) {
    auto write = [](const std::string& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        require(f.good(), ErrorKind::IoError, "cannot open " + p + " for writing");
        f << text;
        f.flush();
        require(f.good(), ErrorKind::IoError, "write failed for " + p);
    };
    write(path, format_csv(curve));
    write(sidecar_path(path), format_sidecar(curve));
}

SpeedCurve parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::InvalidArgument, "empty report");
    auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ',') {
                f.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        return f;
    };
    const auto header = split(line);
    require(header.size() >= 2 && header[0] == "d" && header[1] == "c_inf", ErrorKind::InvalidArgument,
            "report header must start with d,c_inf");
    SpeedCurve c;
    std::size_t k_columns = 0;
    for (std::size_t i = 2; i < header.size() && header[i].rfind("c_k_", 0) == 0; ++i) {
        c.k_list.push_back(std::stod(header[i].substr(4)));
        ++k_columns;
    }
    const bool with_notes = header.size() > 2 + k_columns;
    c.c_k.assign(k_columns, {});
    auto cell = [](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return std::stod(s);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        require(f.size() == header.size(), ErrorKind::InvalidArgument, "ragged report row: " + line);
        c.d_values.push_back(std::stod(f[0]));
        c.c_inf.push_back(cell(f[1]));
        for (std::size_t j = 0; j < k_columns; ++j) c.c_k[j].push_back(cell(f[2 + j]));
        c.diagnostics.push_back(with_notes ? f.back() : std::string());
    }
    return c;
}

namespace {

json parse_object(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("bad JSON config: ") + e.what());
    }
    require(j.is_object(), ErrorKind::InvalidArgument, "JSON config must be an object");
    return j;
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("config field '") + key + "': " + e.what());
    }
}

}  // namespace

void apply_json(std::string_view text, SweepSpec& s) {
    const json j = parse_object(text);
    read_field(j, "alpha", s.alpha);
    read_field(j, "r", s.r);
    read_field(j, "d_grid", s.d_grid);
    read_field(j, "k_list", s.k_list);
    read_field(j, "output_path", s.output_path);
    read_field(j, "threads", s.threads);
}

void apply_json(std::string_view text, RawEcologicalParams& p) {
    const json j = parse_object(text);
    read_field(j, "d1", p.d1);
    read_field(j, "d2", p.d2);
    read_field(j, "r1", p.r1);
    read_field(j, "r2", p.r2);
    read_field(j, "a1", p.a1);
    read_field(j, "a2", p.a2);
    read_field(j, "k1", p.k1);
    read_field(j, "k2", p.k2);
}

}  // namespace segwave::sweep
