// segwave: command-line front end for the competition front solvers.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segwave/error.hpp"
#include "segwave/frontsim.hpp"
#include "segwave/halfline.hpp"
#include "segwave/limit_speed.hpp"
#include "segwave/sweep.hpp"
#include "segwave/wave.hpp"

using namespace segwave;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Output target: the --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) : path_(path) {
        if (path_.empty()) return;
        file_.open(path_, std::ios::binary | std::ios::trunc);
        require(file_.good(), ErrorKind::IoError, "cannot open " + path_ + " for writing");
    }
    std::ostream& out() { return path_.empty() ? std::cout : file_; }
    void close() {
        out().flush();
        require(out().good(), ErrorKind::IoError, "write failed for " + (path_.empty() ? "stdout" : path_));
    }

private:
    std::string path_;
    std::ofstream file_;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), ErrorKind::IoError, "cannot read config " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::string> json_strings(const nlohmann::json& j) {
    std::vector<std::string> out;
    auto one = [&](const nlohmann::json& x) {
        if (x.is_string()) out.push_back(x.get<std::string>());
        else if (x.is_number_float()) out.push_back(num(x.get<double>()));
        else out.push_back(x.dump());
    };
    if (j.is_array()) {
        for (const auto& x : j) one(x);
    } else {
        one(j);
    }
    return out;
}

// Options left unset on the command line take their value from the config
// object. Keys are the long option names with '-' replaced by '_'.
void fill_from_config(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidArgument, "bad JSON in " + path + ": " + e.what());
    }
    require(j.is_object(), ErrorKind::InvalidArgument, "config " + path + " must hold a JSON object");
    for (CLI::Option* opt : sub.get_options()) {
        if (opt->count() > 0) continue;
        std::vector<std::string> keys;
        for (std::string name : opt->get_lnames()) {
            for (char& ch : name)
                if (ch == '-') ch = '_';
            keys.push_back(name);
        }
        if (opt->check_lname("out")) keys.push_back("output_path");
        for (const auto& key : keys) {
            if (key == "config" || !j.contains(key)) continue;
            opt->add_result(json_strings(j.at(key)));
            opt->run_callback();
            break;
        }
    }
}

void need(const CLI::Option* opt) {
    require(opt->count() > 0, ErrorKind::InvalidArgument, "missing " + opt->get_name());
}

struct Common {
    std::string config;
    std::string out;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "JSON file with option values");
    sub->add_option("--out", c.out, "output path (default stdout)");
    sub->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Travelling fronts of strongly competing species"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sweep::tool_version());
    Common common;

    // gamma
    auto* g = app.add_subcommand("gamma", "slope at 0 of the half-line logistic profile");
    add_common(g, common);
    double g_c = 0.0, g_from = -1.9, g_to = 2.0;
    halfline::GammaOptions g_opts;
    int g_steps = 40;
    bool g_table = false;
    auto* g_c_opt = g->add_option("--c", g_c, "drift, > -2");
    g->add_option("--length", g_opts.length, "half-line length");
    g->add_option("--tol", g_opts.tube_tol, "tube width around the saturated state");
    g->add_flag("--table", g_table, "tabulate over [from, to]");
    g->add_option("--from", g_from);
    g->add_option("--to", g_to);
    g->add_option("--steps", g_steps, "intervals in the table");

    // limit-speed
    auto* ls = app.add_subcommand("limit-speed", "speed of the segregated limit front");
    add_common(ls, common);
    limit::LimitParams lp;
    limit::LimitOptions lo;
    std::string ls_profiles;
    auto* ls_alpha = ls->add_option("--alpha", lp.alpha);
    auto* ls_r = ls->add_option("--r", lp.r);
    auto* ls_d = ls->add_option("--d", lp.d);
    ls->add_option("--ctol", lo.c_tol, "speed tolerance");
    ls->add_option("--profiles", ls_profiles, "write xi,u,v of the limit profiles");

    // wave
    auto* wv = app.add_subcommand("wave", "travelling wave at finite competition");
    add_common(wv, common);
    wave::SystemParams wp{};
    std::string wv_norm = "cross";
    bool wv_continue = false;
    std::vector<double> wv_ks;
    auto* wv_k = wv->add_option("--k", wp.k);
    auto* wv_alpha = wv->add_option("--alpha", wp.alpha);
    auto* wv_r = wv->add_option("--r", wp.r);
    auto* wv_d = wv->add_option("--d", wp.d);
    wv->add_option("--norm", wv_norm, "cross, uhalf or vhalf");
    wv->add_flag("--continue", wv_continue, "continuation in k");
    wv->add_option("--ks", wv_ks, "k schedule, e.g. 10,100,1000")->delimiter(',');

    // pde
    auto* pd = app.add_subcommand("pde", "direct simulation from step data");
    add_common(pd, common);
    wave::SystemParams pp{};
    double pd_tend = 0.0, pd_dx = 0.1;
    pde::FrontOptions pd_opts;
    std::vector<std::string> pd_snap;
    auto* pd_k = pd->add_option("--k", pp.k);
    auto* pd_alpha = pd->add_option("--alpha", pp.alpha);
    auto* pd_r = pd->add_option("--r", pp.r);
    auto* pd_d = pd->add_option("--d", pp.d);
    auto* pd_t = pd->add_option("--tend", pd_tend);
    pd->add_option("--dx", pd_dx);
    pd->add_option("--dt", pd_opts.dt);
    pd->add_option("--snapshot-every", pd_snap, "interval and CSV path")->expected(2);

    // sweep
    auto* sw = app.add_subcommand("sweep", "limit speed over a range of diffusion ratios");
    add_common(sw, common);
    sweep::SweepSpec spec;
    double sw_dmin = 0.1, sw_dmax = 10.0;
    std::size_t sw_points = 41;
    sw->add_option("--alpha", spec.alpha);
    sw->add_option("--r", spec.r);
    sw->add_option("--d-grid", spec.d_grid, "explicit d values")->delimiter(',');
    sw->add_option("--d-min", sw_dmin, "geometric grid lower end");
    sw->add_option("--d-max", sw_dmax, "geometric grid upper end");
    sw->add_option("--d-points", sw_points, "geometric grid size");
    sw->add_option("--k-list,--ks", spec.k_list, "finite k columns")->delimiter(',');
    bool sw_progress = false;
    sw->add_flag("--progress", sw_progress, "report progress on stderr");

    // rescale
    auto* rs = app.add_subcommand("rescale", "dimensional parameters to (k, alpha, d, r)");
    add_common(rs, common);
    sweep::RawEcologicalParams raw;
    for (auto [name, field] : {std::pair{"--d1", &raw.d1}, {"--d2", &raw.d2}, {"--r1", &raw.r1},
                               {"--r2", &raw.r2}, {"--a1", &raw.a1}, {"--a2", &raw.a2},
                               {"--k1", &raw.k1}, {"--k2", &raw.k2}})
        rs->add_option(name, *field);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        fill_from_config(*sub, common.config);

        if (sub == g) {
            Sink sink(common.out);
            if (g_table) {
                require(g_steps >= 1 && g_to > g_from, ErrorKind::InvalidArgument,
                        "table needs from < to and steps >= 1");
                halfline::GammaCache cache(g_opts);
                sink.out() << "c,gamma\n";
                for (int i = 0; i <= g_steps; ++i) {
                    const double c = g_from + (g_to - g_from) * i / g_steps;
                    sink.out() << num(c) << ',' << num(cache.gamma(c)) << '\n';
                }
            } else {
                need(g_c_opt);
                sink.out() << num(halfline::gamma(g_c, g_opts)) << '\n';
            }
            sink.close();
        } else if (sub == ls) {
            for (auto* o : {ls_alpha, ls_r, ls_d}) need(o);
            const auto verdict = limit::classify_invader(lp, lo);
            Sink sink(common.out);
            sink.out() << "c_inf=" << num(verdict.c) << " verdict=" << limit::to_string(verdict.tag)
                       << " threshold=" << num(verdict.threshold) << '\n';
            sink.close();
            if (!ls_profiles.empty()) {
                const auto lw = limit::build_limit_profiles(lp, verdict.c, lo);
                Sink prof(ls_profiles);
                prof.out() << "xi,u,v\n";
                for (double xi : lw.u_profile.grid().nodes())
                    prof.out() << num(xi) << ',' << num(lw.u(xi)) << ',' << num(lw.v(xi)) << '\n';
                bool first = true;
                for (double xi : lw.v_profile.grid().nodes()) {
                    if (first && xi == 0.0) {
                        first = false;
                        continue;
                    }
                    prof.out() << num(xi) << ',' << num(lw.u(xi)) << ',' << num(lw.v(xi)) << '\n';
                }
                prof.close();
            }
        } else if (sub == wv) {
            for (auto* o : {wv_alpha, wv_r, wv_d}) need(o);
            const auto norm = wave::parse_normalization(wv_norm);
            Sink sink(common.out);
            if (wv_continue) {
                require(!wv_ks.empty(), ErrorKind::InvalidArgument, "--continue needs --ks");
                wave::SystemParams base = wp;
                base.k = wv_ks.front();
                const auto rep = wave::continue_in_k(base, wv_ks, norm);
                sink.out() << "k,c_k,segregation,abs(c_k-c_inf)\n";
                for (std::size_t i = 0; i < rep.k_values.size(); ++i)
                    sink.out() << num(rep.k_values[i]) << ',' << num(rep.c_values[i]) << ','
                               << num(rep.segregation_values[i]) << ','
                               << num(std::abs(rep.c_values[i] - rep.c_limit)) << '\n';
            } else {
                need(wv_k);
                const auto w = wave::solve_wave(wp, norm);
                sink.out() << "# c=" << num(w.c) << " residual=" << num(w.residual_norm) << '\n';
                sink.out() << "xi,u,v\n";
                const auto x = w.mesh.nodes();
                for (std::size_t i = 0; i < x.size(); ++i)
                    sink.out() << num(x[i]) << ',' << num(w.u[i]) << ',' << num(w.v[i]) << '\n';
            }
            sink.close();
        } else if (sub == pd) {
            for (auto* o : {pd_k, pd_alpha, pd_r, pd_d, pd_t}) need(o);
            require(pd_dx > 0.0 && pd_dx <= 1.0, ErrorKind::InvalidArgument, "--dx must lie in (0, 1]");
            const auto n = static_cast<std::size_t>(std::llround(400.0 / pd_dx)) + 1;
            const Grid1D grid(-200.0, 200.0, n);
            std::optional<Sink> snap;
            double snap_every = 0.0, next_snap = 0.0;
            if (!pd_snap.empty()) {
                try {
                    snap_every = std::stod(pd_snap[0]);
                } catch (const std::exception&) {
                    fail(ErrorKind::InvalidArgument, "bad snapshot interval " + pd_snap[0]);
                }
                require(snap_every > 0.0, ErrorKind::InvalidArgument, "snapshot interval must be positive");
                snap.emplace(pd_snap[1]);
                snap->out() << "t,xi,u,v\n";
                pd_opts.on_sample = [&](const pde::PdeState& s) {
                    if (s.time + 1e-9 < next_snap) return;
                    next_snap += snap_every;
                    for (std::size_t i = 0; i < s.u.size(); ++i)
                        snap->out() << num(s.time) << ',' << num(s.grid.at(i)) << ',' << num(s.u[i])
                                    << ',' << num(s.v[i]) << '\n';
                };
            }
            const auto est = pde::measure_front_speed(pde::step_state(grid, true, true), pp, pd_tend,
                                                      0.5, pd_opts);
            if (snap) snap->close();
            Sink sink(common.out);
            sink.out() << "speed=" << num(est.fitted_speed) << " residual=" << num(est.fit_residual)
                       << '\n';
            sink.close();
        } else if (sub == sw) {
            sweep::SweepSpec merged = spec;
            merged.output_path = common.out;
            merged.threads = common.threads;
            if (merged.d_grid.empty()) merged.d_grid = sweep::geometric_grid(sw_dmin, sw_dmax, sw_points);
            sweep::SweepOptions so;
            if (sw_progress)
                so.on_progress = [](std::size_t done, std::size_t total) {
                    std::cerr << "sweep: " << done << '/' << total << '\n';
                };
            const auto curve = sweep::run_sweep(merged, so);
            if (merged.output_path.empty()) {
                std::cout << sweep::format_csv(curve);
                std::cerr << sweep::format_sidecar(curve);
            } else {
                sweep::emit_report(curve, merged.output_path);
            }
        } else if (sub == rs) {
            const auto s = sweep::rescale_parameters(raw);
            Sink sink(common.out);
            sink.out() << "k=" << num(s.k) << " alpha=" << num(s.alpha) << " d=" << num(s.d)
                       << " r=" << num(s.r) << '\n';
            sink.close();
        }
    } catch (const Error& e) {
        std::cerr << "segwave: " << e.what() << '\n';
        return is_validation_error(e.kind()) ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "segwave: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
