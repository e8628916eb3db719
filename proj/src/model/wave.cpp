#include "segwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segwave/core/grid.hpp"
#include "segwave/core/tridiagonal.hpp"
#include "segwave/error.hpp"
#include "segwave/simd/kernels.hpp"

namespace segwave::wave {
namespace {

constexpr double kGradedFromK = 1e3;
constexpr double kGrading = 4.0;
constexpr double kPhaseTolerance = 1e-10;
// Far tails underflow, where strict monotonicity is meaningless.
constexpr double kShapeSlack = 1e-12;

std::size_t even_ceil(double x) {
    auto n = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return n + (n % 2);
}

double phase_residual(Normalization n, double um, double vm) {
    switch (n) {
        case Normalization::UHalf: return um - 0.5;
        case Normalization::VHalf: return vm - 0.5;
        case Normalization::Cross: return um - vm;
    }
    return 0.0;
}

simd::WaveCoefficients coefficients(const SystemParams& p, double c) {
    return {c, p.k, p.alpha, p.r, p.d};
}

void residual_into(const TravellingWave& w, std::vector<double>& out) {
    const std::size_t n = w.mesh.size();
    out.assign(2 * n + 1, 0.0);
    simd::kernels().wave_residual(w.u.data(), w.v.data(), n,
                                  {w.mesh.p().data(), w.mesh.q().data(), w.mesh.w().data()},
                                  coefficients(w.params, w.c), out.data() + 1, out.data() + n + 1);
    out[0] = w.u.front() - 1.0;
    out[n - 1] = w.u.back();
    out[n] = w.v.front();
    out[2 * n - 1] = w.v.back() - 1.0;
    const std::size_t m = w.mesh.center();
    out[2 * n] = phase_residual(w.normalization, w.u[m], w.v[m]);
}

double inf_norm(const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

double l2_norm(const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
}

// Newton correction. Every node carries its own copy of c tied to its
// neighbours, so the Jacobian is block tridiagonal with 3x3 blocks:
// rows (u equation, v equation, c link), unknowns (u, v, c).
void newton_direction(const TravellingWave& w, const std::vector<double>& res,
                      std::vector<double>& du, std::vector<double>& dv, double& dc) {
    using B3 = Block<3>;
    const std::size_t n = w.mesh.size();
    const std::size_t m = w.mesh.center();
    const SystemParams& sp = w.params;
    const double c = w.c;
    std::vector<B3> sub(n - 1, B3{}), diag(n, B3{}), sup(n - 1, B3{});
    std::vector<BlockVector<3>> rhs(n, BlockVector<3>{});

    for (std::size_t i = 0; i < n; ++i) {
        B3& D = diag[i];
        if (i == 0 || i == n - 1) {
            D[0] = 1.0;
            D[4] = 1.0;
        } else {
            const std::size_t j = i - 1;
            const double p = w.mesh.p()[j], q = w.mesh.q()[j], ww = w.mesh.w()[j];
            const double u = w.u[i], v = w.v[i];
            B3& L = sub[i - 1];
            B3& U = sup[i];
            L[0] = p + ww - c * q;
            U[0] = p - ww + c * q;
            D[0] = -2.0 * p + 1.0 - 2.0 * u - sp.k * v;
            D[1] = -sp.k * u;
            D[2] = q * (w.u[i + 1] - w.u[i - 1]);
            L[4] = sp.d * (p + ww) - c * q;
            U[4] = sp.d * (p - ww) + c * q;
            D[3] = -sp.alpha * sp.k * v;
            D[4] = -2.0 * sp.d * p + sp.r * (1.0 - 2.0 * v) - sp.alpha * sp.k * u;
            D[5] = q * (w.v[i + 1] - w.v[i - 1]);
        }
        if (i < m) {
            D[8] = -1.0;
            sup[i][8] = 1.0;
        } else if (i > m) {
            D[8] = 1.0;
            sub[i - 1][8] = -1.0;
        } else {
            switch (w.normalization) {
                case Normalization::UHalf: D[6] = 1.0; break;
                case Normalization::VHalf: D[7] = 1.0; break;
                case Normalization::Cross:
                    D[6] = 1.0;
                    D[7] = -1.0;
                    break;
            }
        }
        rhs[i][0] = -res[i];
        rhs[i][1] = -res[n + i];
        rhs[i][2] = i == m ? -res[2 * n] : 0.0;
    }
    const auto x = solve_block_tridiagonal<3>(sub, diag, sup, rhs);
    du.resize(n);
    dv.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        du[i] = x[i][0];
        dv[i] = x[i][1];
    }
    dc = x[m][2];
}

void check_shape(const TravellingWave& w) {
    const std::size_t n = w.mesh.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (w.u[i] > w.u[i - 1] + kShapeSlack || w.v[i] < w.v[i - 1] - kShapeSlack)
            fail(ErrorKind::MonotonicityViolation,
                 "converged wave is not monotone near xi=" + std::to_string(w.mesh.nodes()[i]) +
                     "; refine the mesh");
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (w.u[i] < -kShapeSlack || w.u[i] > 1.0 + kShapeSlack || w.v[i] < -kShapeSlack ||
            w.v[i] > 1.0 + kShapeSlack)
            fail(ErrorKind::MonotonicityViolation,
                 "converged wave leaves [0, 1] near xi=" + std::to_string(w.mesh.nodes()[i]));
    }
    const double lo = w.params.min_speed();
    if (!(w.c > lo && w.c < SystemParams::max_speed()))
        fail(ErrorKind::NoConvergence, "converged speed " + std::to_string(w.c) +
                                           " lies outside (" + std::to_string(lo) + ", 2)");
}

}  // namespace

void SystemParams::validate() const {
    auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
    require(std::isfinite(k) && k > 1.0, ErrorKind::InvalidArgument,
            "competition strength k must exceed 1 (k=" + std::to_string(k) + ")");
    limit().validate();
    require(ok(alpha) && ok(r) && ok(d), ErrorKind::InvalidArgument, "invalid system parameters");
}

double SystemParams::min_speed() const { return -2.0 * std::sqrt(r * d); }

const char* to_string(Normalization n) noexcept {
    switch (n) {
        case Normalization::UHalf: return "uhalf";
        case Normalization::VHalf: return "vhalf";
        case Normalization::Cross: return "cross";
    }
    return "?";
}

Normalization parse_normalization(std::string_view text) {
    if (text == "cross") return Normalization::Cross;
    if (text == "uhalf") return Normalization::UHalf;
    if (text == "vhalf") return Normalization::VHalf;
    fail(ErrorKind::InvalidArgument, "unknown normalization '" + std::string(text) + "'");
}

WaveMesh::WaveMesh(double half_length, std::size_t intervals, double grading)
    : half_length_(half_length), grading_(grading) {
    require(std::isfinite(half_length) && half_length > 0.0, ErrorKind::InvalidArgument,
            "mesh half-length must be positive");
    require(intervals >= 4 && intervals % 2 == 0, ErrorKind::InvalidArgument,
            "mesh needs an even number of intervals (>= 4)");
    require(grading >= 0.0 && std::isfinite(grading), ErrorKind::InvalidArgument,
            "mesh grading must be non-negative");
    const std::size_t n = intervals + 1;
    const std::size_t half = intervals / 2;
    const double ds = 2.0 / static_cast<double>(intervals);
    x_.resize(n);
    std::vector<double> g1(n), g2(n);
    const double sb = grading > 0.0 ? std::sinh(grading) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Offsets from the center keep the mesh exactly symmetric.
        const double off = static_cast<double>(i) - static_cast<double>(half);
        const double s = off * ds;
        if (grading > 0.0) {
            x_[i] = half_length * std::sinh(grading * s) / sb;
            g1[i] = half_length * grading * std::cosh(grading * s) / sb;
            g2[i] = half_length * grading * grading * std::sinh(grading * s) / sb;
        } else {
            x_[i] = half_length * s;
            g1[i] = half_length;
            g2[i] = 0.0;
        }
    }
    x_[half] = 0.0;
    x_.front() = -half_length;
    x_.back() = half_length;
    p_.resize(n - 2);
    q_.resize(n - 2);
    w_.resize(n - 2);
    for (std::size_t j = 0; j + 2 < n; ++j) {
        const double gp = g1[j + 1];
        p_[j] = 1.0 / ((gp * ds) * (gp * ds));
        q_[j] = 1.0 / (2.0 * gp * ds);
        w_[j] = g2[j + 1] * q_[j] / (gp * gp);
    }
}

WaveMesh WaveMesh::uniform(double half_length, std::size_t intervals) {
    return WaveMesh(half_length, intervals, 0.0);
}

WaveMesh WaveMesh::graded(double half_length, std::size_t intervals, double grading) {
    return WaveMesh(half_length, intervals, grading);
}

double WaveMesh::default_half_length(const SystemParams& params) {
    return std::max(40.0, 40.0 * std::sqrt(params.d / params.r));
}

WaveMesh WaveMesh::for_params(const SystemParams& params, double refine) {
    params.validate();
    require(refine > 0.0, ErrorKind::InvalidArgument, "refinement factor must be positive");
    const double L = default_half_length(params);
    const double sk = std::sqrt(params.k);
    if (params.k < kGradedFromK) {
        const double h = std::min(0.05, 0.2 / sk) / refine;
        return uniform(L, even_ceil(2.0 * L / h));
    }
    const double hc = 0.25 / sk / refine;
    return graded(L, even_ceil(2.0 * L * kGrading / (std::sinh(kGrading) * hc)), kGrading);
}

WaveMesh WaveMesh::refined() const { return WaveMesh(half_length_, 2 * (x_.size() - 1), grading_); }

double WaveMesh::spacing_at(std::size_t i) const {
    if (i + 1 < x_.size()) return x_[i + 1] - x_[i];
    return x_[i] - x_[i - 1];
}

double TravellingWave::u_at(double xi) const { return interpolate_cubic(mesh.nodes(), u, xi); }

double TravellingWave::v_at(double xi) const { return interpolate_cubic(mesh.nodes(), v, xi); }

TravellingWave seed_logistic(const SystemParams& params, const WaveMesh& mesh) {
    TravellingWave w{params, mesh, 0.0, {}, {}, Normalization::Cross, 0.0, 0};
    const auto x = mesh.nodes();
    w.u.resize(x.size());
    w.v.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w.u[i] = 1.0 / (1.0 + std::exp(0.8 * x[i]));
        w.v[i] = 1.0 - w.u[i];
    }
    w.u.front() = 1.0;
    w.u.back() = 0.0;
    w.v.front() = 0.0;
    w.v.back() = 1.0;
    return w;
}

TravellingWave seed_from_limit(const SystemParams& params, const WaveMesh& mesh,
                               const limit::LimitWave& lw) {
    TravellingWave w{params, mesh, lw.c, {}, {}, Normalization::Cross, 0.0, 0};
    const auto x = mesh.nodes();
    w.u.resize(x.size());
    w.v.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w.u[i] = std::clamp(lw.u(x[i]), 0.0, 1.0);
        w.v[i] = std::clamp(lw.v(x[i]), 0.0, 1.0);
    }
    w.u.front() = 1.0;
    w.u.back() = 0.0;
    w.v.front() = 0.0;
    w.v.back() = 1.0;
    return w;
}

TravellingWave resample(const TravellingWave& src, const WaveMesh& mesh, const SystemParams& params) {
    TravellingWave w{params, mesh, src.c, {}, {}, src.normalization, 0.0, 0};
    const auto x = mesh.nodes();
    w.u.resize(x.size());
    w.v.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w.u[i] = std::clamp(src.u_at(x[i]), 0.0, 1.0);
        w.v[i] = std::clamp(src.v_at(x[i]), 0.0, 1.0);
    }
    w.u.front() = 1.0;
    w.u.back() = 0.0;
    w.v.front() = 0.0;
    w.v.back() = 1.0;
    return w;
}

std::vector<double> wave_residual(const TravellingWave& wave) {
    const std::size_t n = wave.mesh.size();
    require(wave.u.size() == n && wave.v.size() == n, ErrorKind::InvalidArgument,
            "wave profiles do not match the mesh");
    std::vector<double> r;
    residual_into(wave, r);
    return r;
}

TravellingWave solve_wave(const SystemParams& params, const TravellingWave& initial,
                          Normalization normalization, const WaveOptions& o) {
    params.validate();
    const std::size_t n = initial.mesh.size();
    require(initial.u.size() == n && initial.v.size() == n, ErrorKind::InvalidArgument,
            "initial wave does not match its mesh");
    TravellingWave w = initial;
    w.params = params;
    w.normalization = normalization;

    std::vector<double> res, trial_res, du, dv;
    residual_into(w, res);
    double merit = l2_norm(res);
    require(std::isfinite(merit), ErrorKind::InvalidArgument, "initial guess has a non-finite residual");
    int stalled = 0;
    for (int it = 0;; ++it) {
        const double norm = inf_norm(res);
        if (norm <= o.tol && std::abs(res[2 * n]) <= kPhaseTolerance) {
            w.residual_norm = norm;
            w.newton_iterations = it;
            break;
        }
        if (it >= o.max_iterations)
            fail(ErrorKind::NewtonStall, "Newton did not converge in " +
                                             std::to_string(o.max_iterations) +
                                             " iterations (residual " + std::to_string(norm) + ")");
        double dc = 0.0;
        newton_direction(w, res, du, dv, dc);

        TravellingWave trial = w;
        double lambda = 1.0;
        double trial_merit = 0.0;
        bool accepted = false;
        for (int h = 0; h <= o.max_halvings; ++h, lambda *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                trial.u[i] = w.u[i] + lambda * du[i];
                trial.v[i] = w.v[i] + lambda * dv[i];
            }
            trial.c = w.c + lambda * dc;
            residual_into(trial, trial_res);
            trial_merit = l2_norm(trial_res);
            if (std::isfinite(trial_merit) && trial_merit <= (1.0 - 1e-4 * lambda) * merit) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            fail(ErrorKind::NewtonStall, "line search failed at residual " + std::to_string(norm));
        stalled = trial_merit > (1.0 - o.stall_fraction) * merit ? stalled + 1 : 0;
        if (stalled >= o.stall_limit)
            fail(ErrorKind::NewtonStall, "residual reduction below " +
                                             std::to_string(100.0 * o.stall_fraction) + "% for " +
                                             std::to_string(o.stall_limit) + " steps");
        w.u.swap(trial.u);
        w.v.swap(trial.v);
        w.c = trial.c;
        res.swap(trial_res);
        merit = trial_merit;
    }
    check_shape(w);
    return w;
}

TravellingWave solve_wave(const SystemParams& params, Normalization normalization,
                          const WaveOptions& options) {
    const WaveMesh mesh = WaveMesh::for_params(params);
    return solve_wave(params, seed_logistic(params, mesh), normalization, options);
}

ContinuationReport continue_in_k(const SystemParams& base, std::span<const double> ks,
                                 Normalization normalization, const WaveOptions& options,
                                 const limit::LimitOptions& limit_options) {
    require(!ks.empty(), ErrorKind::InvalidArgument, "empty k schedule");
    require(ks.front() <= 20.0, ErrorKind::InvalidArgument, "k schedule must start at k <= 20");
    for (std::size_t i = 1; i < ks.size(); ++i)
        require(ks[i] > ks[i - 1] && ks[i] <= 10.0 * ks[i - 1], ErrorKind::InvalidArgument,
                "k schedule must increase by a factor of at most 10 per step");

    ContinuationReport rep;
    rep.c_limit = limit::solve_limit_speed(base.limit(), limit_options);

    auto params_at = [&](double k) {
        SystemParams p = base;
        p.k = k;
        return p;
    };
    auto solve_from = [&](const TravellingWave* prev, double k) {
        const SystemParams p = params_at(k);
        const WaveMesh mesh = WaveMesh::for_params(p);
        const TravellingWave seed = prev ? resample(*prev, mesh, p) : seed_logistic(p, mesh);
        return solve_wave(p, seed, normalization, options);
    };

    for (std::size_t i = 0; i < ks.size(); ++i) {
        const TravellingWave* prev = rep.waves.empty() ? nullptr : &rep.waves.back();
        auto attempt = [&]() {
            try {
                return solve_from(prev, ks[i]);
            } catch (const Error&) {
                if (!prev) throw;
                const TravellingWave mid = solve_from(prev, std::sqrt(prev->params.k * ks[i]));
                return solve_from(&mid, ks[i]);
            }
        };
        TravellingWave next = attempt();
        rep.k_values.push_back(ks[i]);
        rep.c_values.push_back(next.c);
        rep.segregation_values.push_back(segregation_metric(next));
        rep.waves.push_back(std::move(next));
    }
    return rep;
}

double segregation_metric(const TravellingWave& wave) {
    return simd::kernels().max_product(wave.u.data(), wave.v.data(), wave.u.size());
}

double segregation_metric(const limit::LimitWave& wave) {
    double m = 0.0;
    for (double x : wave.u_profile.grid().nodes()) m = std::max(m, wave.u(x) * wave.v(x));
    for (double x : wave.v_profile.grid().nodes()) m = std::max(m, wave.u(x) * wave.v(x));
    return m;
}

double interface_condition_estimate(const TravellingWave& wave) {
    const auto x = wave.mesh.nodes();
    const std::size_t n = x.size();
    const double a = wave.params.alpha, d = wave.params.d;
    // alpha u - d v decreases through zero exactly once on a monotone wave.
    std::size_t i = 1;
    while (i + 2 < n && a * wave.u[i + 1] - d * wave.v[i + 1] > 0.0) ++i;
    auto slope = [&](const std::vector<double>& f, std::size_t j) {
        return wave.mesh.q()[j - 1] * (f[j + 1] - f[j - 1]);
    };
    auto flux = [&](std::size_t j) { return a * slope(wave.u, j) + d * slope(wave.v, j); };
    const double g0 = a * wave.u[i] - d * wave.v[i];
    const double g1 = a * wave.u[i + 1] - d * wave.v[i + 1];
    const double t = g0 == g1 ? 0.0 : std::clamp(g0 / (g0 - g1), 0.0, 1.0);
    if (i + 1 >= n - 1) return flux(i);
    return (1.0 - t) * flux(i) + t * flux(i + 1);
}

double interface_condition_estimate(const limit::LimitWave& wave) { return wave.interface_residual; }

}  // namespace segwave::wave
