#pragma once

// Finite-competition travelling waves
//   u'' + c u' + u(1-u) - k u v = 0,        u(-inf) = 1, u(+inf) = 0,
//   d v'' + c v' + r v(1-v) - alpha k u v = 0, v(-inf) = 0, v(+inf) = 1,
// solved on [-L, L] by centered differences with Dirichlet closures and one
// phase condition at xi = 0 that removes translation invariance.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "segwave/limit_speed.hpp"

namespace segwave::wave {

struct SystemParams {
    double k = 10.0;
    double alpha = 1.0;
    double r = 1.0;
    double d = 1.0;

    void validate() const;
    limit::LimitParams limit() const { return {alpha, r, d}; }
    /// Open interval that every wave speed lies in.
    double min_speed() const;
    static constexpr double max_speed() { return 2.0; }
};

enum class Normalization { UHalf, VHalf, Cross };

const char* to_string(Normalization n) noexcept;
Normalization parse_normalization(std::string_view text);

/// Symmetric mesh xi = g(s) on [-L, L], s uniform on [-1, 1], with an even
/// number of intervals so that xi = 0 is the center node. Uniform when the
/// grading is 0, otherwise g(s) = L sinh(B s) / sinh(B), which clusters nodes
/// around the interface.
class WaveMesh {
public:
    static WaveMesh uniform(double half_length, std::size_t intervals);
    static WaveMesh graded(double half_length, std::size_t intervals, double grading);
    /// Default resolution for the given parameters: uniform spacing
    /// min(0.05, 0.2/sqrt(k)) below k = 1000, graded with center spacing
    /// 0.25/sqrt(k) above. `refine` divides every spacing.
    static WaveMesh for_params(const SystemParams& params, double refine = 1.0);
    static double default_half_length(const SystemParams& params);

    std::span<const double> nodes() const noexcept { return x_; }
    std::size_t size() const noexcept { return x_.size(); }
    std::size_t center() const noexcept { return x_.size() / 2; }
    double half_length() const noexcept { return half_length_; }
    double grading() const noexcept { return grading_; }
    /// Same mapping with twice the intervals.
    WaveMesh refined() const;

    /// Stencil coefficients at interior nodes (index j for node j + 1).
    std::span<const double> p() const noexcept { return p_; }
    std::span<const double> q() const noexcept { return q_; }
    std::span<const double> w() const noexcept { return w_; }
    double spacing_at(std::size_t i) const;

private:
    WaveMesh(double half_length, std::size_t intervals, double grading);

    double half_length_;
    double grading_;
    std::vector<double> x_, p_, q_, w_;
};

struct TravellingWave {
    SystemParams params;
    WaveMesh mesh;
    double c = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    Normalization normalization = Normalization::Cross;
    double residual_norm = 0.0;
    int newton_iterations = 0;

    double u_at(double xi) const;
    double v_at(double xi) const;
};

/// Logistic ramps of width about 5 centered at 0, speed 0.
TravellingWave seed_logistic(const SystemParams& params, const WaveMesh& mesh);
/// Segregated limit profiles sampled on the mesh, at the limit speed.
TravellingWave seed_from_limit(const SystemParams& params, const WaveMesh& mesh,
                               const limit::LimitWave& limit_wave);
/// Interpolates a wave onto another mesh (and parameter set) as a Newton seed.
TravellingWave resample(const TravellingWave& wave, const WaveMesh& mesh,
                        const SystemParams& params);

/// Length 2n + 1: the u equations (n rows), the v equations (n rows) and the
/// phase row. Rows 0 and n-1 of each block hold the Dirichlet closures.
std::vector<double> wave_residual(const TravellingWave& wave);

struct WaveOptions {
    double tol = 1e-8;
    int max_iterations = 80;
    int max_halvings = 20;
    /// Steps reducing the residual by less than this fraction count as stalled.
    double stall_fraction = 0.01;
    int stall_limit = 5;
};

/// Damped Newton on (u, v, c) starting from `initial` on its own mesh.
TravellingWave solve_wave(const SystemParams& params, const TravellingWave& initial,
                          Normalization normalization, const WaveOptions& options = {});

/// Default mesh, logistic seed.
TravellingWave solve_wave(const SystemParams& params,
                          Normalization normalization = Normalization::Cross,
                          const WaveOptions& options = {});

struct ContinuationReport {
    std::vector<double> k_values;
    std::vector<double> c_values;
    std::vector<double> segregation_values;
    double c_limit = 0.0;
    std::vector<TravellingWave> waves;
};

/// Solves along an increasing k schedule, warm-starting each step from the
/// previous wave. A failed step is retried once through the geometric
/// midpoint of the increment.
ContinuationReport continue_in_k(const SystemParams& base, std::span<const double> k_schedule,
                                 Normalization normalization = Normalization::Cross,
                                 const WaveOptions& options = {},
                                 const limit::LimitOptions& limit_options = {});

/// max over the mesh of u v.
double segregation_metric(const TravellingWave& wave);
/// Segregated profiles never overlap: always 0.
double segregation_metric(const limit::LimitWave& wave);

/// alpha u' + d v' at the point where alpha u = d v.
double interface_condition_estimate(const TravellingWave& wave);
/// |alpha u'(0-) + d v'(0+)| of the limit profiles.
double interface_condition_estimate(const limit::LimitWave& wave);

}  // namespace segwave::wave
