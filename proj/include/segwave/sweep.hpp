#pragma once

// Parameter ingestion, diffusion-ratio sweeps and report files.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segwave/limit_speed.hpp"
#include "segwave/wave.hpp"

namespace segwave::sweep {

/// Dimensional two-species competition parameters: diffusion d, growth r,
/// crowding a and competition k for species 1 (u) and 2 (v).
struct RawEcologicalParams {
    double d1 = 1.0, d2 = 1.0;
    double r1 = 1.0, r2 = 1.0;
    double a1 = 1.0, a2 = 1.0;
    double k1 = 1.0, k2 = 1.0;
};

struct Rescaled {
    double k;
    double alpha;
    double d;
    double r;
};

/// k = k1 r2/(a2 r1), alpha = k2 a2 r1/(k1 a1 r2), d = d2/d1, r = r2/r1.
/// Throws AssumptionViolation when k2 a2/r2^2 < k1 a1/r1^2 (swap the labels).
Rescaled rescale_parameters(const RawEcologicalParams& raw);

struct SweepSpec {
    double alpha = 1.0;
    double r = 1.0;
    std::vector<double> d_grid;
    std::vector<double> k_list;
    std::string output_path;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

/// n points geometrically spaced on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

struct SpeedCurve {
    double alpha = 1.0;
    double r = 1.0;
    std::vector<double> d_values;
    std::vector<std::optional<double>> c_inf;
    std::vector<double> k_list;
    /// c_k[j][i]: speed at k_list[j], d_values[i].
    std::vector<std::vector<std::optional<double>>> c_k;
    /// Per-row failure notes; empty when the row is complete.
    std::vector<std::string> diagnostics;
    /// Refined d where c_inf changes sign, if the grid brackets one.
    std::optional<double> sign_change_d;
    double predicted_threshold = 1.0;
};

struct SweepOptions {
    limit::LimitOptions limit;
    wave::WaveOptions wave;
    /// Absolute tolerance of the sign-change bisection in d.
    double d_tol = 1e-9;
    /// Called after each finished row with (rows done, rows total). Runs
    /// under a lock and never sees the results.
    std::function<void(std::size_t, std::size_t)> on_progress;
};

SpeedCurve run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Sign change of c_inf on [d_lo, d_hi] by bisection on d.
double locate_sign_change(double alpha, double r, double d_lo, double d_hi,
                          const SweepOptions& options = {});

/// CSV body: header `d,c_inf[,c_k_<k>...][,diagnostics]`, 17 significant
/// digits, empty fields for missing cells.
std::string format_csv(const SpeedCurve& curve);
/// JSON sidecar with alpha, r, threshold, sign_change_d and tool_version.
std::string format_sidecar(const SpeedCurve& curve);
/// Path of the sidecar written next to a CSV report: extension replaced by .json.
std::string sidecar_path(const std::string& csv_path);
/// Writes the CSV and its sidecar. Throws IoError naming the path.
void emit_report(const SpeedCurve& curve, const std::string& path);
/// Reads the d, c_inf and c_k columns of a CSV report back.
SpeedCurve parse_csv(std::string_view text);

/// Overwrites fields present in a JSON object (same names as the structs).
void apply_json(std::string_view json_text, SweepSpec& spec);
void apply_json(std::string_view json_text, RawEcologicalParams& raw);

const char* tool_version() noexcept;

}  // namespace segwave::sweep
