#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcbf/estimator.hpp"
#include "rcbf/sim.hpp"

namespace rcbf {

enum class ExperimentKind { explore, swap };
enum class FilterMode { robust, nominal };

// Everything a run needs; field names double as the config-file keys.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::swap;
    FilterMode mode = FilterMode::robust;
    int robots = 5;
    double duration = 120.0;  // simulated seconds
    std::uint64_t seed = 0;
    bool oracle_disturbance = false;  // bypass the GP with the true field
    std::string output_dir;           // empty: keep everything in memory

    ArenaConfig arena;
    // Default field: top-left quarter of the arena scales inputs by 0.8.
    DisturbanceField field{Rect{-1.6, 0.0, 0.0, 1.0}, 0.8};

    // GP hyperparameters (sigma_s, sigma_n, widths over x1, x2, theta).
    double sigma_s = 0.1;
    double sigma_n = 0.05;
    double width_xy = 1.0 / (0.3 * 0.3);
    double width_theta = 1.0;
    double prior_lo = -0.3;
    double prior_hi = 0.3;
    int batch_size = 50;
    int max_samples = 2000;

    // Acquisition grid resolution for the max-variance targets.
    double grid_xy = 0.2;
    double grid_theta = 0.78539816339744831;  // pi / 4

    // Labeling cadence: a derivative sample per robot every label_period,
    // finite-differenced over fd_baseline, kept only when the averaged
    // input magnitudes exceed label_speed_min (noisy divisions otherwise).
    double label_period = 0.5;
    double fd_baseline = 0.1;
    double label_speed_min = 0.1;
    // Disturbance intervals are re-predicted at this period rather than
    // every tick; the field varies spatially, not per millisecond.
    double predict_period = 0.05;

    double goal_tol = 0.05;      // m, maneuver / target completion
    double circle_radius = 0.6;  // m, swap formation
    double target_refresh = 20.0;  // s, explore target timeout
    double k_v = 1.0;
    double k_omega = 2.0;
    bool collect_labels = true;
};

// Per-tick record the metrics are computed from.
struct TickLog {
    double t = 0.0;
    double min_h = 0.0;
    double dev_sq = 0.0;  // |u* - u_nom|^2
    double qp_ms = 0.0;   // constraint build + solve wall clock
};

struct MetricsReport {
    std::vector<double> min_h_series;
    double violation_time = 0.0;
    int violation_count = 0;
    int maneuvers_completed = 0;
    double mean_dev = 0.0;
    double max_dev = 0.0;
    double qp_wct_mean_ms = 0.0;
    double qp_wct_var_ms2 = 0.0;
};

MetricsReport compute_metrics(const std::vector<TickLog>& logs, double dt);

// Estimate snapshot logged at a probe state after each batch refit.
struct ProbeEstimate {
    int batch = 0;
    int probe = 0;
    RobotState state;
    int entry = 0;  // 0: (1,1), 1: (2,1), 2: (3,2)
    double mu = 0.0;
    double sigma = 0.0;
};

struct RunResult {
    MetricsReport metrics;
    std::vector<TickLog> ticks;
    std::vector<ProbeEstimate> probe_estimates;
    std::vector<RobotState> final_states;
    std::size_t dataset_size = 0;
};

// Max-variance exploration: robots chase the most uncertain grid states
// while the robust filter, fed by the online estimator, keeps them apart.
RunResult run_explore(const ExperimentConfig& config);

// Circle-swap stress test: robots repeatedly traverse to their antipodes,
// crossing in the middle, under the configured filter mode.
RunResult run_swap(const ExperimentConfig& config);

// Probe states used for the estimate snapshots: the top-left and
// bottom-right arena corners over a ring of headings.
std::vector<RobotState> probe_states(const ExperimentConfig& config);

// True disturbance matrix of the simulated field at a state, as degenerate
// intervals (used by the oracle mode and the coverage checks).
IntervalMatrix oracle_disturbance_interval(const RobotState& state, const DisturbanceField& field);

// Flat key-value config file (one `key = value` per line, # comments).
// Unknown keys and unparsable values are reported by name.
void apply_config_file(const std::string& path, ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

// Writers for the run artifacts (trajectory CSV, min-h CSV, probe-estimate
// CSV, dataset CSV, metrics JSON).
void write_outputs(const ExperimentConfig& config, const RunResult& result);

std::string to_string(FilterMode mode);
std::string to_string(ExperimentKind kind);

}  // namespace rcbf
