#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "rcbf/experiment.hpp"

namespace {

struct CliOptions {
    int robots = -1;
    double duration = -1.0;
    std::string mode;
    long long seed = -1;
    std::string config_path;
    std::string out_dir;
    bool oracle = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--robots", opts.robots, "Number of robots");
    cmd->add_option("--duration", opts.duration, "Simulated duration in seconds");
    cmd->add_option("--mode", opts.mode, "Filter mode: robust or nominal");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--config", opts.config_path, "Flat key=value config file");
    cmd->add_option("--out", opts.out_dir, "Output directory for CSV/JSON artifacts");
    cmd->add_flag("--oracle-disturbance", opts.oracle,
                  "Bypass the estimator with the true simulated field");
}

rcbf::ExperimentConfig build_config(const CliOptions& opts, rcbf::ExperimentKind kind) {
    rcbf::ExperimentConfig config;
    config.experiment = kind;
    if (kind == rcbf::ExperimentKind::explore) {
        config.robots = 3;
        config.duration = 300.0;
    }
    if (!opts.config_path.empty()) {
        rcbf::apply_config_file(opts.config_path, config);
    }
    config.experiment = kind;
    if (opts.robots >= 0) {
        config.robots = opts.robots;
    }
    if (opts.duration >= 0.0) {
        config.duration = opts.duration;
    }
    if (!opts.mode.empty()) {
        if (opts.mode == "robust") {
            config.mode = rcbf::FilterMode::robust;
        } else if (opts.mode == "nominal") {
            config.mode = rcbf::FilterMode::nominal;
        } else {
            throw std::invalid_argument("--mode must be robust or nominal");
        }
    }
    if (opts.seed >= 0) {
        config.seed = static_cast<std::uint64_t>(opts.seed);
        config.arena.seed = config.seed;
    }
    if (!opts.out_dir.empty()) {
        config.output_dir = opts.out_dir;
    }
    if (opts.oracle) {
        config.oracle_disturbance = true;
    }
    rcbf::validate_config(config);
    return config;
}

void print_summary(const rcbf::ExperimentConfig& config, const rcbf::MetricsReport& metrics) {
    std::printf("experiment=%s mode=%s robots=%d duration=%.1fs seed=%llu\n",
                rcbf::to_string(config.experiment).c_str(), rcbf::to_string(config.mode).c_str(),
                config.robots, config.duration,
                static_cast<unsigned long long>(config.seed));
    std::printf("violation_time=%.4fs violation_count=%d maneuvers=%d\n",
                metrics.violation_time, metrics.violation_count, metrics.maneuvers_completed);
    std::printf("mean_dev=%.6g max_dev=%.6g qp_wct_mean=%.3fms qp_wct_var=%.3fms^2\n",
                metrics.mean_dev, metrics.max_dev, metrics.qp_wct_mean_ms,
                metrics.qp_wct_var_ms2);
    if (!config.output_dir.empty()) {
        std::printf("artifacts written to %s\n", config.output_dir.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust safety filter for disturbed differential-drive fleets"};
    app.require_subcommand(1);

    CliOptions explore_opts;
    CLI::App* explore = app.add_subcommand(
        "explore", "Online disturbance learning with max-variance exploration");
    add_common_flags(explore, explore_opts);

    CliOptions swap_opts;
    CLI::App* swap = app.add_subcommand(
        "swap", "Repeated circle-swap maneuvers under the safety filter");
    add_common_flags(swap, swap_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(explore)) {
            const auto config = build_config(explore_opts, rcbf::ExperimentKind::explore);
            const auto result = rcbf::run_explore(config);
            print_summary(config, result.metrics);
        } else {
            const auto config = build_config(swap_opts, rcbf::ExperimentKind::swap);
            const auto result = rcbf::run_swap(config);
            print_summary(config, result.metrics);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
