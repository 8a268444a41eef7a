#include "rcbf/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rcbf/constraints.hpp"
#include "rcbf/qp.hpp"

namespace rcbf {

namespace {

double clamp_box(double v, double bound) { return std::clamp(v, -bound, bound); }

std::vector<RobotState> build_grid(const ExperimentConfig& cfg) {
    std::vector<RobotState> grid;
    const Rect& b = cfg.arena.bounds;
    for (double x = b.x_min + 0.5 * cfg.grid_xy; x <= b.x_max; x += cfg.grid_xy) {
        for (double y = b.y_min + 0.5 * cfg.grid_xy; y <= b.y_max; y += cfg.grid_xy) {
            for (double th = -std::numbers::pi + cfg.grid_theta; th <= std::numbers::pi + 1e-12;
                 th += cfg.grid_theta) {
                grid.push_back({x, y, wrap_angle(th)});
            }
        }
    }
    return grid;
}

DisturbanceEstimator make_estimator(const ExperimentConfig& cfg) {
    DisturbanceEstimator::Options opts;
    opts.hyper.sigma_s = cfg.sigma_s;
    opts.hyper.sigma_n = cfg.sigma_n;
    opts.hyper.widths = Eigen::Vector3d(cfg.width_xy, cfg.width_xy, cfg.width_theta);
    opts.k_c = cfg.arena.k_c;
    opts.prior_lo = cfg.prior_lo;
    opts.prior_hi = cfg.prior_hi;
    opts.batch_size = cfg.batch_size;
    opts.max_samples = cfg.max_samples;
    return DisturbanceEstimator(opts);
}

class Engine {
public:
    explicit Engine(const ExperimentConfig& cfg)
        : cfg_(cfg),
          params_{cfg.arena.delta, cfg.arena.l_p, ClassKappa(cfg.arena.gamma)},
          rng_(cfg.seed),
          estimator_(make_estimator(cfg)) {
        validate_config(cfg_);
        gains_ = {cfg_.k_v, cfg_.k_omega, cfg_.arena.u_max};
        use_estimator_ = cfg_.mode == FilterMode::robust && !cfg_.oracle_disturbance &&
                         cfg_.collect_labels;
        if (cfg_.experiment == ExperimentKind::explore) {
            grid_ = build_grid(cfg_);
            queue_.resize(grid_.size());
            std::iota(queue_.begin(), queue_.end(), 0);
            probes_ = probe_states(cfg_);
            init_explore();
        } else {
            init_swap();
        }
        if (!cfg_.output_dir.empty()) {
            std::filesystem::create_directories(cfg_.output_dir);
            traj_.open(cfg_.output_dir + "/trajectory.csv");
            traj_ << "t,robot_id,x1,x2,theta,v_nom,omega_nom,v_star,omega_star,min_h\n";
            traj_.precision(10);
        }
    }

    RunResult run() {
        const double dt = cfg_.arena.dt;
        const int total_ticks = static_cast<int>(std::llround(cfg_.duration / dt));
        const int label_ticks = std::max(1, static_cast<int>(std::llround(cfg_.label_period / dt)));
        const int fd_ticks = std::max(1, static_cast<int>(std::llround(cfg_.fd_baseline / dt)));
        const int predict_ticks =
            std::max(1, static_cast<int>(std::llround(cfg_.predict_period / dt)));
        const int n = cfg_.robots;

        dm_cache_.assign(n, IntervalMatrix::zero(3, 2));
        bool dm_fresh = false;

        RunResult result;
        result.ticks.reserve(total_ticks);

        for (int tick = 0; tick < total_ticks; ++tick) {
            const double t = tick * dt;
            update_goals(dt);

            std::vector<ControlInput> u_nom(n);
            for (int i = 0; i < n; ++i) {
                u_nom[i] = proportional_controller(states_[i], goals_[i], gains_);
            }

            const bool robust = cfg_.mode == FilterMode::robust;
            if (robust) {
                if (cfg_.oracle_disturbance) {
                    for (int i = 0; i < n; ++i) {
                        dm_cache_[i] = oracle_disturbance_interval(states_[i], cfg_.field);
                    }
                } else if (!dm_fresh || tick % predict_ticks == 0) {
                    for (int i = 0; i < n; ++i) {
                        dm_cache_[i] = estimator_.disturbance_interval(states_[i]);
                    }
                    dm_fresh = true;
                }
            }

            const auto t0 = std::chrono::steady_clock::now();
            std::vector<std::vector<LinearConstraint>> blocks;
            blocks.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (robust) {
                        blocks.push_back(pairwise_constraints(states_[i], states_[j], dm_cache_[i],
                                                              dm_cache_[j], params_, n, i, j));
                    } else {
                        blocks.push_back({pairwise_nominal(states_[i], states_[j], params_, n, i,
                                                           j)});
                    }
                }
            }
            auto [a, b] = assemble_ensemble(blocks, 2 * n);

            QpProblem problem;
            problem.weight.resize(2 * n);
            for (int i = 0; i < n; ++i) {
                problem.weight(2 * i) = 1.0;
                problem.weight(2 * i + 1) = cfg_.arena.l_p;
            }
            problem.u_nom.resize(2 * n);
            for (int i = 0; i < n; ++i) {
                problem.u_nom(2 * i) = u_nom[i].v;
                problem.u_nom(2 * i + 1) = u_nom[i].omega;
            }
            problem.A = std::move(a);
            problem.b = std::move(b);
            problem.u_max = cfg_.arena.u_max;

            const QpSolution solution = qp_.solve(problem);
            const auto t1 = std::chrono::steady_clock::now();

            Eigen::VectorXd u_star = solution.status == QpStatus::infeasible
                                         ? Eigen::VectorXd::Zero(2 * n)
                                         : solution.u_star;
            std::vector<ControlInput> applied(n);
            for (int i = 0; i < n; ++i) {
                applied[i] = {clamp_box(u_star(2 * i), cfg_.arena.u_max),
                              clamp_box(u_star(2 * i + 1), cfg_.arena.u_max)};
            }

            states_ = step(states_, applied, cfg_.field, dt);
            history_.push_back({states_, applied});
            if (static_cast<int>(history_.size()) > fd_ticks + 1) {
                history_.pop_front();
            }

            const double min_h = ground_truth_min_h(states_, cfg_.arena.delta, cfg_.arena.l_p);
            double dev = 0.0;
            for (int i = 0; i < n; ++i) {
                const double dv = applied[i].v - u_nom[i].v;
                const double dw = applied[i].omega - u_nom[i].omega;
                dev += dv * dv + dw * dw;
            }
            const double qp_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            result.ticks.push_back({t + dt, min_h, dev, qp_ms});

            if (traj_.is_open()) {
                for (int i = 0; i < n; ++i) {
                    traj_ << t + dt << ',' << i << ',' << states_[i].x1 << ',' << states_[i].x2
                          << ',' << states_[i].theta << ',' << u_nom[i].v << ',' << u_nom[i].omega
                          << ',' << applied[i].v << ',' << applied[i].omega << ',' << min_h
                          << '\n';
                }
            }

            if (use_estimator_ && tick % label_ticks == label_ticks - 1 &&
                static_cast<int>(history_.size()) == fd_ticks + 1) {
                collect_labels(fd_ticks, t + dt);
            }
        }

        result.metrics = compute_metrics(result.ticks, dt);
        result.metrics.maneuvers_completed = maneuvers_;
        result.probe_estimates = std::move(probe_log_);
        result.final_states = states_;
        result.dataset_size = estimator_.sample_count() + estimator_.buffered_count();
        if (!cfg_.output_dir.empty()) {
            if (use_estimator_) {
                estimator_.save_dataset(cfg_.output_dir + "/dataset.csv");
            }
            write_outputs(cfg_, result);
        }
        return result;
    }

private:
    void init_swap() {
        const int n = cfg_.robots;
        std::uniform_real_distribution<double> angle_jitter(-0.15, 0.15);
        std::uniform_real_distribution<double> heading_jitter(-0.3, 0.3);
        for (int i = 0; i < n; ++i) {
            const double angle = 2.0 * std::numbers::pi * i / n + angle_jitter(rng_);
            const double x = cfg_.circle_radius * std::cos(angle);
            const double y = cfg_.circle_radius * std::sin(angle);
            states_.push_back({x, y, wrap_angle(angle + std::numbers::pi + heading_jitter(rng_))});
            goals_.emplace_back(-x, -y);
        }
    }

    void init_explore() {
        const int n = cfg_.robots;
        std::uniform_real_distribution<double> heading_jitter(-0.3, 0.3);
        for (int i = 0; i < n; ++i) {
            const double angle = 2.0 * std::numbers::pi * i / n;
            states_.push_back({0.5 * std::cos(angle), 0.5 * std::sin(angle),
                               wrap_angle(angle + heading_jitter(rng_))});
            goals_.emplace_back(states_[i].x1, states_[i].x2);
            target_age_.push_back(std::numeric_limits<double>::infinity());  // assign at tick 0
        }
    }

    void update_goals(double dt) {
        const int n = cfg_.robots;
        if (cfg_.experiment == ExperimentKind::swap) {
            bool all_reached = true;
            for (int i = 0; i < n; ++i) {
                const double dist =
                    std::hypot(goals_[i](0) - states_[i].x1, goals_[i](1) - states_[i].x2);
                if (dist > cfg_.goal_tol) {
                    all_reached = false;
                    break;
                }
            }
            if (all_reached) {
                ++maneuvers_;
                for (auto& goal : goals_) {
                    goal = -goal;
                }
            }
            return;
        }
        for (int i = 0; i < n; ++i) {
            target_age_[i] += dt;
            const double dist =
                std::hypot(goals_[i](0) - states_[i].x1, goals_[i](1) - states_[i].x2);
            if (dist <= cfg_.goal_tol || target_age_[i] > cfg_.target_refresh) {
                assign_target(i);
            }
        }
    }

    void assign_target(int robot) {
        for (int gi : queue_) {
            const Eigen::Vector2d candidate(grid_[gi].x1, grid_[gi].x2);
            bool taken = false;
            for (int other = 0; other < cfg_.robots; ++other) {
                if (other != robot && (goals_[other] - candidate).norm() < 0.3) {
                    taken = true;
                    break;
                }
            }
            if (!taken) {
                goals_[robot] = candidate;
                target_age_[robot] = 0.0;
                return;
            }
        }
        target_age_[robot] = 0.0;  // queue exhausted; keep the current goal
    }

    void collect_labels(int fd_ticks, double t) {
        const auto& window_start = history_.front();
        const auto& window_end = history_.back();
        const int mid = fd_ticks / 2;
        for (int i = 0; i < cfg_.robots; ++i) {
            double mean_v = 0.0;
            double mean_w = 0.0;
            for (std::size_t k = 1; k < history_.size(); ++k) {
                mean_v += history_[k].inputs[static_cast<std::size_t>(i)].v;
                mean_w += history_[k].inputs[static_cast<std::size_t>(i)].omega;
            }
            mean_v /= fd_ticks;
            mean_w /= fd_ticks;

            const DerivMeasurement deriv =
                measure(window_start.states[static_cast<std::size_t>(i)],
                        window_end.states[static_cast<std::size_t>(i)],
                        fd_ticks * cfg_.arena.dt, cfg_.arena.noise_sigma, rng_);
            const RobotState& mid_state = history_[static_cast<std::size_t>(mid)]
                                              .states[static_cast<std::size_t>(i)];
            const auto labels = multiplicative_labels(
                deriv.dx1, deriv.dx2, deriv.dtheta, mid_state, {mean_v, mean_w},
                cfg_.label_speed_min, cfg_.label_speed_min);
            if (!labels) {
                continue;
            }
            estimator_.add_sample({mid_state.x1, mid_state.x2, mid_state.theta, mean_v, mean_w,
                                   labels->y11, labels->y21, labels->y32, t});
        }
        if (estimator_.maybe_refit()) {
            refresh_acquisition();
            log_probes();
        }
    }

    void refresh_acquisition() {
        if (grid_.empty()) {
            return;
        }
        const std::vector<double> variances = estimator_.summed_grid_variance(grid_);
        std::iota(queue_.begin(), queue_.end(), 0);
        std::stable_sort(queue_.begin(), queue_.end(),
                         [&](int a, int b) { return variances[a] > variances[b]; });
    }

    void log_probes() {
        const int batch = estimator_.batches_fitted();
        for (std::size_t p = 0; p < probes_.size(); ++p) {
            const auto predictions = estimator_.predict_entries(probes_[p]);
            for (int entry = 0; entry < 3; ++entry) {
                ProbeEstimate e;
                e.batch = batch;
                e.probe = static_cast<int>(p);
                e.state = probes_[p];
                e.entry = entry;
                e.mu = predictions[static_cast<std::size_t>(entry)].mean;
                e.sigma = std::sqrt(
                    std::max(0.0, predictions[static_cast<std::size_t>(entry)].variance));
                probe_log_.push_back(e);
            }
        }
    }

    struct HistoryEntry {
        std::vector<RobotState> states;
        std::vector<ControlInput> inputs;
    };

    const ExperimentConfig& cfg_;
    BarrierParams params_;
    std::mt19937_64 rng_;
    ControllerGains gains_;
    bool use_estimator_ = false;
    std::vector<RobotState> states_;
    std::vector<Eigen::Vector2d> goals_;
    std::vector<double> target_age_;
    std::vector<RobotState> grid_;
    std::vector<int> queue_;
    std::vector<RobotState> probes_;
    DisturbanceEstimator estimator_;
    ActiveSetQp qp_;
    std::vector<IntervalMatrix> dm_cache_;
    std::deque<HistoryEntry> history_;
    std::vector<ProbeEstimate> probe_log_;
    std::ofstream traj_;
    int maneuvers_ = 0;
};

const char* entry_name(int entry) {
    switch (entry) {
        case 0: return "y11";
        case 1: return "y21";
        default: return "y32";
    }
}

}  // namespace

MetricsReport compute_metrics(const std::vector<TickLog>& logs, double dt) {
    MetricsReport report;
    report.min_h_series.reserve(logs.size());
    double dev_sum = 0.0;
    double wct_sum = 0.0;
    for (const auto& log : logs) {
        report.min_h_series.push_back(log.min_h);
        if (log.min_h < 0.0) {
            report.violation_time += dt;
            ++report.violation_count;
        }
        dev_sum += log.dev_sq;
        report.max_dev = std::max(report.max_dev, log.dev_sq);
        wct_sum += log.qp_ms;
    }
    if (!logs.empty()) {
        const double count = static_cast<double>(logs.size());
        report.mean_dev = dev_sum / count;
        report.qp_wct_mean_ms = wct_sum / count;
        double var = 0.0;
        for (const auto& log : logs) {
            const double d = log.qp_ms - report.qp_wct_mean_ms;
            var += d * d;
        }
        report.qp_wct_var_ms2 = var / count;
    }
    return report;
}

std::vector<RobotState> probe_states(const ExperimentConfig& config) {
    const Rect& b = config.arena.bounds;
    const double inset = 0.2;
    const Eigen::Vector2d top_left(b.x_min + inset, b.y_max - inset);
    const Eigen::Vector2d bottom_right(b.x_max - inset, b.y_min + inset);
    std::vector<RobotState> probes;
    for (const auto& corner : {top_left, bottom_right}) {
        for (int k = 0; k < 8; ++k) {
            const double theta = wrap_angle(-std::numbers::pi + k * std::numbers::pi / 4.0);
            probes.push_back({corner(0), corner(1), theta});
        }
    }
    return probes;
}

IntervalMatrix oracle_disturbance_interval(const RobotState& state,
                                           const DisturbanceField& field) {
    const double g = field.gain_at(state.x1, state.x2) - 1.0;
    IntervalMatrix dm = IntervalMatrix::zero(3, 2);
    dm.set_entry(0, 0, Interval::point(g * std::cos(state.theta)));
    dm.set_entry(1, 0, Interval::point(g * std::sin(state.theta)));
    dm.set_entry(2, 1, Interval::point(g));
    return dm;
}

RunResult run_explore(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::explore) {
        throw std::invalid_argument("run_explore: experiment must be explore");
    }
    return Engine(config).run();
}

RunResult run_swap(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::swap) {
        throw std::invalid_argument("run_swap: experiment must be swap");
    }
    return Engine(config).run();
}

std::string to_string(FilterMode mode) {
    return mode == FilterMode::robust ? "robust" : "nominal";
}

std::string to_string(ExperimentKind kind) {
    return kind == ExperimentKind::explore ? "explore" : "swap";
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config: invalid value '" + value + "' for field '" + key + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            bad_value(key, value);
        }
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) {
            bad_value(key, value);
        }
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    bad_value(key, value);
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment") {
        if (value == "explore") {
            cfg.experiment = ExperimentKind::explore;
        } else if (value == "swap") {
            cfg.experiment = ExperimentKind::swap;
        } else {
            bad_value(key, value);
        }
    } else if (key == "mode") {
        if (value == "robust") {
            cfg.mode = FilterMode::robust;
        } else if (value == "nominal") {
            cfg.mode = FilterMode::nominal;
        } else {
            bad_value(key, value);
        }
    } else if (key == "robots") {
        cfg.robots = parse_int(key, value);
    } else if (key == "duration") {
        cfg.duration = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        cfg.arena.seed = cfg.seed;
    } else if (key == "oracle_disturbance") {
        cfg.oracle_disturbance = parse_bool(key, value);
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "dt") {
        cfg.arena.dt = parse_double(key, value);
    } else if (key == "l_p") {
        cfg.arena.l_p = parse_double(key, value);
    } else if (key == "l_b") {
        cfg.arena.l_b = parse_double(key, value);
    } else if (key == "r") {
        cfg.arena.r = parse_double(key, value);
    } else if (key == "delta") {
        cfg.arena.delta = parse_double(key, value);
    } else if (key == "gamma") {
        cfg.arena.gamma = parse_double(key, value);
    } else if (key == "k_c") {
        cfg.arena.k_c = parse_double(key, value);
    } else if (key == "u_max") {
        cfg.arena.u_max = parse_double(key, value);
    } else if (key == "noise_sigma") {
        cfg.arena.noise_sigma = parse_double(key, value);
    } else if (key == "bounds_x_min") {
        cfg.arena.bounds.x_min = parse_double(key, value);
    } else if (key == "bounds_x_max") {
        cfg.arena.bounds.x_max = parse_double(key, value);
    } else if (key == "bounds_y_min") {
        cfg.arena.bounds.y_min = parse_double(key, value);
    } else if (key == "bounds_y_max") {
        cfg.arena.bounds.y_max = parse_double(key, value);
    } else if (key == "region_x_min") {
        cfg.field.region.x_min = parse_double(key, value);
    } else if (key == "region_x_max") {
        cfg.field.region.x_max = parse_double(key, value);
    } else if (key == "region_y_min") {
        cfg.field.region.y_min = parse_double(key, value);
    } else if (key == "region_y_max") {
        cfg.field.region.y_max = parse_double(key, value);
    } else if (key == "field_gain") {
        cfg.field.gain = parse_double(key, value);
    } else if (key == "sigma_s") {
        cfg.sigma_s = parse_double(key, value);
    } else if (key == "sigma_n") {
        cfg.sigma_n = parse_double(key, value);
    } else if (key == "width_xy") {
        cfg.width_xy = parse_double(key, value);
    } else if (key == "width_theta") {
        cfg.width_theta = parse_double(key, value);
    } else if (key == "prior_lo") {
        cfg.prior_lo = parse_double(key, value);
    } else if (key == "prior_hi") {
        cfg.prior_hi = parse_double(key, value);
    } else if (key == "batch_size") {
        cfg.batch_size = parse_int(key, value);
    } else if (key == "max_samples") {
        cfg.max_samples = parse_int(key, value);
    } else if (key == "grid_xy") {
        cfg.grid_xy = parse_double(key, value);
    } else if (key == "grid_theta") {
        cfg.grid_theta = parse_double(key, value);
    } else if (key == "label_period") {
        cfg.label_period = parse_double(key, value);
    } else if (key == "fd_baseline") {
        cfg.fd_baseline = parse_double(key, value);
    } else if (key == "label_speed_min") {
        cfg.label_speed_min = parse_double(key, value);
    } else if (key == "predict_period") {
        cfg.predict_period = parse_double(key, value);
    } else if (key == "goal_tol") {
        cfg.goal_tol = parse_double(key, value);
    } else if (key == "circle_radius") {
        cfg.circle_radius = parse_double(key, value);
    } else if (key == "target_refresh") {
        cfg.target_refresh = parse_double(key, value);
    } else if (key == "k_v") {
        cfg.k_v = parse_double(key, value);
    } else if (key == "k_omega") {
        cfg.k_omega = parse_double(key, value);
    } else if (key == "collect_labels") {
        cfg.collect_labels = parse_bool(key, value);
    } else {
        throw std::invalid_argument("config: unknown field '" + key + "'");
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_file(const std::string& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open file " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected 'key = value', got '" + line + "'");
        }
        apply_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void validate_config(const ExperimentConfig& config) {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config: field '" + field + "' " + why);
    };
    if (config.robots < 2) {
        fail("robots", "must be at least 2");
    }
    if (!(config.duration > 0.0)) {
        fail("duration", "must be positive");
    }
    if (config.experiment == ExperimentKind::explore && config.mode != FilterMode::robust) {
        fail("mode", "must be robust for the explore experiment");
    }
    if (!(config.arena.dt > 0.0)) {
        fail("dt", "must be positive");
    }
    if (!(config.arena.u_max > 0.0)) {
        fail("u_max", "must be positive");
    }
    if (!(config.arena.delta > 0.0)) {
        fail("delta", "must be positive");
    }
    if (!(config.arena.l_p > 0.0)) {
        fail("l_p", "must be positive");
    }
    if (!(config.arena.gamma > 0.0)) {
        fail("gamma", "must be positive");
    }
    if (!(config.field.gain > 0.0 && config.field.gain <= 1.0)) {
        fail("field_gain", "must lie in (0, 1]");
    }
    if (!(config.sigma_s > 0.0)) {
        fail("sigma_s", "must be positive");
    }
    if (config.sigma_n < 0.0) {
        fail("sigma_n", "must be nonnegative");
    }
    if (config.prior_lo > config.prior_hi) {
        fail("prior_lo", "must not exceed prior_hi");
    }
    if (config.batch_size < 1) {
        fail("batch_size", "must be at least 1");
    }
    if (!(config.grid_xy > 0.0) || !(config.grid_theta > 0.0)) {
        fail("grid_xy", "grid steps must be positive");
    }
    if (!(config.label_period > 0.0) || !(config.fd_baseline > 0.0)) {
        fail("label_period", "labeling periods must be positive");
    }
    if (!(config.circle_radius > 0.0)) {
        fail("circle_radius", "must be positive");
    }
    if (!(config.goal_tol > 0.0)) {
        fail("goal_tol", "must be positive");
    }
}

void write_outputs(const ExperimentConfig& config, const RunResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const std::string base = config.output_dir + "/";

    {
        std::ofstream out(base + "minh.csv");
        out << "t,min_h\n";
        out.precision(10);
        double t = config.arena.dt;
        for (double h : result.metrics.min_h_series) {
            out << t << ',' << h << '\n';
            t += config.arena.dt;
        }
    }
    {
        std::ofstream out(base + "estimates.csv");
        out << "batch,probe,x1,x2,theta,entry,mu,sigma\n";
        out.precision(10);
        for (const auto& e : result.probe_estimates) {
            out << e.batch << ',' << e.probe << ',' << e.state.x1 << ',' << e.state.x2 << ','
                << e.state.theta << ',' << entry_name(e.entry) << ',' << e.mu << ',' << e.sigma
                << '\n';
        }
    }
    {
        nlohmann::ordered_json j;
        j["schema_version"] = 1;
        j["experiment"] = to_string(config.experiment);
        j["mode"] = to_string(config.mode);
        j["robots"] = config.robots;
        j["duration_s"] = config.duration;
        j["seed"] = config.seed;
        j["dt"] = config.arena.dt;
        j["oracle_disturbance"] = config.oracle_disturbance;
        j["violation_time_s"] = result.metrics.violation_time;
        j["violation_count"] = result.metrics.violation_count;
        j["maneuvers_completed"] = result.metrics.maneuvers_completed;
        j["mean_dev"] = result.metrics.mean_dev;
        j["max_dev"] = result.metrics.max_dev;
        j["qp_wct_mean_ms"] = result.metrics.qp_wct_mean_ms;
        j["qp_wct_var_ms2"] = result.metrics.qp_wct_var_ms2;
        j["steps"] = result.metrics.min_h_series.size();
        j["dataset_size"] = result.dataset_size;
        j["min_h_min"] = result.metrics.min_h_series.empty()
                             ? 0.0
                             : *std::min_element(result.metrics.min_h_series.begin(),
                                                 result.metrics.min_h_series.end());
        j["min_h_series"] = result.metrics.min_h_series;
        std::ofstream out(base + "metrics.json");
        out << j.dump(2) << '\n';
    }
}

}  // namespace rcbf
