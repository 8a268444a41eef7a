#include "rcbf/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rcbf {

Eigen::VectorXd additive_labels(const Eigen::VectorXd& measured_deriv,
                                const Eigen::VectorXd& drift, const Eigen::MatrixXd& input_matrix,
                                const Eigen::VectorXd& input) {
    if (measured_deriv.size() != drift.size() || input_matrix.rows() != drift.size() ||
        input_matrix.cols() != input.size()) {
        throw std::invalid_argument("additive_labels: dimension mismatch");
    }
    return measured_deriv - drift - input_matrix * input;
}

std::optional<UnicycleLabels> multiplicative_labels(double measured_dx, double measured_dy,
                                                    double measured_dtheta,
                                                    const RobotState& state,
                                                    const ControlInput& input, double v_min,
                                                    double omega_min) {
    if (std::abs(input.v) < v_min || std::abs(input.omega) < omega_min) {
        return std::nullopt;
    }
    UnicycleLabels labels;
    labels.y11 = measured_dx / input.v - std::cos(state.theta);
    labels.y21 = measured_dy / input.v - std::sin(state.theta);
    labels.y32 = measured_dtheta / input.omega - 1.0;
    return labels;
}

DisturbanceEstimator::DisturbanceEstimator(Options options) : options_(std::move(options)) {
    if (!(options_.k_c > 0.0)) {
        throw std::invalid_argument("DisturbanceEstimator: k_c must be positive");
    }
    if (options_.prior_lo > options_.prior_hi) {
        throw std::invalid_argument("DisturbanceEstimator: prior interval is empty");
    }
    if (options_.batch_size < 1) {
        throw std::invalid_argument("DisturbanceEstimator: batch_size must be at least 1");
    }
}

void DisturbanceEstimator::add_sample(const LabeledSample& sample) {
    buffer_.push_back(sample);
}

bool DisturbanceEstimator::maybe_refit() {
    if (static_cast<int>(buffer_.size()) < options_.batch_size) {
        return false;
    }
    dataset_.insert(dataset_.end(), buffer_.begin(), buffer_.end());
    buffer_.clear();
    if (static_cast<int>(dataset_.size()) > options_.max_samples) {
        dataset_.erase(dataset_.begin(),
                       dataset_.begin() + (dataset_.size() - options_.max_samples));
    }

    const Eigen::Index n = static_cast<Eigen::Index>(dataset_.size());
    Eigen::MatrixXd inputs(n, 3);
    Eigen::VectorXd y11(n);
    Eigen::VectorXd y21(n);
    Eigen::VectorXd y32(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const LabeledSample& s = dataset_[static_cast<std::size_t>(i)];
        inputs.row(i) << s.x1, s.x2, s.theta;
        y11(i) = s.y11;
        y21(i) = s.y21;
        y32(i) = s.y32;
    }
    auto snapshot = std::make_shared<Snapshot>();
    snapshot->models = GpModel::fit_shared(inputs, {y11, y21, y32}, options_.hyper);
    std::atomic_store_explicit(&snapshot_, std::shared_ptr<const Snapshot>(std::move(snapshot)),
                               std::memory_order_release);
    ++batches_;
    return true;
}

std::array<GpModel::Prediction, 3> DisturbanceEstimator::predict_entries(
    const RobotState& query) const {
    const auto snapshot = std::atomic_load_explicit(&snapshot_, std::memory_order_acquire);
    if (!snapshot) {
        throw std::logic_error("DisturbanceEstimator: no model fitted yet");
    }
    Eigen::Vector3d x(query.x1, query.x2, query.theta);
    std::array<GpModel::Prediction, 3> out;
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = snapshot->models[i].predict(x);
    }
    return out;
}

IntervalMatrix DisturbanceEstimator::disturbance_interval(const RobotState& query) const {
    IntervalMatrix dm = IntervalMatrix::zero(3, 2);
    if (!fitted()) {
        const Interval prior{options_.prior_lo, options_.prior_hi};
        dm.set_entry(0, 0, prior);
        dm.set_entry(1, 0, prior);
        dm.set_entry(2, 1, prior);
        return dm;
    }
    const auto predictions = predict_entries(query);
    const auto to_interval = [this](const GpModel::Prediction& p) {
        const double sigma = std::sqrt(std::max(0.0, p.variance));
        return Interval{p.mean - options_.k_c * sigma, p.mean + options_.k_c * sigma};
    };
    dm.set_entry(0, 0, to_interval(predictions[0]));
    dm.set_entry(1, 0, to_interval(predictions[1]));
    dm.set_entry(2, 1, to_interval(predictions[2]));
    return dm;
}

std::vector<double> DisturbanceEstimator::summed_grid_variance(
    const std::vector<RobotState>& grid) const {
    const auto snapshot = std::atomic_load_explicit(&snapshot_, std::memory_order_acquire);
    std::vector<double> variances(grid.size());
    if (!snapshot) {
        const double prior = 3.0 * options_.hyper.sigma_s * options_.hyper.sigma_s;
        std::fill(variances.begin(), variances.end(), prior);
        return variances;
    }
    const GpModel& model = snapshot->models.front();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Eigen::Vector3d x(grid[i].x1, grid[i].x2, grid[i].theta);
        variances[i] = 3.0 * model.predict(x).variance;
    }
    return variances;
}

RobotState DisturbanceEstimator::max_variance_target(const std::vector<RobotState>& grid) const {
    if (grid.empty()) {
        throw std::invalid_argument("max_variance_target: empty grid");
    }
    const std::vector<double> variances = summed_grid_variance(grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (variances[i] > variances[best]) {
            best = i;
        }
    }
    return grid[best];
}

void DisturbanceEstimator::save_dataset(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_dataset: cannot open " + path);
    }
    out << "x1,x2,theta,v,omega,y11,y21,y32,timestamp_s\n";
    out.precision(17);
    for (const auto& s : dataset_) {
        out << s.x1 << ',' << s.x2 << ',' << s.theta << ',' << s.v << ',' << s.omega << ','
            << s.y11 << ',' << s.y21 << ',' << s.y32 << ',' << s.timestamp_s << '\n';
    }
}

std::vector<LabeledSample> DisturbanceEstimator::load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_dataset: cannot open " + path);
    }
    std::vector<LabeledSample> samples;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        LabeledSample s;
        char comma;
        row >> s.x1 >> comma >> s.x2 >> comma >> s.theta >> comma >> s.v >> comma >> s.omega >>
            comma >> s.y11 >> comma >> s.y21 >> comma >> s.y32 >> comma >> s.timestamp_s;
        if (!row) {
            throw std::runtime_error("load_dataset: malformed row in " + path);
        }
        samples.push_back(s);
    }
    return samples;
}

}  // namespace rcbf
