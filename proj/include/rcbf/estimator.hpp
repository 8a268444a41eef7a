#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcbf/gp.hpp"
#include "rcbf/hull.hpp"
#include "rcbf/robot.hpp"

namespace rcbf {

// One multiplicative-disturbance training sample for the unicycle: the state
// at which it was taken, the input that generated it, and the three labels
// for the nonzero disturbance entries.
struct LabeledSample {
    double x1 = 0.0;
    double x2 = 0.0;
    double theta = 0.0;
    double v = 0.0;
    double omega = 0.0;
    double y11 = 0.0;
    double y21 = 0.0;
    double y32 = 0.0;
    double timestamp_s = 0.0;
};

struct UnicycleLabels {
    double y11 = 0.0;
    double y21 = 0.0;
    double y32 = 0.0;
};

// Additive-disturbance label: the measured state derivative minus the
// modelled one, one scalar per state dimension.
Eigen::VectorXd additive_labels(const Eigen::VectorXd& measured_deriv,
                                const Eigen::VectorXd& drift, const Eigen::MatrixXd& input_matrix,
                                const Eigen::VectorXd& input);

// Multiplicative-disturbance labels for the unicycle sparsity. Returns
// nullopt when |v| or |omega| is too small for the division to be
// meaningful; such samples are discarded rather than treated as errors.
std::optional<UnicycleLabels> multiplicative_labels(double measured_dx, double measured_dy,
                                                    double measured_dtheta,
                                                    const RobotState& state,
                                                    const ControlInput& input,
                                                    double v_min = 1e-3, double omega_min = 1e-2);

// Online estimator of the 3x2 unicycle disturbance matrix. One GP per
// nonzero entry, all three trained over the same (x1, x2, theta) inputs.
// Samples accumulate in a buffer and the models refit once a full batch has
// arrived; each refit publishes a new immutable snapshot, so readers may
// keep predicting from the previous one while a refit is in flight.
class DisturbanceEstimator {
public:
    struct Options {
        GpHyperParams hyper;
        double k_c = 2.0;
        double prior_lo = -0.3;
        double prior_hi = 0.3;
        int batch_size = 50;
        int max_samples = 2000;  // oldest samples evicted beyond this
    };

    explicit DisturbanceEstimator(Options options);

    void add_sample(const LabeledSample& sample);

    // Refits over the cumulative dataset when at least one full batch is
    // buffered; returns true when a refit happened.
    bool maybe_refit();

    // Entrywise interval for the disturbance matrix at the query state:
    // mean +/- k_c sigma per fitted entry, or the configured prior interval
    // on every nonzero entry while no batch has been fitted yet.
    IntervalMatrix disturbance_interval(const RobotState& query) const;

    // Per-entry posterior at the query, in (1,1), (2,1), (3,2) order.
    std::array<GpModel::Prediction, 3> predict_entries(const RobotState& query) const;

    // Summed posterior variance of the three entry models at each grid
    // state. The models share inputs and kernel, so their variances
    // coincide and one evaluation per state suffices. Uniform sigma_s^2
    // per model before the first fit.
    std::vector<double> summed_grid_variance(const std::vector<RobotState>& grid) const;

    // Grid state with the largest summed posterior variance; ties resolve to
    // the smallest grid index. Uniform prior variance before the first fit
    // makes that the first grid entry.
    RobotState max_variance_target(const std::vector<RobotState>& grid) const;

    bool fitted() const { return snapshot_ != nullptr; }
    int batches_fitted() const { return batches_; }
    std::size_t sample_count() const { return dataset_.size(); }
    std::size_t buffered_count() const { return buffer_.size(); }
    const std::vector<LabeledSample>& dataset() const { return dataset_; }
    const Options& options() const { return options_; }

    void save_dataset(const std::string& path) const;
    static std::vector<LabeledSample> load_dataset(const std::string& path);

private:
    struct Snapshot {
        std::vector<GpModel> models;  // y11, y21, y32
    };

    Options options_;
    std::vector<LabeledSample> dataset_;
    std::vector<LabeledSample> buffer_;
    std::shared_ptr<const Snapshot> snapshot_;
    int batches_ = 0;
};

}  // namespace rcbf
