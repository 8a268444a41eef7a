#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace rcbf {

// Gaussian kernel hyperparameters:
//   k(x, x') = sigma_s^2 exp(-1/2 (x - x')^T diag(widths) (x - x')).
// widths holds the per-dimension inverse squared length scales.
struct GpHyperParams {
    double sigma_s = 1.0;
    double sigma_n = 0.0;
    Eigen::VectorXd widths;
};

double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const GpHyperParams& hyper);

// Exact zero-mean Gaussian-process regressor. Fitting factors
// K + sigma_n^2 I once; predictions are triangular solves against the
// cached Cholesky factor.
class GpModel {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    // Inputs are stored row-wise (one sample per row). Factorization failures
    // are retried with diagonal jitter escalating from 1e-10 by factors of 10
    // up to 1e-4 before the fit is rejected.
    static GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                       const GpHyperParams& hyper);

    // Fits several target columns over one shared input set, computing the
    // kernel matrix and its factorization only once.
    static std::vector<GpModel> fit_shared(const Eigen::MatrixXd& inputs,
                                           const std::vector<Eigen::VectorXd>& target_sets,
                                           const GpHyperParams& hyper);

    Prediction predict(const Eigen::VectorXd& query) const;

    double log_marginal_likelihood() const;

    Eigen::Index sample_count() const { return inputs_.rows(); }
    Eigen::Index input_dim() const { return inputs_.cols(); }
    const GpHyperParams& hyper() const { return hyper_; }
    const Eigen::MatrixXd& chol() const { return *chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

private:
    GpModel() = default;

    Eigen::MatrixXd inputs_;
    Eigen::VectorXd targets_;
    GpHyperParams hyper_;
    std::shared_ptr<const Eigen::MatrixXd> chol_;  // lower factor of K + sigma_n^2 I
    Eigen::VectorXd alpha_;                        // (K + sigma_n^2 I)^-1 y
};

// Grid search over hyperparameter candidates by exact log marginal
// likelihood. Candidates whose kernel matrix cannot be factored are skipped;
// if none survive the search is rejected.
GpHyperParams optimize_hyperparameters(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       const std::vector<GpHyperParams>& candidates);

}  // namespace rcbf
