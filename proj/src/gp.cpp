#include "rcbf/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rcbf {

namespace {

void validate_hyper(const GpHyperParams& hyper) {
    if (!(hyper.sigma_s > 0.0)) {
        throw std::invalid_argument("GpHyperParams: sigma_s must be positive");
    }
    if (hyper.sigma_n < 0.0) {
        throw std::invalid_argument("GpHyperParams: sigma_n must be nonnegative");
    }
    if ((hyper.widths.array() <= 0.0).any()) {
        throw std::invalid_argument("GpHyperParams: widths must be positive");
    }
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const GpHyperParams& hyper) {
    const Eigen::Index n = inputs.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = hyper.sigma_s * hyper.sigma_s;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            k(i, j) = gaussian_kernel(inputs.row(i), inputs.row(j), hyper);
            k(j, i) = k(i, j);
        }
    }
    return k;
}

// Lower Cholesky factor of K + sigma_n^2 I, retried with escalating jitter.
Eigen::MatrixXd factor_with_jitter(Eigen::MatrixXd k, double sigma_n) {
    k.diagonal().array() += sigma_n * sigma_n;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd trial = k;
        if (jitter > 0.0) {
            trial.diagonal().array() += jitter;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(trial);
        if (llt.info() == Eigen::Success) {
            return llt.matrixL();
        }
        jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
        if (jitter > 1e-4) {
            break;
        }
    }
    throw std::runtime_error("GpModel: kernel matrix factorization failed");
}

}  // namespace

double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const GpHyperParams& hyper) {
    const Eigen::VectorXd diff = a - b;
    const double quad = diff.cwiseProduct(hyper.widths).dot(diff);
    return hyper.sigma_s * hyper.sigma_s * std::exp(-0.5 * quad);
}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     const GpHyperParams& hyper) {
    return fit_shared(inputs, {targets}, hyper).front();
}

std::vector<GpModel> GpModel::fit_shared(const Eigen::MatrixXd& inputs,
                                         const std::vector<Eigen::VectorXd>& target_sets,
                                         const GpHyperParams& hyper) {
    validate_hyper(hyper);
    if (inputs.rows() < 1) {
        throw std::invalid_argument("GpModel: need at least one training sample");
    }
    if (inputs.cols() != hyper.widths.size()) {
        throw std::invalid_argument("GpModel: widths dimension mismatch");
    }
    if (target_sets.empty()) {
        throw std::invalid_argument("GpModel: no target sets");
    }
    for (const auto& y : target_sets) {
        if (y.size() != inputs.rows()) {
            throw std::invalid_argument("GpModel: inputs and targets differ in length");
        }
    }

    auto chol = std::make_shared<const Eigen::MatrixXd>(
        factor_with_jitter(kernel_matrix(inputs, hyper), hyper.sigma_n));

    std::vector<GpModel> models;
    models.reserve(target_sets.size());
    for (const auto& y : target_sets) {
        GpModel model;
        model.inputs_ = inputs;
        model.targets_ = y;
        model.hyper_ = hyper;
        model.chol_ = chol;
        Eigen::VectorXd alpha = chol->triangularView<Eigen::Lower>().solve(y);
        chol->transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);
        model.alpha_ = std::move(alpha);
        models.push_back(std::move(model));
    }
    return models;
}

GpModel::Prediction GpModel::predict(const Eigen::VectorXd& query) const {
    if (query.size() != input_dim()) {
        throw std::invalid_argument("GpModel: query dimension mismatch");
    }
    const Eigen::Index n = sample_count();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k_star(i) = gaussian_kernel(inputs_.row(i), query, hyper_);
    }
    Prediction out;
    out.mean = k_star.dot(alpha_);
    const Eigen::VectorXd v = chol_->triangularView<Eigen::Lower>().solve(k_star);
    out.variance = hyper_.sigma_s * hyper_.sigma_s - v.squaredNorm();
    return out;
}

double GpModel::log_marginal_likelihood() const {
    const double n = static_cast<double>(sample_count());
    const double quad = targets_.dot(alpha_);
    const double log_det = chol_->diagonal().array().log().sum();
    return -0.5 * quad - log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GpHyperParams optimize_hyperparameters(const Eigen::MatrixXd& inputs,
                                       const Eigen::VectorXd& targets,
                                       const std::vector<GpHyperParams>& candidates) {
    if (inputs.rows() < 2) {
        throw std::invalid_argument("optimize_hyperparameters: need at least two samples");
    }
    if (candidates.empty()) {
        throw std::invalid_argument("optimize_hyperparameters: empty candidate grid");
    }
    const GpHyperParams* best = nullptr;
    double best_lml = 0.0;
    for (const auto& candidate : candidates) {
        double lml;
        try {
            lml = GpModel::fit(inputs, targets, candidate).log_marginal_likelihood();
        } catch (const std::runtime_error&) {
            continue;
        }
        if (best == nullptr || lml > best_lml) {
            best = &candidate;
            best_lml = lml;
        }
    }
    if (best == nullptr) {
        throw std::runtime_error("optimize_hyperparameters: every candidate failed to factor");
    }
    return *best;
}

}  // namespace rcbf
