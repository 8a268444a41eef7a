#include "rcbf/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcbf {

namespace {

constexpr int kMaxIterations = 200;

struct Rows {
    Eigen::MatrixXd a;  // one constraint a_r^T x >= b_r per row
    Eigen::VectorXd b;
};

// Stacks the problem rows followed by the box rows x_k >= -u_max and
// -x_k >= -u_max, so box multipliers land at fixed indices.
Rows stack_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double u_max) {
    const Eigen::Index m = a.rows();
    const Eigen::Index d = a.cols();
    Rows rows;
    rows.a = Eigen::MatrixXd::Zero(m + 2 * d, d);
    rows.b = Eigen::VectorXd::Zero(m + 2 * d);
    rows.a.topRows(m) = a;
    rows.b.head(m) = b;
    for (Eigen::Index k = 0; k < d; ++k) {
        rows.a(m + 2 * k, k) = 1.0;
        rows.b(m + 2 * k) = -u_max;
        rows.a(m + 2 * k + 1, k) = -1.0;
        rows.b(m + 2 * k + 1) = -u_max;
    }
    return rows;
}

double max_violation(const Rows& rows, const Eigen::VectorXd& x) {
    if (rows.a.rows() == 0) {
        return 0.0;
    }
    return std::max(0.0, (rows.b - rows.a * x).maxCoeff());
}

// Greedily keeps rows whose normals are linearly independent, in the order
// given. The working set must stay independent for the null-space solves.
std::vector<int> independent_subset(const Rows& rows, const std::vector<int>& candidates) {
    std::vector<int> kept;
    const Eigen::Index d = rows.a.cols();
    Eigen::MatrixXd normals(d, 0);
    for (int r : candidates) {
        if (static_cast<Eigen::Index>(kept.size()) == d) {
            break;
        }
        Eigen::MatrixXd trial(d, normals.cols() + 1);
        trial.leftCols(normals.cols()) = normals;
        trial.col(normals.cols()) = rows.a.row(r).transpose();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
        qr.setThreshold(1e-10);
        if (qr.rank() == trial.cols()) {
            kept.push_back(r);
            normals = std::move(trial);
        }
    }
    return kept;
}

struct InnerResult {
    Eigen::VectorXd x;
    std::vector<int> active;
    Eigen::VectorXd lambda;  // aligned with `active`
    bool converged = false;
    int iterations = 0;
};

// Primal active-set loop for min 1/2 x^T diag(h) x + g0^T x over the rows,
// started from a feasible point with an independent initial working set.
// Ties in both the drop and the blocking choice resolve to the smallest row
// index, which prevents cycling on the duplicate rows the constraint
// generators routinely emit.
InnerResult active_set_minimize(const Eigen::VectorXd& h_diag, const Eigen::VectorXd& g0,
                                const Rows& rows, Eigen::VectorXd x, std::vector<int> working,
                                int max_iter) {
    const Eigen::Index d = x.size();
    const Eigen::Index total = rows.a.rows();
    const double step_tol = 1e-12;
    const double lambda_tol = 1e-10;

    InnerResult result;
    Eigen::VectorXd lambda_w;
    for (int iter = 0; iter < max_iter; ++iter) {
        result.iterations = iter + 1;
        const Eigen::VectorXd grad = h_diag.cwiseProduct(x) + g0;
        const Eigen::Index k = static_cast<Eigen::Index>(working.size());

        Eigen::VectorXd p;
        if (k == 0) {
            p = -grad.cwiseQuotient(h_diag);
        } else if (k == d) {
            p = Eigen::VectorXd::Zero(d);
        } else {
            Eigen::MatrixXd at(d, k);
            for (Eigen::Index c = 0; c < k; ++c) {
                at.col(c) = rows.a.row(working[static_cast<std::size_t>(c)]).transpose();
            }
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
            const Eigen::MatrixXd q = qr.householderQ();
            const Eigen::MatrixXd z = q.rightCols(d - k);
            const Eigen::MatrixXd reduced = z.transpose() * h_diag.asDiagonal() * z;
            const Eigen::VectorXd rhs = -z.transpose() * grad;
            p = z * reduced.llt().solve(rhs);
        }

        if (p.lpNorm<Eigen::Infinity>() <= step_tol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            if (k == 0) {
                result.x = x;
                result.active = working;
                result.lambda.resize(0);
                result.converged = true;
                return result;
            }
            Eigen::MatrixXd at(d, k);
            for (Eigen::Index c = 0; c < k; ++c) {
                at.col(c) = rows.a.row(working[static_cast<std::size_t>(c)]).transpose();
            }
            lambda_w = at.colPivHouseholderQr().solve(grad);

            int drop = -1;
            for (Eigen::Index c = 0; c < k; ++c) {
                if (lambda_w(c) < -lambda_tol) {
                    const int row = working[static_cast<std::size_t>(c)];
                    if (drop < 0 || row < working[static_cast<std::size_t>(drop)]) {
                        drop = static_cast<int>(c);
                    }
                }
            }
            if (drop < 0) {
                result.x = x;
                result.active = working;
                result.lambda = lambda_w;
                result.converged = true;
                return result;
            }
            working.erase(working.begin() + drop);
            continue;
        }

        // Ratio test over rows outside the working set whose slack shrinks
        // along p.
        double alpha = 1.0;
        int blocking = -1;
        for (Eigen::Index r = 0; r < total; ++r) {
            if (std::find(working.begin(), working.end(), static_cast<int>(r)) != working.end()) {
                continue;
            }
            const double denom = rows.a.row(r).dot(p);
            if (denom >= -1e-13) {
                continue;
            }
            const double slack = std::max(0.0, rows.a.row(r).dot(x) - rows.b(r));
            const double ratio = slack / (-denom);
            if (ratio < alpha - 1e-13) {
                alpha = ratio;
                blocking = static_cast<int>(r);
            }
        }
        x += alpha * p;
        if (blocking >= 0) {
            working.insert(std::lower_bound(working.begin(), working.end(), blocking), blocking);
        }
    }

    result.x = x;
    result.active = working;
    result.lambda = lambda_w;
    result.converged = false;
    return result;
}

void validate(const QpProblem& problem) {
    const Eigen::Index d = problem.u_nom.size();
    if (d < 1) {
        throw std::invalid_argument("QpProblem: empty input vector");
    }
    if (problem.weight.size() != d) {
        throw std::invalid_argument("QpProblem: weight dimension mismatch");
    }
    if ((problem.weight.array() <= 0.0).any()) {
        throw std::invalid_argument("QpProblem: weight must be strictly positive");
    }
    if (problem.A.rows() != problem.b.size()) {
        throw std::invalid_argument("QpProblem: A and b row counts differ");
    }
    if (problem.A.rows() > 0 && problem.A.cols() != d) {
        throw std::invalid_argument("QpProblem: A column count mismatch");
    }
    if (!(problem.u_max > 0.0)) {
        throw std::invalid_argument("QpProblem: u_max must be positive");
    }
}

// Exact-penalty feasibility stage: minimize over (x, s)
//   1/2 |x - x_ref|^2 + s^2 + penalty * s
// subject to a_r^T x + s >= b_r, the box rows, and s >= 0. Once the penalty
// exceeds the multiplier norm of the original problem the optimum has s = 0
// exactly, so escalation either produces a feasible x or certifies
// infeasibility.
struct PhaseOneResult {
    bool feasible = false;
    Eigen::VectorXd x;
    int iterations = 0;
};

PhaseOneResult phase_one(const Rows& rows, const Eigen::VectorXd& x_ref, double u_max) {
    const Eigen::Index d = x_ref.size();
    const Eigen::Index m = rows.a.rows();
    Rows aug;
    aug.a = Eigen::MatrixXd::Zero(m + 1, d + 1);
    aug.b = Eigen::VectorXd::Zero(m + 1);
    aug.a.topLeftCorner(m, d) = rows.a;
    aug.a.block(0, d, m - 2 * d, 1).setOnes();  // slack only on the problem rows
    aug.b.head(m) = rows.b;
    aug.a(m, d) = 1.0;  // s >= 0

    Eigen::VectorXd x0 = x_ref.cwiseMax(-u_max).cwiseMin(u_max);
    const double violation =
        m > 2 * d ? std::max(0.0, (rows.b.head(m - 2 * d) - rows.a.topRows(m - 2 * d) * x0).maxCoeff())
                  : 0.0;

    Eigen::VectorXd h_diag(d + 1);
    h_diag.head(d).setOnes();
    h_diag(d) = 2.0;

    const double scale = 1.0 + rows.b.lpNorm<Eigen::Infinity>();
    PhaseOneResult result;
    double penalty = 10.0 * scale;
    for (int round = 0; round < 4; ++round) {
        Eigen::VectorXd g0(d + 1);
        g0.head(d) = -x0;
        g0(d) = penalty;
        Eigen::VectorXd start(d + 1);
        start.head(d) = x0;
        start(d) = violation;
        InnerResult inner = active_set_minimize(h_diag, g0, aug, start,
                                                independent_subset(aug, {}), kMaxIterations);
        result.iterations += inner.iterations;
        if (inner.x(d) <= 1e-9 * scale) {
            result.feasible = true;
            result.x = inner.x.head(d);
            return result;
        }
        penalty *= 100.0;
    }
    return result;
}

}  // namespace

void ActiveSetQp::reset() {
    warm_valid_ = false;
    warm_active_.clear();
}

QpSolution ActiveSetQp::solve(const QpProblem& problem) {
    validate(problem);
    const Eigen::Index d = problem.u_nom.size();
    const Rows rows = stack_rows(problem.A, problem.b, problem.u_max);
    const Eigen::Index total = rows.a.rows();

    const Eigen::VectorXd h_diag = 2.0 * problem.weight.array().square();
    const Eigen::VectorXd g0 = -h_diag.cwiseProduct(problem.u_nom);
    const double feas_tol = 1e-9 * (1.0 + rows.b.lpNorm<Eigen::Infinity>());

    QpSolution solution;

    // Pick a feasible start: previous solution, clipped nominal, rest, or
    // the elastic stage for the rare remainder.
    Eigen::VectorXd x;
    std::vector<int> seed_active;
    bool have_start = false;
    int phase_iterations = 0;
    if (warm_valid_ && warm_rows_ == total && warm_x_.size() == d &&
        max_violation(rows, warm_x_) <= feas_tol) {
        x = warm_x_;
        seed_active = warm_active_;
        have_start = true;
    }
    if (!have_start) {
        Eigen::VectorXd clipped = problem.u_nom.cwiseMax(-problem.u_max).cwiseMin(problem.u_max);
        if (max_violation(rows, clipped) <= feas_tol) {
            x = std::move(clipped);
            have_start = true;
        }
    }
    if (!have_start) {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
        if (max_violation(rows, zero) <= feas_tol) {
            x = std::move(zero);
            have_start = true;
        }
    }
    if (!have_start) {
        PhaseOneResult phase = phase_one(rows, problem.u_nom, problem.u_max);
        phase_iterations = phase.iterations;
        if (!phase.feasible) {
            solution.u_star = Eigen::VectorXd::Zero(d);
            solution.status = QpStatus::infeasible;
            solution.iterations = phase.iterations;
            solution.primal_residual = max_violation(rows, solution.u_star);
            solution.dual_residual = std::numeric_limits<double>::quiet_NaN();
            solution.lambda = Eigen::VectorXd::Zero(total);
            warm_valid_ = false;
            return solution;
        }
        x = phase.x;
    }

    // Initial working set: active rows at the start, seeded from the warm
    // active set, filtered down to an independent subset.
    std::vector<int> candidates;
    const double act_tol = 1e-9 * (1.0 + rows.b.lpNorm<Eigen::Infinity>());
    for (int r : seed_active) {
        if (r >= 0 && r < total && std::abs(rows.a.row(r).dot(x) - rows.b(r)) <= act_tol) {
            candidates.push_back(r);
        }
    }
    for (Eigen::Index r = 0; r < total; ++r) {
        if (std::abs(rows.a.row(r).dot(x) - rows.b(r)) <= act_tol &&
            std::find(candidates.begin(), candidates.end(), static_cast<int>(r)) ==
                candidates.end()) {
            candidates.push_back(static_cast<int>(r));
        }
    }
    std::vector<int> working = independent_subset(rows, candidates);
    std::sort(working.begin(), working.end());

    InnerResult inner = active_set_minimize(h_diag, g0, rows, std::move(x), std::move(working),
                                            kMaxIterations);

    solution.u_star = inner.x;
    solution.status = inner.converged ? QpStatus::optimal : QpStatus::max_iterations;
    solution.iterations = phase_iterations + inner.iterations;
    solution.primal_residual = max_violation(rows, inner.x);
    solution.lambda = Eigen::VectorXd::Zero(total);
    for (std::size_t c = 0; c < inner.active.size(); ++c) {
        if (inner.lambda.size() == static_cast<Eigen::Index>(inner.active.size())) {
            solution.lambda(inner.active[c]) = std::max(0.0, inner.lambda(static_cast<Eigen::Index>(c)));
        }
    }
    const Eigen::VectorXd stationarity =
        h_diag.cwiseProduct(inner.x) + g0 - rows.a.transpose() * solution.lambda;
    solution.dual_residual = stationarity.lpNorm<Eigen::Infinity>();

    warm_valid_ = true;
    warm_rows_ = total;
    warm_x_ = inner.x;
    warm_active_ = inner.active;
    return solution;
}

}  // namespace rcbf
