#pragma once

// Brute-force reference solver for small instances of the safety-filter
// program, independent of the production active-set path: enumerate every
// candidate active set, solve the equality-constrained subproblem by block
// elimination, and keep the KKT-consistent point. Test-only.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "rcbf/qp.hpp"

namespace rcbf_test {

struct OracleResult {
    bool feasible = false;
    Eigen::VectorXd u;
};

inline OracleResult enumerate_active_sets(const rcbf::QpProblem& problem) {
    const Eigen::Index d = problem.u_nom.size();
    const Eigen::Index m = problem.A.rows();
    const Eigen::Index total = m + 2 * d;

    Eigen::MatrixXd rows(total, d);
    Eigen::VectorXd rhs(total);
    rows.topRows(m) = problem.A;
    rhs.head(m) = problem.b;
    for (Eigen::Index k = 0; k < d; ++k) {
        rows.row(m + 2 * k).setZero();
        rows(m + 2 * k, k) = 1.0;
        rhs(m + 2 * k) = -problem.u_max;
        rows.row(m + 2 * k + 1).setZero();
        rows(m + 2 * k + 1, k) = -1.0;
        rhs(m + 2 * k + 1) = -problem.u_max;
    }

    const Eigen::VectorXd h = 2.0 * problem.weight.array().square();
    const Eigen::VectorXd h_inv = h.cwiseInverse();
    const Eigen::VectorXd g0 = -h.cwiseProduct(problem.u_nom);

    const auto kkt_point = [&](const std::vector<Eigen::Index>& subset)
        -> std::optional<Eigen::VectorXd> {
        const Eigen::Index k = static_cast<Eigen::Index>(subset.size());
        Eigen::VectorXd x;
        if (k == 0) {
            x = problem.u_nom;
        } else {
            Eigen::MatrixXd a_s(k, d);
            Eigen::VectorXd b_s(k);
            for (Eigen::Index c = 0; c < k; ++c) {
                a_s.row(c) = rows.row(subset[static_cast<std::size_t>(c)]);
                b_s(c) = rhs(subset[static_cast<std::size_t>(c)]);
            }
            const Eigen::MatrixXd schur = a_s * h_inv.asDiagonal() * a_s.transpose();
            Eigen::FullPivLU<Eigen::MatrixXd> lu(schur);
            if (!lu.isInvertible()) {
                return std::nullopt;
            }
            const Eigen::VectorXd lambda = lu.solve(b_s + a_s * h_inv.cwiseProduct(g0));
            if ((lambda.array() < -1e-9).any()) {
                return std::nullopt;
            }
            x = h_inv.cwiseProduct(a_s.transpose() * lambda - g0);
        }
        if (((rows * x - rhs).array() < -1e-9).any()) {
            return std::nullopt;
        }
        return x;
    };

    OracleResult best;
    double best_objective = 0.0;
    std::vector<Eigen::Index> subset;
    const auto consider = [&](const Eigen::VectorXd& x) {
        const double objective =
            (problem.weight.cwiseProduct(problem.u_nom - x)).squaredNorm();
        if (!best.feasible || objective < best_objective) {
            best.feasible = true;
            best.u = x;
            best_objective = objective;
        }
    };

    // Depth-first enumeration of index subsets of size at most d.
    const std::function<void(Eigen::Index)> recurse = [&](Eigen::Index start) {
        if (auto x = kkt_point(subset)) {
            consider(*x);
        }
        if (static_cast<Eigen::Index>(subset.size()) == d) {
            return;
        }
        for (Eigen::Index r = start; r < total; ++r) {
            subset.push_back(r);
            recurse(r + 1);
            subset.pop_back();
        }
    };
    recurse(0);
    return best;
}

struct RandomProblemOptions {
    int max_dim = 3;
    int max_rows = 6;
    double infeasible_fraction = 0.2;
};

inline rcbf::QpProblem random_problem(std::mt19937_64& rng,
                                      const RandomProblemOptions& options = {}) {
    std::uniform_int_distribution<int> dim_dist(1, options.max_dim);
    std::uniform_int_distribution<int> row_dist(0, options.max_rows);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);

    const int d = dim_dist(rng);
    const int m = row_dist(rng);
    rcbf::QpProblem problem;
    problem.u_max = 1.0 + 2.0 * unit(rng);
    problem.weight.resize(d);
    problem.u_nom.resize(d);
    for (int k = 0; k < d; ++k) {
        problem.weight(k) = 0.5 + 1.5 * unit(rng);
        problem.u_nom(k) = 2.0 * coeff(rng);
    }
    problem.A.resize(m, d);
    problem.b.resize(m);

    const bool force_infeasible = unit(rng) < options.infeasible_fraction && m > 0;
    // Feasible instances keep an interior point with margin; infeasible ones
    // get a pair of rows no point in the box can satisfy together.
    Eigen::VectorXd anchor(d);
    for (int k = 0; k < d; ++k) {
        anchor(k) = 0.8 * problem.u_max * coeff(rng);
    }
    for (int r = 0; r < m; ++r) {
        for (int k = 0; k < d; ++k) {
            problem.A(r, k) = coeff(rng);
        }
        if (problem.A.row(r).norm() < 1e-3) {
            problem.A(r, 0) = 1.0;
        }
        problem.b(r) = problem.A.row(r).dot(anchor) - 0.05 - unit(rng);
    }
    if (force_infeasible) {
        const double reach = problem.A.row(0).lpNorm<1>() * problem.u_max;
        problem.b(0) = reach + 0.5 + unit(rng);  // beyond the box's reach
    }
    return problem;
}

}  // namespace rcbf_test
