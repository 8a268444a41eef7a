#pragma once

#include <Eigen/Core>

#include <vector>

namespace rcbf {

// Safety-filter program
//   min_u  | diag(weight) (u_nom - u) |^2
//   s.t.   A u >= b,  |u|_inf <= u_max.
struct QpProblem {
    Eigen::VectorXd weight;  // diagonal of the weighting matrix, strictly positive
    Eigen::VectorXd u_nom;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double u_max = 0.0;
};

enum class QpStatus {
    optimal,
    max_iterations,
    infeasible,
};

struct QpSolution {
    Eigen::VectorXd u_star;
    QpStatus status = QpStatus::optimal;
    int iterations = 0;
    double primal_residual = 0.0;  // max constraint violation, 0 when feasible
    double dual_residual = 0.0;    // stationarity residual of the KKT system
    // Multipliers for the stacked rows: the A rows first, then the box rows
    // u_k >= -u_max, -u_k >= -u_max interleaved per coordinate.
    Eigen::VectorXd lambda;
};

// Dense primal active-set solver. The box constraint is expanded into 2 dim
// rows internally. Instances remember the previous solution and active set
// and reuse them as a warm start when the next problem has the same shape,
// which is what makes per-tick resolving cheap inside the control loop.
// Problems with no trivially feasible point go through an exact-penalty
// elastic phase first; if that cannot drive the violation to zero the
// problem is reported infeasible.
class ActiveSetQp {
public:
    QpSolution solve(const QpProblem& problem);

    // Drops the warm-start memory.
    void reset();

private:
    bool warm_valid_ = false;
    Eigen::Index warm_rows_ = 0;
    Eigen::VectorXd warm_x_;
    std::vector<int> warm_active_;
};

}  // namespace rcbf
