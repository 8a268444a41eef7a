#include "rcbf/constraints.hpp"

#include <cmath>
#include <stdexcept>

namespace rcbf {

namespace {

bool is_zero_entry(const IntervalMatrix& dm, Eigen::Index i, Eigen::Index j) {
    return dm.lo(i, j) == 0.0 && dm.hi(i, j) == 0.0;
}

// Interval row grad^T G for a 2x2 interval matrix G and a plain gradient.
IntervalVector gradient_times_interval(const Eigen::Vector2d& grad, const IntervalMatrix& g) {
    Eigen::VectorXd lo(2);
    Eigen::VectorXd hi(2);
    for (Eigen::Index j = 0; j < 2; ++j) {
        const Interval e = grad(0) * g.entry(0, j) + grad(1) * g.entry(1, j);
        lo(j) = e.lo;
        hi(j) = e.hi;
    }
    return {lo, hi};
}

}  // namespace

ClassKappa::ClassKappa(double gamma) : gamma_(gamma) {
    if (gamma <= 0.0) {
        throw std::invalid_argument("ClassKappa: gamma must be positive");
    }
}

double collision_barrier(const Eigen::Vector2d& p_i, const Eigen::Vector2d& p_j, double delta) {
    return (p_i - p_j).squaredNorm() - delta * delta;
}

Eigen::Vector2d collision_barrier_gradient(const Eigen::Vector2d& p_i, const Eigen::Vector2d& p_j) {
    return 2.0 * (p_i - p_j);
}

Eigen::Vector2d lookahead_output(const RobotState& state, double lp) {
    return {state.x1 + lp * std::cos(state.theta), state.x2 + lp * std::sin(state.theta)};
}

IntervalMatrix output_dynamics(const RobotState& state, const IntervalMatrix& dm, double lp) {
    if (dm.rows() != 3 || dm.cols() != 2) {
        throw std::invalid_argument("output_dynamics: disturbance matrix must be 3x2");
    }
    if (!is_zero_entry(dm, 0, 1) || !is_zero_entry(dm, 1, 1) || !is_zero_entry(dm, 2, 0)) {
        throw std::invalid_argument(
            "output_dynamics: disturbance matrix violates unicycle sparsity");
    }
    const double c = std::cos(state.theta);
    const double s = std::sin(state.theta);
    // G_p = R(theta) L + [I2 | 0] dm, with L = [[1, 0], [lp d31, lp (1 + d32)]].
    const Interval l21 = lp * dm.entry(2, 0);
    const Interval l22 = lp * (1.0 + dm.entry(2, 1));
    IntervalMatrix gp = IntervalMatrix::zero(2, 2);
    gp.set_entry(0, 0, c + (-s * l21) + dm.entry(0, 0));
    gp.set_entry(0, 1, (-s * l22) + dm.entry(0, 1));
    gp.set_entry(1, 0, s + (c * l21) + dm.entry(1, 0));
    gp.set_entry(1, 1, (c * l22) + dm.entry(1, 1));
    return gp;
}

LinearConstraint additive_constraint(const Eigen::VectorXd& grad_h, double drift_term,
                                     const Eigen::MatrixXd& g, const HullSet& hull,
                                     const ClassKappa& kappa, double h_val) {
    if (hull.dim() != grad_h.size() || g.rows() != grad_h.size()) {
        throw std::invalid_argument("additive_constraint: dimension mismatch");
    }
    LinearConstraint row;
    row.coeffs = g.transpose() * grad_h;
    row.rhs = -kappa(h_val) - min_support(grad_h, hull).value - drift_term;
    return row;
}

std::vector<LinearConstraint> multiplicative_constraints(
    const Eigen::VectorXd& grad_h, double drift_term, const Eigen::MatrixXd& g,
    const std::vector<Eigen::MatrixXd>& hull_vertices, const ClassKappa& kappa, double h_val) {
    if (g.rows() != grad_h.size()) {
        throw std::invalid_argument("multiplicative_constraints: gradient/matrix mismatch");
    }
    if (hull_vertices.empty()) {
        throw std::invalid_argument("multiplicative_constraints: empty vertex list");
    }
    const double rhs = -kappa(h_val) - drift_term;
    std::vector<LinearConstraint> rows;
    rows.reserve(hull_vertices.size());
    for (const auto& psi : hull_vertices) {
        if (psi.rows() != g.rows() || psi.cols() != g.cols()) {
            throw std::invalid_argument("multiplicative_constraints: vertex shape mismatch");
        }
        rows.push_back({(g + psi).transpose() * grad_h, rhs});
    }
    return rows;
}

std::vector<LinearConstraint> orthotope_constraints(const Eigen::VectorXd& grad_h,
                                                    double drift_term, const Eigen::MatrixXd& g,
                                                    const IntervalMatrix& dm,
                                                    const ClassKappa& kappa, double h_val) {
    if (g.rows() != grad_h.size() || g.rows() != dm.rows() || g.cols() != dm.cols()) {
        throw std::invalid_argument("orthotope_constraints: dimension mismatch");
    }
    const Eigen::RowVectorXd nominal = grad_h.transpose() * g;
    const double rhs = -kappa(h_val) - drift_term;
    std::vector<LinearConstraint> rows;
    const auto corners = orthotope_vertices(grad_h, dm);
    rows.reserve(corners.size());
    for (const auto& phi : corners) {
        rows.push_back({(nominal + phi).transpose(), rhs});
    }
    return rows;
}

std::vector<LinearConstraint> pairwise_constraints(const RobotState& state_i,
                                                   const RobotState& state_j,
                                                   const IntervalMatrix& dm_i,
                                                   const IntervalMatrix& dm_j,
                                                   const BarrierParams& params, int robot_count,
                                                   int i, int j) {
    if (i >= j || i < 0 || j >= robot_count) {
        throw std::invalid_argument("pairwise_constraints: require 0 <= i < j < robot_count");
    }
    const Eigen::Vector2d p_i = lookahead_output(state_i, params.lp);
    const Eigen::Vector2d p_j = lookahead_output(state_j, params.lp);
    const double h = collision_barrier(p_i, p_j, params.delta);
    const Eigen::Vector2d grad_i = collision_barrier_gradient(p_i, p_j);

    const IntervalVector row_i =
        gradient_times_interval(grad_i, output_dynamics(state_i, dm_i, params.lp));
    const IntervalVector row_j =
        gradient_times_interval(-grad_i, output_dynamics(state_j, dm_j, params.lp));

    Eigen::VectorXd lo(4);
    Eigen::VectorXd hi(4);
    lo << row_i.lo(0), row_i.lo(1), row_j.lo(0), row_j.lo(1);
    hi << row_i.hi(0), row_i.hi(1), row_j.hi(0), row_j.hi(1);
    const HullSet corners = interval_vector_vertices(IntervalVector(lo, hi));

    const double rhs = -params.kappa(h);
    std::vector<LinearConstraint> rows;
    rows.reserve(corners.size());
    for (const auto& q : corners.vertices()) {
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(2 * robot_count);
        coeffs.segment<2>(2 * i) = q.head<2>();
        coeffs.segment<2>(2 * j) = q.tail<2>();
        rows.push_back({std::move(coeffs), rhs});
    }
    return rows;
}

LinearConstraint pairwise_nominal(const RobotState& state_i, const RobotState& state_j,
                                  const BarrierParams& params, int robot_count, int i, int j) {
    if (i >= j || i < 0 || j >= robot_count) {
        throw std::invalid_argument("pairwise_nominal: require 0 <= i < j < robot_count");
    }
    const Eigen::Vector2d p_i = lookahead_output(state_i, params.lp);
    const Eigen::Vector2d p_j = lookahead_output(state_j, params.lp);
    const double h = collision_barrier(p_i, p_j, params.delta);
    const Eigen::Vector2d grad_i = collision_barrier_gradient(p_i, p_j);

    const auto nominal_row = [&](const RobotState& s, const Eigen::Vector2d& grad) {
        const double c = std::cos(s.theta);
        const double sn = std::sin(s.theta);
        // grad^T R(theta) diag(1, lp)
        return Eigen::Vector2d(grad(0) * c + grad(1) * sn,
                               params.lp * (-grad(0) * sn + grad(1) * c));
    };

    LinearConstraint row;
    row.coeffs = Eigen::VectorXd::Zero(2 * robot_count);
    row.coeffs.segment<2>(2 * i) = nominal_row(state_i, grad_i);
    row.coeffs.segment<2>(2 * j) = nominal_row(state_j, -grad_i);
    row.rhs = -params.kappa(h);
    return row;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_ensemble(
    const std::vector<std::vector<LinearConstraint>>& blocks, Eigen::Index input_dim) {
    Eigen::Index total = 0;
    for (const auto& block : blocks) {
        total += static_cast<Eigen::Index>(block.size());
    }
    Eigen::MatrixXd a(total, input_dim);
    Eigen::VectorXd b(total);
    Eigen::Index r = 0;
    for (const auto& block : blocks) {
        for (const auto& row : block) {
            if (row.coeffs.size() != input_dim) {
                throw std::invalid_argument("assemble_ensemble: row dimension mismatch");
            }
            a.row(r) = row.coeffs.transpose();
            b(r) = row.rhs;
            ++r;
        }
    }
    return {std::move(a), std::move(b)};
}

}  // namespace rcbf
