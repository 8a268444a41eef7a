#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "rcbf/hull.hpp"
#include "rcbf/robot.hpp"

namespace rcbf {

// Extended class-K map alpha(s) = gamma * s^3.
class ClassKappa {
public:
    explicit ClassKappa(double gamma);

    double gamma() const { return gamma_; }
    double operator()(double s) const { return gamma_ * s * s * s; }

private:
    double gamma_;
};

// One affine row of a stacked safety constraint: coeffs . u >= rhs.
struct LinearConstraint {
    Eigen::VectorXd coeffs;
    double rhs = 0.0;
};

// Geometry and gain shared by the pairwise collision constraints.
struct BarrierParams {
    double delta;      // robot diameter, m
    double lp;         // look-ahead distance, m
    ClassKappa kappa;  // barrier decay rate
};

// h(p_i, p_j) = |p_i - p_j|^2 - delta^2. Nonnegative iff the disks of
// diameter delta around the two points do not overlap.
double collision_barrier(const Eigen::Vector2d& p_i, const Eigen::Vector2d& p_j, double delta);

// Gradient of collision_barrier with respect to p_i; the gradient with
// respect to p_j is its negation.
Eigen::Vector2d collision_barrier_gradient(const Eigen::Vector2d& p_i, const Eigen::Vector2d& p_j);

// Point a look-ahead distance ahead of the wheel axle along the heading.
Eigen::Vector2d lookahead_output(const RobotState& state, double lp);

// Interval matrix G_p mapping the unicycle input to the velocity of the
// look-ahead point, with the multiplicative disturbance dm propagated
// through the output map. dm must be 3x2 with entries (0,1), (1,1) and
// (2,0) identically zero (angular command cannot move the plane position,
// linear command cannot turn the heading).
IntervalMatrix output_dynamics(const RobotState& state, const IntervalMatrix& dm, double lp);

// Robust row for an additive disturbance hull on the state derivative:
//   grad_h . g u >= -alpha(h) - min_i grad_h . psi_i - grad_h . f.
// drift_term is grad_h . f evaluated at the current state.
LinearConstraint additive_constraint(const Eigen::VectorXd& grad_h, double drift_term,
                                     const Eigen::MatrixXd& g, const HullSet& hull,
                                     const ClassKappa& kappa, double h_val);

// One row per hull vertex for a multiplicative disturbance on the input
// matrix: grad_h . (g + psi_i) u >= -alpha(h) - drift_term.
std::vector<LinearConstraint> multiplicative_constraints(
    const Eigen::VectorXd& grad_h, double drift_term, const Eigen::MatrixXd& g,
    const std::vector<Eigen::MatrixXd>& hull_vertices, const ClassKappa& kappa, double h_val);

// 2^m rows for an entrywise-interval multiplicative disturbance, one per
// corner of the box spanned by grad_h^T dm. Equivalent to enumerating all
// 2^(n m) corner matrices but exponentially cheaper.
std::vector<LinearConstraint> orthotope_constraints(const Eigen::VectorXd& grad_h,
                                                    double drift_term, const Eigen::MatrixXd& g,
                                                    const IntervalMatrix& dm,
                                                    const ClassKappa& kappa, double h_val);

// The 16 corner rows of the pairwise collision constraint between robots i
// and j (0-based, i < j), embedded into the 2N-dimensional ensemble input.
// Every row shares rhs = -gamma h_ij^3.
std::vector<LinearConstraint> pairwise_constraints(const RobotState& state_i,
                                                   const RobotState& state_j,
                                                   const IntervalMatrix& dm_i,
                                                   const IntervalMatrix& dm_j,
                                                   const BarrierParams& params, int robot_count,
                                                   int i, int j);

// Single undisturbed pairwise row (the zero-disturbance limit of
// pairwise_constraints, where all 16 corners coincide).
LinearConstraint pairwise_nominal(const RobotState& state_i, const RobotState& state_j,
                                  const BarrierParams& params, int robot_count, int i, int j);

// Stacks pairwise row blocks vertically into the ensemble form A u >= b.
// Callers pass blocks in pair order (0,1), (0,2), ..., (N-2, N-1).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> assemble_ensemble(
    const std::vector<std::vector<LinearConstraint>>& blocks, Eigen::Index input_dim);

}  // namespace rcbf
