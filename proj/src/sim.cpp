#include "rcbf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rcbf/constraints.hpp"

namespace rcbf {

double wrap_angle(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(angle, two_pi);
    if (wrapped <= -std::numbers::pi) {
        wrapped += two_pi;
    } else if (wrapped > std::numbers::pi) {
        wrapped -= two_pi;
    }
    return wrapped;
}

namespace {

struct StateDeriv {
    double dx1;
    double dx2;
    double dtheta;
};

StateDeriv unicycle_deriv(const RobotState& s, const ControlInput& u,
                          const DisturbanceField& field) {
    const double gain = field.gain_at(s.x1, s.x2);
    return {gain * u.v * std::cos(s.theta), gain * u.v * std::sin(s.theta), gain * u.omega};
}

}  // namespace

std::vector<RobotState> step(const std::vector<RobotState>& states,
                             const std::vector<ControlInput>& inputs,
                             const DisturbanceField& field, double dt) {
    if (states.size() != inputs.size()) {
        throw std::invalid_argument("step: states and inputs differ in length");
    }
    std::vector<RobotState> next;
    next.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const RobotState& s = states[i];
        const ControlInput& u = inputs[i];
        const StateDeriv k1 = unicycle_deriv(s, u, field);
        const RobotState s2{s.x1 + 0.5 * dt * k1.dx1, s.x2 + 0.5 * dt * k1.dx2,
                            s.theta + 0.5 * dt * k1.dtheta};
        const StateDeriv k2 = unicycle_deriv(s2, u, field);
        const RobotState s3{s.x1 + 0.5 * dt * k2.dx1, s.x2 + 0.5 * dt * k2.dx2,
                            s.theta + 0.5 * dt * k2.dtheta};
        const StateDeriv k3 = unicycle_deriv(s3, u, field);
        const RobotState s4{s.x1 + dt * k3.dx1, s.x2 + dt * k3.dx2, s.theta + dt * k3.dtheta};
        const StateDeriv k4 = unicycle_deriv(s4, u, field);

        RobotState out;
        out.x1 = s.x1 + dt / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1);
        out.x2 = s.x2 + dt / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2);
        out.theta =
            wrap_angle(s.theta + dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta +
                                             k4.dtheta));
        next.push_back(out);
    }
    return next;
}

DerivMeasurement measure(const RobotState& prev, const RobotState& next, double dt,
                         double noise_sigma, std::mt19937_64& rng) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("measure: dt must be positive");
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    const double px1 = prev.x1 + noise_sigma * noise(rng);
    const double px2 = prev.x2 + noise_sigma * noise(rng);
    const double pth = prev.theta + noise_sigma * noise(rng);
    const double nx1 = next.x1 + noise_sigma * noise(rng);
    const double nx2 = next.x2 + noise_sigma * noise(rng);
    const double nth = next.theta + noise_sigma * noise(rng);
    DerivMeasurement out;
    out.dx1 = (nx1 - px1) / dt;
    out.dx2 = (nx2 - px2) / dt;
    out.dtheta = wrap_angle(nth - pth) / dt;
    return out;
}

ControlInput proportional_controller(const RobotState& state, const Eigen::Vector2d& goal,
                                     const ControllerGains& gains) {
    const double dx = goal(0) - state.x1;
    const double dy = goal(1) - state.x2;
    const double dist = std::hypot(dx, dy);
    const double bearing = wrap_angle(std::atan2(dy, dx) - state.theta);
    ControlInput u;
    u.v = std::clamp(gains.k_v * dist * std::cos(bearing), -gains.u_max, gains.u_max);
    u.omega = std::clamp(gains.k_omega * bearing, -gains.u_max, gains.u_max);
    return u;
}

double ground_truth_min_h(const std::vector<RobotState>& states, double delta, double l_p) {
    if (states.size() < 2) {
        throw std::invalid_argument("ground_truth_min_h: need at least two robots");
    }
    double min_h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < states.size(); ++i) {
        const Eigen::Vector2d p_i = lookahead_output(states[i], l_p);
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const Eigen::Vector2d p_j = lookahead_output(states[j], l_p);
            min_h = std::min(min_h, collision_barrier(p_i, p_j, delta));
        }
    }
    return min_h;
}

}  // namespace rcbf
