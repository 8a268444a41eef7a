#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

#include "rcbf/robot.hpp"

namespace rcbf {

struct Rect {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
};

// Ground-truth spatial disturbance: inputs are scaled by `gain` inside the
// region (equivalently, the input matrix picks up (gain - 1) times itself).
struct DisturbanceField {
    Rect region;
    double gain = 1.0;

    double gain_at(double x, double y) const { return region.contains(x, y) ? gain : 1.0; }
};

// Physical and experiment parameters. Defaults are the differential-drive
// testbed values; l_b and r describe the wheelbase for documentation and
// rendering, the unicycle abstraction governs motion.
struct ArenaConfig {
    Rect bounds{-1.6, 1.6, -1.0, 1.0};
    double dt = 0.01;          // s
    double l_p = 0.03;         // look-ahead distance, m
    double l_b = 0.105;        // wheel base length, m
    double r = 0.016;          // wheel radius, m
    double delta = 0.12;       // robot diameter, m
    double gamma = 700.0;      // barrier decay gain
    double k_c = 2.0;          // confidence multiplier
    double u_max = 0.3;        // input box bound
    double noise_sigma = 1e-3; // position measurement noise, m
    std::uint64_t seed = 0;
};

// One RK4 step of the disturbed unicycle fleet under zero-order-hold
// inputs. Callers clamp inputs to the box beforehand. Headings come back
// wrapped to (-pi, pi].
std::vector<RobotState> step(const std::vector<RobotState>& states,
                             const std::vector<ControlInput>& inputs,
                             const DisturbanceField& field, double dt);

struct DerivMeasurement {
    double dx1 = 0.0;
    double dx2 = 0.0;
    double dtheta = 0.0;
};

// Finite difference of noise-corrupted states over a baseline dt. The
// heading difference is taken on the circle, so a wrap never produces a
// 2 pi jump.
DerivMeasurement measure(const RobotState& prev, const RobotState& next, double dt,
                         double noise_sigma, std::mt19937_64& rng);

struct ControllerGains {
    double k_v = 1.0;
    double k_omega = 2.0;
    double u_max = 0.3;
};

// Drive-to-point controller: v tracks the projected distance, omega the
// bearing error, both clamped to the input box. The robot reverses when the
// goal is behind it.
ControlInput proportional_controller(const RobotState& state, const Eigen::Vector2d& goal,
                                     const ControllerGains& gains);

// Minimum pairwise collision barrier over the fleet, evaluated at the
// look-ahead centroids. Negative means two robots overlap.
double ground_truth_min_h(const std::vector<RobotState>& states, double delta, double l_p);

}  // namespace rcbf
