#pragma once

namespace rcbf {

// Unicycle pose: planar position in meters, heading wrapped to (-pi, pi].
struct RobotState {
    double x1 = 0.0;
    double x2 = 0.0;
    double theta = 0.0;
};

// Unicycle input: linear velocity (m/s) and angular velocity (rad/s).
struct ControlInput {
    double v = 0.0;
    double omega = 0.0;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace rcbf
