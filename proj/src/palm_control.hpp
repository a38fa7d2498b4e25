#pragma once

#include <stdexcept>

#include "geometry.hpp"

namespace etroll {

struct SingularAngle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Controller view of the gripper at one instant. theta_target is the pulling
// finger angle by definition; d_theta() is the parallelism error the palm
// drives to zero.
struct GripperState {
    double width = 0.0;        // mm
    double theta_pull = 0.0;   // rad
    double theta_push = 0.0;   // rad
    double l_mid = 85.0;       // mm, joint to finger midpoint
    Side pull_role = Side::Right;

    double theta_target() const { return theta_pull; }
    double d_theta() const { return theta_pull - theta_push; }
};

struct ControllerParams {
    double gain = 1.0;
    double rate_limit_mm = 2.0;   // per control tick
    double width_min = 50.0;
    double width_max = 150.0;
    double angle_guard_rad = 0.05;
    double l_mid = 85.0;
};

struct ObjectPositionEstimate {
    double l = 0.0;       // joint to contact along the pushing finger (mm)
    double l_roll = 0.0;  // rolled displacement from the finger midpoint (mm)
};

// dw/dtheta, the palm-width error per unit angle error: -l / sin(theta_pull).
double error_ratio(double l, double theta_pull, double guard_rad = 0.05);

// l = l_mid - (w/2) cos(theta_pull), with the rolled displacement exposed.
ObjectPositionEstimate estimate_object_position(double width, double theta_pull,
                                                double l_mid = 85.0);

// Combined law: dw = [ (w/2) cot(theta_pull) - l_mid csc(theta_pull) ] * d_theta.
// Algebraically identical to error_ratio(estimate_object_position(...)) * d_theta.
double palm_correction(const GripperState& state, double guard_rad = 0.05);

struct TickResult {
    double width_command = 0.0;
    double correction = 0.0;  // applied width change after gain and rate limit
    bool saturated = false;
};

// One negative-feedback update of the palm width. The correction law is
// derived in the frame where the pulling finger is on the right; states with
// the pull role on the left are mirrored into that frame first.
TickResult controller_tick(const GripperState& state, const ControllerParams& params);

}  // namespace etroll
