#include "palm_control.hpp"

#include <algorithm>
#include <cmath>

namespace etroll {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_guard(double theta_pull, double guard) {
    if (theta_pull < guard || theta_pull > kPi - guard)
        throw SingularAngle("pulling finger angle too close to the palm baseline");
}
}  // namespace

double error_ratio(double l, double theta_pull, double guard_rad) {
    check_guard(theta_pull, guard_rad);
    return -l / std::sin(theta_pull);
}

ObjectPositionEstimate estimate_object_position(double width, double theta_pull, double l_mid) {
    ObjectPositionEstimate est;
    est.l_roll = width / 2.0 * std::cos(theta_pull);
    est.l = l_mid - est.l_roll;
    return est;
}

double palm_correction(const GripperState& state, double guard_rad) {
    check_guard(state.theta_pull, guard_rad);
    const double s = std::sin(state.theta_pull);
    const double c = std::cos(state.theta_pull);
    return (state.width / 2.0 * c / s - state.l_mid / s) * state.d_theta();
}

TickResult controller_tick(const GripperState& state, const ControllerParams& params) {
    GripperState canonical = state;
    canonical.l_mid = params.l_mid;
    if (state.pull_role == Side::Left) {
        canonical.theta_pull = kPi - state.theta_pull;
        canonical.theta_push = kPi - state.theta_push;
    }
    const double dw = params.gain * palm_correction(canonical, params.angle_guard_rad);
    const double limited = std::clamp(dw, -params.rate_limit_mm, params.rate_limit_mm);
    TickResult out;
    out.width_command = std::clamp(state.width + limited, params.width_min, params.width_max);
    out.correction = out.width_command - state.width;
    out.saturated = out.width_command != state.width + limited;
    return out;
}

}  // namespace etroll
