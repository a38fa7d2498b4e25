#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "util.hpp"

namespace etroll {

// Errors raised by the contact solver.
struct GraspLost : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoContact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Side { Left, Right };
inline Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
inline const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

// 2D cross-section of a rollable prism: a circle or a regular polygon.
// Regular polygons are specified by inscribed-circle radius, matching how the
// object set is machined (common inner diameter across shapes).
class ConvexProfile {
public:
    enum class Kind { Circle, RegularPolygon };

    static ConvexProfile circle(double radius);
    static ConvexProfile regular_polygon(int sides, double inradius);

    Kind kind() const { return kind_; }
    int side_count() const { return sides_; }
    double circumradius() const { return circumradius_; }
    double inradius() const { return inradius_; }
    double perimeter() const;
    double side_length() const;

    // Vertex k in body frame; k counts counterclockwise. At orientation zero
    // the polygon rests with one face flat toward -y.
    Vec2 vertex(int k) const;
    // Boundary point at arc-length parameter t in [0, perimeter), counterclockwise
    // from vertex 0 (polygon) or from the -y point (circle).
    Vec2 boundary_point(double t) const;
    double vertex_param(int k) const;

private:
    Kind kind_ = Kind::Circle;
    int sides_ = 0;
    double circumradius_ = 0.0;
    double inradius_ = 0.0;
};

struct Pose {
    Vec2 position;       // object centroid in palm frame (mm)
    double orientation = 0.0;  // rad
};

struct FingerLine {
    Vec2 base;           // joint position in palm frame
    double angle = 0.0;  // rad from palm baseline (+x)
    double length = 132.0;
};

enum class ContactType { Vertex, Face, Arc };

struct Contact {
    ContactType type = ContactType::Arc;
    int vertex = -1;       // polygon pivot vertex index
    double s = 0.0;        // contact position along finger from the joint (mm)
    double s_far = 0.0;    // face contact: far end of the segment (== s otherwise)
    double boundary = 0.0;     // arc-length parameter on the object boundary
    double boundary_far = 0.0; // face contact: far end of the boundary span
};

// Solver tolerances and mechanism constants. contact_offset is the distance
// from each finger's joint axis to its contact face; indentation is the
// compliance depth a smooth contact sinks into the face, which shrinks the
// circle's effective rolling radius.
struct GeometryParams {
    double finger_length = 132.0;
    double contact_offset = 19.25;
    double indentation = 0.5;
    double solve_tol_mm = 1e-9;
    double orientation_tol_rad = 1e-10;
    double step_cap_rad = 0.01;
    double degenerate_perturb_mm = 1e-7;
};

// Full kinematic configuration of the grasp at one instant.
struct GraspState {
    Pose pose;
    double theta_left = 0.0;
    double theta_right = 0.0;
    double width = 0.0;
    Side pull = Side::Right;
    Contact contact_left;
    Contact contact_right;

    double& theta(Side s) { return s == Side::Left ? theta_left : theta_right; }
    double theta(Side s) const { return s == Side::Left ? theta_left : theta_right; }
    Contact& contact(Side s) { return s == Side::Left ? contact_left : contact_right; }
    const Contact& contact(Side s) const { return s == Side::Left ? contact_left : contact_right; }
    double theta_pull() const { return theta(pull); }
    double theta_push() const { return theta(other(pull)); }
};

// Per-step accounting produced by roll_step.
struct StepEvents {
    double arc_left = 0.0;     // rolled arc on the effective contact surface
    double arc_right = 0.0;
    double travel_left = 0.0;  // contact-point travel along the finger
    double travel_right = 0.0;
    // boundary intervals (arc-length params) that touched each finger this step
    std::vector<std::pair<double, double>> touched_left;
    std::vector<std::pair<double, double>> touched_right;
};

Vec2 finger_dir(double theta);
Vec2 inward_normal(double theta, Side side);
Vec2 finger_base(Side side, double width);

// Support query: boundary point(s) of the posed profile extremal toward the
// line, approached from the side of the line the object centroid lies on.
Contact support_contact(const ConvexProfile& profile, const Pose& pose, const FingerLine& line,
                        double tolerance_mm = 1e-9);

// Signed clearance of the posed profile against the contact surface of a
// finger at `theta` on `side` (negative = penetration).
double min_clearance(const ConvexProfile& profile, const Pose& pose, Side side, double theta,
                     double width, const GeometryParams& params);

// Closes the fingers on the object at orientation phi0 with both fingers
// perpendicular; the contact on `sensing` lands at s_init mm from the joint.
GraspState initial_grasp(const ConvexProfile& profile, double phi0, double s_init, Side sensing,
                         Side pull, const GeometryParams& params);

// Quasi-static advance: the pulling finger rotates by dtheta_pull and the palm
// width moves to new_width, rolling without slip on both contacts. Polygon
// vertex contacts pivot in place; face-flush transitions are split exactly.
StepEvents roll_step(const ConvexProfile& profile, GraspState& state, double dtheta_pull,
                     double new_width, const GeometryParams& params);

// Length of the boundary that touched the sensing finger, from per-step touched
// intervals (union, re-touches not double counted). For the circle the touched
// intervals are recorded on the true boundary even though rolling happens on
// the indented effective radius.
double contact_arc_length(const std::vector<std::pair<double, double>>& touched,
                          const ConvexProfile& profile);

}  // namespace etroll
