#include "geometry.hpp"

#include <algorithm>
#include <cmath>

namespace etroll {

namespace {
constexpr double kPi = 3.14159265358979323846;

double side_sign(Side s) { return s == Side::Left ? 1.0 : -1.0; }
}  // namespace

// ---------------------------------------------------------------------------
// ConvexProfile

ConvexProfile ConvexProfile::circle(double radius) {
    if (radius <= 0.0) throw std::invalid_argument("circle radius must be positive");
    ConvexProfile p;
    p.kind_ = Kind::Circle;
    p.circumradius_ = radius;
    p.inradius_ = radius;
    return p;
}

ConvexProfile ConvexProfile::regular_polygon(int sides, double inradius) {
    if (sides < 3) throw std::invalid_argument("polygon needs at least 3 sides");
    if (inradius <= 0.0) throw std::invalid_argument("polygon inradius must be positive");
    ConvexProfile p;
    p.kind_ = Kind::RegularPolygon;
    p.sides_ = sides;
    p.inradius_ = inradius;
    p.circumradius_ = inradius / std::cos(kPi / sides);
    return p;
}

double ConvexProfile::perimeter() const {
    if (kind_ == Kind::Circle) return 2.0 * kPi * circumradius_;
    return sides_ * side_length();
}

double ConvexProfile::side_length() const {
    if (kind_ == Kind::Circle) return 0.0;
    return 2.0 * inradius_ * std::tan(kPi / sides_);
}

Vec2 ConvexProfile::vertex(int k) const {
    const int n = sides_;
    const double a = -kPi / 2.0 + (2.0 * ((k % n + n) % n) + 1.0) * kPi / n;
    return {circumradius_ * std::cos(a), circumradius_ * std::sin(a)};
}

Vec2 ConvexProfile::boundary_point(double t) const {
    t = wrap_positive(t, perimeter());
    if (kind_ == Kind::Circle) {
        const double a = -kPi / 2.0 + t / circumradius_;
        return {circumradius_ * std::cos(a), circumradius_ * std::sin(a)};
    }
    const double L = side_length();
    const int k = std::min(static_cast<int>(t / L), sides_ - 1);
    const double f = (t - k * L) / L;
    const Vec2 a = vertex(k), b = vertex(k + 1);
    return a + f * (b - a);
}

double ConvexProfile::vertex_param(int k) const {
    const int n = sides_;
    return (((k % n) + n) % n) * side_length();
}

// ---------------------------------------------------------------------------
// Frames and support queries

Vec2 finger_dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

Vec2 inward_normal(double theta, Side side) {
    if (side == Side::Left) return {std::sin(theta), -std::cos(theta)};
    return {-std::sin(theta), std::cos(theta)};
}

Vec2 finger_base(Side side, double width) {
    return {side == Side::Left ? -width / 2.0 : width / 2.0, 0.0};
}

Contact support_contact(const ConvexProfile& profile, const Pose& pose, const FingerLine& line,
                        double tolerance_mm) {
    const Vec2 u = finger_dir(line.angle);
    Vec2 n = perp(u);
    if (dot(pose.position - line.base, n) < 0.0) n = -1.0 * n;

    Contact c;
    if (profile.kind() == ConvexProfile::Kind::Circle) {
        const double r = profile.circumradius();
        const double h = dot(pose.position - line.base, n) - r;
        if (h > tolerance_mm) throw NoContact("object does not touch the line");
        const Vec2 p = pose.position - r * n;
        c.type = ContactType::Arc;
        c.s = c.s_far = dot(p - line.base, u);
        const Vec2 body = rotated(p - pose.position, -pose.orientation);
        const double a = std::atan2(body.y, body.x);
        c.boundary = c.boundary_far = wrap_positive((a + kPi / 2.0) * r, profile.perimeter());
        return c;
    }

    double best = 1e300, second = 1e300;
    int besti = -1, secondi = -1;
    for (int i = 0; i < profile.side_count(); ++i) {
        const Vec2 v = pose.position + rotated(profile.vertex(i), pose.orientation);
        const double h = dot(v - line.base, n);
        if (h < best) {
            second = best;
            secondi = besti;
            best = h;
            besti = i;
        } else if (h < second) {
            second = h;
            secondi = i;
        }
    }
    if (best > tolerance_mm) throw NoContact("object does not touch the line");
    const Vec2 vb = pose.position + rotated(profile.vertex(besti), pose.orientation);
    if (second - best <= tolerance_mm && secondi >= 0) {
        // face flush on the line
        const Vec2 vs = pose.position + rotated(profile.vertex(secondi), pose.orientation);
        c.type = ContactType::Face;
        c.s = dot(vb - line.base, u);
        c.s_far = dot(vs - line.base, u);
        c.boundary = profile.vertex_param(besti);
        c.boundary_far = profile.vertex_param(secondi);
        return c;
    }
    c.type = ContactType::Vertex;
    c.vertex = besti;
    c.s = c.s_far = dot(vb - line.base, u);
    c.boundary = c.boundary_far = profile.vertex_param(besti);
    return c;
}

// ---------------------------------------------------------------------------
// Contact solver internals

namespace {

// Distance from joint axis to the line the object actually rolls on.
double line_offset(const ConvexProfile& p, const GeometryParams& g) {
    if (p.kind() == ConvexProfile::Kind::Circle) return g.contact_offset + g.indentation;
    return g.contact_offset;
}

double roll_radius(const ConvexProfile& p, const GeometryParams& g) {
    return p.circumradius() - g.indentation;
}

Vec2 vertex_world(const ConvexProfile& p, const Pose& pose, int k) {
    return pose.position + rotated(p.vertex(k), pose.orientation);
}

// Boundary arc parameter of the circle's contact point against a finger.
double circle_contact_param(const ConvexProfile& p, double theta, double phi, Side side) {
    const double r = p.circumradius();
    const double raw = (side == Side::Left) ? r * (theta - phi + kPi) : r * (theta - phi);
    return wrap_positive(raw, p.perimeter());
}

struct Tangency {
    double theta = 0.0;
    int vertex = -1;
};

// Finger angle from its base that rests the contact surface on the posed
// object. Left fingers touch from below-left (max over candidates), right
// fingers from below-right (min).
Tangency tangency_angle(const ConvexProfile& p, const Pose& pose, Side side, double width,
                        const GeometryParams& g) {
    const Vec2 B = finger_base(side, width);
    Tangency out;
    auto candidate = [&](Vec2 target, double reach) -> double {
        const Vec2 d = target - B;
        const double R = norm(d);
        if (R <= reach) throw GraspLost("object collapsed into finger base");
        const double beta = std::atan2(d.y, d.x);
        return side == Side::Left ? beta + std::asin(reach / R) : beta - std::asin(reach / R);
    };
    if (p.kind() == ConvexProfile::Kind::Circle) {
        out.theta = candidate(pose.position, line_offset(p, g) + roll_radius(p, g));
        return out;
    }
    bool first = true;
    for (int i = 0; i < p.side_count(); ++i) {
        const double th = candidate(vertex_world(p, pose, i), line_offset(p, g));
        const bool better = first || (side == Side::Left ? th > out.theta : th < out.theta);
        if (better) {
            out.theta = th;
            out.vertex = i;
            first = false;
        }
    }
    return out;
}

struct SubSolution {
    Pose pose;
    double theta_push = 0.0;
    double s_pull = 0.0;
    double s_push = 0.0;
    double residual = 0.0;
};

struct SubProblem {
    const ConvexProfile& profile;
    const GraspState& state;
    const GeometryParams& params;
    double dtheta_pull = 0.0;
    double new_width = 0.0;

    SubSolution eval(double dphi) const {
        const Side pull = state.pull, push = other(pull);
        const double thp1 = state.theta(pull) + dtheta_pull;
        const Vec2 Bp = finger_base(pull, new_width);
        const Vec2 u = finger_dir(thp1);
        const Vec2 n = inward_normal(thp1, pull);
        SubSolution sol;
        sol.pose.orientation = state.pose.orientation + dphi;
        const double off = line_offset(profile, params);
        if (profile.kind() == ConvexProfile::Kind::Circle) {
            const double rr = roll_radius(profile, params);
            sol.s_pull = state.contact(pull).s + side_sign(pull) * rr * (dphi - dtheta_pull);
            sol.pose.position = Bp + sol.s_pull * u + (off + rr) * n;
            const Tangency tq = tangency_angle(profile, sol.pose, push, new_width, params);
            sol.theta_push = tq.theta;
            const Vec2 Bq = finger_base(push, new_width);
            sol.s_push = dot(sol.pose.position - Bq, finger_dir(tq.theta));
            const double dth_push = tq.theta - state.theta(push);
            sol.residual = (sol.s_push - state.contact(push).s) -
                           side_sign(push) * rr * (dphi - dth_push);
        } else {
            sol.s_pull = state.contact(pull).s;  // pivot: no travel along the finger
            const Vec2 pin = Bp + off * n + sol.s_pull * u;
            sol.pose.position =
                pin - rotated(profile.vertex(state.contact(pull).vertex), sol.pose.orientation);
            const int vq = state.contact(push).vertex;
            const Vec2 Bq = finger_base(push, new_width);
            const Vec2 d = vertex_world(profile, sol.pose, vq) - Bq;
            const double R = norm(d);
            if (R <= off) throw GraspLost("push contact collapsed into finger base");
            const double beta = std::atan2(d.y, d.x);
            sol.theta_push = push == Side::Left ? beta + std::asin(off / R)
                                                : beta - std::asin(off / R);
            sol.s_push = dot(d, finger_dir(sol.theta_push));
            sol.residual = sol.s_push - state.contact(push).s;
        }
        return sol;
    }
};

// Root of the push-side no-slip residual over the object rotation increment.
SubSolution solve_substep(const SubProblem& prob) {
    const GeometryParams& g = prob.params;
    auto residual_at = [&](double d) -> std::optional<double> {
        try {
            return prob.eval(d).residual;
        } catch (const GraspLost&) {
            return std::nullopt;
        }
    };

    double half = std::max(0.02 + 4.0 * std::abs(prob.dtheta_pull) +
                               0.2 * std::abs(prob.new_width - prob.state.width),
                           1e-6);
    double lo = -half, hi = half;
    std::optional<double> flo = residual_at(lo), fhi = residual_at(hi);
    for (int i = 0; i < 60 && !flo; ++i) {
        lo *= 0.5;
        flo = residual_at(lo);
    }
    for (int i = 0; i < 60 && !fhi; ++i) {
        hi *= 0.5;
        fhi = residual_at(hi);
    }
    if (!flo || !fhi) throw StepTooLarge("no valid configuration around the current state");
    for (int i = 0; i < 24 && *flo * *fhi > 0.0; ++i) {
        lo *= 1.6;
        hi *= 1.6;
        if (std::abs(hi) > 0.6) throw StepTooLarge("no-slip solve failed to bracket");
        auto nlo = residual_at(lo), nhi = residual_at(hi);
        if (nlo) flo = nlo; else lo /= 1.6;
        if (nhi) fhi = nhi; else hi /= 1.6;
    }
    if (*flo * *fhi > 0.0) throw StepTooLarge("no-slip solve failed to bracket");
    for (int i = 0; i < 200 && hi - lo > g.orientation_tol_rad; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto fm = residual_at(mid);
        if (!fm) throw StepTooLarge("solver entered an invalid configuration");
        if (*flo * *fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return prob.eval(0.5 * (lo + hi));
}

std::vector<double> all_clearances(const ConvexProfile& p, const Pose& pose, Side side,
                                   double theta, double width, const GeometryParams& g) {
    const Vec2 B = finger_base(side, width);
    const Vec2 n = inward_normal(theta, side);
    std::vector<double> out;
    if (p.kind() == ConvexProfile::Kind::Circle) {
        out.push_back(dot(pose.position - B, n) - (line_offset(p, g) + roll_radius(p, g)));
        return out;
    }
    out.reserve(p.side_count());
    for (int i = 0; i < p.side_count(); ++i)
        out.push_back(dot(vertex_world(p, pose, i) - B, n) - line_offset(p, g));
    return out;
}

struct Violation {
    Side side = Side::Left;
    int vertex = -1;
    double clearance = 0.0;
};

// Deepest penetration among non-contact vertices on either finger.
std::optional<Violation> find_violation(const ConvexProfile& p, const GraspState& st,
                                        const Pose& pose, double theta_pull_new,
                                        double theta_push_new, double width,
                                        const GeometryParams& g, double tol) {
    if (p.kind() == ConvexProfile::Kind::Circle) return std::nullopt;
    std::optional<Violation> worst;
    for (Side side : {Side::Left, Side::Right}) {
        const double th = side == st.pull ? theta_pull_new : theta_push_new;
        const auto cl = all_clearances(p, pose, side, th, width, g);
        for (int i = 0; i < static_cast<int>(cl.size()); ++i) {
            if (i == st.contact(side).vertex) continue;
            if (cl[i] < -tol && (!worst || cl[i] < worst->clearance))
                worst = Violation{side, i, cl[i]};
        }
    }
    return worst;
}

}  // namespace

double min_clearance(const ConvexProfile& profile, const Pose& pose, Side side, double theta,
                     double width, const GeometryParams& params) {
    const auto cl = all_clearances(profile, pose, side, theta, width, params);
    return *std::min_element(cl.begin(), cl.end());
}

// ---------------------------------------------------------------------------
// Grasp construction

GraspState initial_grasp(const ConvexProfile& profile, double phi0, double s_init, Side sensing,
                         Side pull, const GeometryParams& params) {
    GraspState st;
    st.theta_left = st.theta_right = kPi / 2.0;
    st.pull = pull;
    const double off = line_offset(profile, params);

    if (profile.kind() == ConvexProfile::Kind::Circle) {
        const double rr = roll_radius(profile, params);
        st.width = 2.0 * (rr + off);
        st.pose.orientation = phi0;
        st.pose.position = {0.0, s_init};
        for (Side side : {Side::Left, Side::Right}) {
            Contact& c = st.contact(side);
            c.type = ContactType::Arc;
            c.s = c.s_far = s_init;
            c.boundary = c.boundary_far =
                circle_contact_param(profile, kPi / 2.0, phi0, side);
        }
        return st;
    }

    // Break exact face-flush ties so a pivot vertex is well defined.
    auto supports = [&](double phi) {
        double xmin = 1e300, xmax = -1e300;
        int imin = -1, imax = -1;
        bool tie = false;
        for (int i = 0; i < profile.side_count(); ++i) {
            const Vec2 v = rotated(profile.vertex(i), phi);
            if (std::abs(v.x - xmin) <= 1e-9 || std::abs(v.x - xmax) <= 1e-9) tie = true;
            if (v.x < xmin) { xmin = v.x; imin = i; }
            if (v.x > xmax) { xmax = v.x; imax = i; }
        }
        return std::tuple{xmin, xmax, imin, imax, tie};
    };
    auto [xmin, xmax, imin, imax, tie] = supports(phi0);
    if (tie) {
        phi0 += params.degenerate_perturb_mm / profile.circumradius();
        std::tie(xmin, xmax, imin, imax, tie) = supports(phi0);
    }
    st.pose.orientation = phi0;
    st.width = (xmax - xmin) + 2.0 * off;
    const double px = -(st.width / 2.0) + off - xmin;
    const double sensing_y = rotated(profile.vertex(sensing == Side::Left ? imin : imax), phi0).y;
    st.pose.position = {px, s_init - sensing_y};
    for (Side side : {Side::Left, Side::Right}) {
        const int vi = side == Side::Left ? imin : imax;
        Contact& c = st.contact(side);
        c.type = ContactType::Vertex;
        c.vertex = vi;
        const Vec2 vw = vertex_world(profile, st.pose, vi);
        c.s = c.s_far = vw.y;  // fingers vertical: s equals height
        c.boundary = c.boundary_far = profile.vertex_param(vi);
        if (c.s < 0.0 || c.s > params.finger_length)
            throw GraspLost("initial contact off the finger");
    }
    return st;
}

// ---------------------------------------------------------------------------
// roll_step

namespace {

void record_touch(StepEvents& ev, Side side, double lo, double hi) {
    auto& v = side == Side::Left ? ev.touched_left : ev.touched_right;
    v.emplace_back(lo, hi);
}

void apply_handover(const ConvexProfile& profile, GraspState& st, Side side, int new_vertex,
                    const GeometryParams& params, StepEvents& ev) {
    Contact& c = st.contact(side);
    const int n = profile.side_count();
    const int old = c.vertex;
    if (new_vertex != (old + 1) % n && new_vertex != (old + n - 1) % n)
        throw StepTooLarge("contact jumped across a non-adjacent vertex");
    const double L = profile.side_length();
    const int face = (new_vertex == (old + 1) % n) ? old : new_vertex;
    const double p0 = profile.vertex_param(face);
    record_touch(ev, side, p0, p0 + L);
    double& arc = side == Side::Left ? ev.arc_left : ev.arc_right;
    double& travel = side == Side::Left ? ev.travel_left : ev.travel_right;
    arc += L;
    travel += L;
    c.vertex = new_vertex;
    const Vec2 B = finger_base(side, st.width);
    const Vec2 vw = vertex_world(profile, st.pose, new_vertex);
    c.s = c.s_far = dot(vw - B, finger_dir(st.theta(side)));
    c.boundary = c.boundary_far = profile.vertex_param(new_vertex);
}

void commit(const ConvexProfile& profile, GraspState& st, const SubSolution& sol,
            double dtheta_pull, double new_width, const GeometryParams& params, StepEvents& ev) {
    const Side pull = st.pull, push = other(pull);
    const double rr = roll_radius(profile, params);
    const double dphi = sol.pose.orientation - st.pose.orientation;

    if (profile.kind() == ConvexProfile::Kind::Circle) {
        const double r = profile.circumradius();
        for (Side side : {Side::Left, Side::Right}) {
            const bool is_pull = side == pull;
            const double th0 = st.theta(side);
            const double th1 = is_pull ? th0 + dtheta_pull : sol.theta_push;
            const double arc_inc = std::abs(rr * (dphi - (th1 - th0)));
            const double t0 = circle_contact_param(profile, th0, st.pose.orientation, side);
            const double dt = r * ((th1 - th0) - dphi);
            record_touch(ev, side, t0, t0 + dt);
            double& arc = side == Side::Left ? ev.arc_left : ev.arc_right;
            arc += arc_inc;
        }
        ev.travel_left += std::abs((pull == Side::Left ? sol.s_pull : sol.s_push) -
                                   st.contact(Side::Left).s);
        ev.travel_right += std::abs((pull == Side::Right ? sol.s_pull : sol.s_push) -
                                    st.contact(Side::Right).s);
    } else {
        ev.travel_left += std::abs((pull == Side::Left ? sol.s_pull : sol.s_push) -
                                   st.contact(Side::Left).s);
        ev.travel_right += std::abs((pull == Side::Right ? sol.s_pull : sol.s_push) -
                                    st.contact(Side::Right).s);
    }

    st.pose = sol.pose;
    st.theta(pull) += dtheta_pull;
    st.theta(push) = sol.theta_push;
    st.width = new_width;
    st.contact(pull).s = st.contact(pull).s_far = sol.s_pull;
    st.contact(push).s = st.contact(push).s_far = sol.s_push;
    if (profile.kind() == ConvexProfile::Kind::Circle) {
        for (Side side : {Side::Left, Side::Right}) {
            Contact& c = st.contact(side);
            c.boundary = c.boundary_far =
                circle_contact_param(profile, st.theta(side), st.pose.orientation, side);
        }
    } else {
        for (Side side : {Side::Left, Side::Right}) {
            Contact& c = st.contact(side);
            c.boundary = c.boundary_far = profile.vertex_param(c.vertex);
        }
    }
    for (Side side : {Side::Left, Side::Right}) {
        const Contact& c = st.contact(side);
        if (c.s < -params.solve_tol_mm || c.s > params.finger_length + params.solve_tol_mm)
            throw GraspLost(std::string("contact ran off the ") + side_name(side) + " finger");
    }
}

}  // namespace

StepEvents roll_step(const ConvexProfile& profile, GraspState& state, double dtheta_pull,
                     double new_width, const GeometryParams& params) {
    if (std::abs(dtheta_pull) > params.step_cap_rad + 1e-12)
        throw StepTooLarge("pull rotation exceeds the per-step cap");

    StepEvents ev;
    const double w0 = state.width;
    double done = 0.0;
    int flips = 0;
    for (int guard = 0; done < 1.0 - 1e-12; ++guard) {
        if (guard > 200) throw StepTooLarge("contact transitions did not converge");
        double frac = 1.0 - done;
        SubProblem prob{profile, state, params, dtheta_pull * frac,
                        w0 + (new_width - w0) * (done + frac)};
        SubSolution sol = solve_substep(prob);
        auto viol = find_violation(profile, state, sol.pose, state.theta(state.pull) + prob.dtheta_pull,
                                   sol.theta_push, prob.new_width, params, params.solve_tol_mm);
        if (!viol) {
            commit(profile, state, sol, prob.dtheta_pull, prob.new_width, params, ev);
            done += frac;
            continue;
        }
        // Bisect the fraction down to the flush configuration.
        double lo = 0.0, hi = frac;
        for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
            const double mid = 0.5 * (lo + hi);
            SubProblem pm{profile, state, params, dtheta_pull * mid,
                          w0 + (new_width - w0) * (done + mid)};
            SubSolution sm = solve_substep(pm);
            auto vm = find_violation(profile, state, sm.pose,
                                     state.theta(state.pull) + pm.dtheta_pull, sm.theta_push,
                                     pm.new_width, params, params.solve_tol_mm / 2.0);
            if (vm) hi = mid; else lo = mid;
        }
        if (lo > 1e-11) {
            SubProblem pf{profile, state, params, dtheta_pull * lo,
                          w0 + (new_width - w0) * (done + lo)};
            commit(profile, state, solve_substep(pf), pf.dtheta_pull, pf.new_width, params, ev);
            done += lo;
        } else {
            // Flush at the current configuration: the offending vertex takes over.
            if (++flips > 8) throw StepTooLarge("contact vertex oscillation at flush");
            apply_handover(profile, state, viol->side, viol->vertex, params, ev);
        }
    }
    return ev;
}

double contact_arc_length(const std::vector<std::pair<double, double>>& touched,
                          const ConvexProfile& profile) {
    CircularIntervalSet set(profile.perimeter());
    for (const auto& [lo, hi] : touched) set.add(lo, hi);
    return set.total_length();
}

}  // namespace etroll
