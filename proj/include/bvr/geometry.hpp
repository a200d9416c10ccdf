#pragma once

#include <cmath>
#include <utility>

#include "bvr/errors.hpp"
#include "bvr/tolerances.hpp"

namespace bvr {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
};

inline Point2 operator*(double s, Point2 p) { return p * s; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 unit_from_heading(double th) { return {std::cos(th), std::sin(th)}; }

// Wrap into [-pi, pi).
double wrap_pi(double a);
// Wrap into (-pi, pi]. Used for lag heading errors: an exact half-turn error
// resolves to +pi, so the heading approaches its command from above
// (a clockwise turn). Keep this convention; closed-loop results depend on it.
double wrap_signed(double a);

// Rigid frame: fixed = origin + R(rotation) * relative.
struct RelativeFrame {
  Point2 origin;
  double rotation = 0.0;  // radians, [-pi, pi)

  Point2 to_relative(Point2 fixed) const;
  Point2 to_fixed(Point2 rel) const;
};

// Evader-anchored engagement frame: evader at the origin, one pursuer on the
// positive x-axis at distance x1. The inner oval branch is the locus
// |P - (x1,0)| = rho + beta*|P|, i.e. points the pursuer's engagement ring
// reaches exactly when the evader does (speed ratio beta > 1).
struct CartesianOval {
  double x1 = 0.0;    // pursuer abscissa (= distance to evader)
  double beta = 0.0;  // pursuer/evader speed ratio, > 1
  double rho = 0.0;   // pursuer engagement range
};

struct ApolloniusCircle {
  Point2 center;
  double radius = 0.0;
};

// y = m*x + n.
struct BisectorLine {
  double m = 0.0;
  double n = 0.0;
};

struct AttackFrame {
  RelativeFrame frame;  // origin B, x-axis through R1
  double x1 = 0.0;      // |R1 - B|
  Point2 r2;            // R2 in the frame
  Point2 rs;            // Rs in the frame
};

// Build the evader-anchored frame with R1 on the +x axis.
// Throws CoincidentAgents if |R1 - B| = 0.
AttackFrame attack_relative_frame(Point2 B, Point2 R1, Point2 R2, Point2 Rs);

// Map a heading measured in the relative frame back to the fixed frame.
double to_fixed_heading(double theta_rel, const RelativeFrame& frame);

// Polar radius of the inner oval branch at angle theta (from the evader,
// theta = 0 toward the pursuer). Throws OutsideOval when the discriminant of
// the branch is negative at theta.
double oval_inner_radius(const CartesianOval& oval, double theta);

// {r at theta=0, r at theta=pi}: the near and far vertices of the inner oval.
// Throws DegenerateOval if x1 <= rho.
std::pair<double, double> oval_radius_bounds(const CartesianOval& oval);

// Perpendicular bisector of segment p-q in slope form.
// Throws VerticalBisector when p and q share an ordinate (use x = (p.x+q.x)/2).
BisectorLine bisector(Point2 p, Point2 q);

// Locus |PB| = alpha*|PA| for alpha in (0,1); shrinks onto B as alpha -> 0.
// Throws InvalidSpeedRatio outside (0,1).
ApolloniusCircle apollonius(Point2 A, Point2 B, double alpha);

}  // namespace bvr
