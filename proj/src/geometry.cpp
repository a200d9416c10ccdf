#include "bvr/geometry.hpp"

#include <cmath>

namespace bvr {

double wrap_pi(double a) {
  double w = std::remainder(a, 2.0 * M_PI);  // (-pi, pi]
  if (w == M_PI) w = -M_PI;
  return w;
}

double wrap_signed(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w == -M_PI) w = M_PI;
  return w;
}

Point2 RelativeFrame::to_relative(Point2 fixed) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Point2 d = fixed - origin;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Point2 RelativeFrame::to_fixed(Point2 rel) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  return {origin.x + c * rel.x - s * rel.y, origin.y + s * rel.x + c * rel.y};
}

AttackFrame attack_relative_frame(Point2 B, Point2 R1, Point2 R2, Point2 Rs) {
  const Point2 d = R1 - B;
  const double x1 = norm(d);
  if (x1 < kTol.tiny)
    throw CoincidentAgents("attack_relative_frame: R1 coincides with B");
  AttackFrame out;
  out.frame = RelativeFrame{B, wrap_pi(std::atan2(d.y, d.x))};
  out.x1 = x1;
  out.r2 = out.frame.to_relative(R2);
  out.rs = out.frame.to_relative(Rs);
  return out;
}

double to_fixed_heading(double theta_rel, const RelativeFrame& frame) {
  return wrap_pi(theta_rel + frame.rotation);
}

double oval_inner_radius(const CartesianOval& oval, double theta) {
  const double b = 1.0 - oval.beta * oval.beta;           // negative for beta > 1
  const double eta = oval.rho * oval.rho - oval.x1 * oval.x1;
  const double s = oval.beta * oval.rho + oval.x1 * std::cos(theta);
  const double disc = s * s + b * eta;
  if (disc < 0.0)
    throw OutsideOval("oval_inner_radius: angle not covered by the inner branch");
  return (s - std::sqrt(disc)) / b;
}

std::pair<double, double> oval_radius_bounds(const CartesianOval& oval) {
  if (oval.x1 <= oval.rho)
    throw DegenerateOval("oval_radius_bounds: evader inside engagement range (x1 <= rho)");
  return {(oval.x1 - oval.rho) / (oval.beta + 1.0),
          (oval.x1 - oval.rho) / (oval.beta - 1.0)};
}

BisectorLine bisector(Point2 p, Point2 q) {
  const double dy = q.y - p.y;
  const double scale = std::max({1.0, std::abs(p.x), std::abs(q.x), std::abs(p.y), std::abs(q.y)});
  if (std::abs(dy) < kTol.tiny * scale)
    throw VerticalBisector("bisector: segment is horizontal, bisector has no slope form");
  const double dx = q.x - p.x;
  const double m = -dx / dy;
  const double n = (dot(q, q) - dot(p, p)) / (2.0 * dy);
  return {m, n};
}

ApolloniusCircle apollonius(Point2 A, Point2 B, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidSpeedRatio("apollonius: ratio must lie in (0,1)");
  const double a2 = alpha * alpha;
  const double k = 1.0 - a2;
  ApolloniusCircle c;
  c.center = {(B.x - a2 * A.x) / k, (B.y - a2 * A.y) / k};
  c.radius = alpha * dist(A, B) / k;
  return c;
}

}  // namespace bvr
