#pragma once

#include <vector>

#include "bvr/geometry.hpp"
#include "bvr/rootfind.hpp"

namespace bvr {

// Attack stage: the evader B runs for the standoff ring of the ground asset
// Rs while two faster interceptors R1, R2 try to come within engagement
// range rho of B first. Speeds are normalized: v_B = 1, v_1 = v_2 = beta.
struct AttackScenario {
  Point2 B, R1, R2, Rs;
  double beta = 0.0;   // interceptor/evader speed ratio, > 1
  double rho = 0.0;    // air-to-air engagement range
  double rho_s = 0.0;  // standoff (air-to-ground) engagement range
};

enum class AttackMode { Cooperative, Solo1, Solo2, BisectorRestricted };
enum class Winner { Blue, Red };

const char* to_string(AttackMode m);
const char* to_string(Winner w);

struct AttackSolution {
  AttackMode mode = AttackMode::Cooperative;
  Point2 aimpoint;  // fixed frame
  double value = 0.0;  // |aimpoint - Rs|
  // Fixed-frame headings; all three agents steer at the one aimpoint.
  double headingB = 0.0, heading1 = 0.0, heading2 = 0.0;
  Winner winner = Winner::Red;  // Blue iff value <= rho_s
};

// Throws ValidationError when the scenario violates its invariants
// (beta <= 1, nonpositive ranges, already-terminated starts).
void validate(const AttackScenario& sc);

// Membership in the evader's dominance region (the intersection of both
// inner-oval interiors): |P - Ri| >= rho + beta*|P - B| for both i, with
// boundary ties counting as inside (slack membership_slack_rel * max(1,x1)).
bool in_dominance_region(const AttackScenario& sc, Point2 P);

// Quartic in x whose real roots are candidate abscissae (relative frame) of
// the two inner ovals' intersection points on the bisector y = m x + n.
RealPolynomial coop_quartic(const CartesianOval& oval1, const BisectorLine& line);

// Filter quartic roots down to genuine intersection points: each candidate
// (x, mx+n) must sit on both inner ovals within oval_on_boundary_rel * x1.
// r2 is the second interceptor's position in the relative frame.
// Throws NoIntersection when nothing passes (disjoint ovals).
std::vector<Point2> coop_intersections(const RealPolynomial& q,
                                       const CartesianOval& oval1,
                                       const CartesianOval& oval2, Point2 r2,
                                       const BisectorLine& line);

// Both interceptors relevant: aim at the oval-intersection point nearest Rs.
// Propagates NoIntersection when the ovals are disjoint.
AttackSolution solve_cooperative(const AttackScenario& sc);

// Sextic in the polar radius r whose roots are stationary points of the
// distance from Rs' (at distance ds, azimuth phi in the oval frame) to the
// inner oval.
RealPolynomial solo_sextic(const CartesianOval& oval, double ds, double phi);

// One-interceptor game against interceptor 1 or 2, ignoring the other:
// best point of that interceptor's inner oval. Sextic roots are filtered by
// the un-squared stationarity relation; if none survive, the oval vertices
// decide (the optimum always competes against both vertices).
AttackSolution solve_solo(const AttackScenario& sc, int interceptor);

// Full three-case strategy selection:
//   both solo aimpoints outside the dominance region -> cooperative;
//   exactly one inside -> that solo solution;
//   both inside -> bisector-restricted projection of the cheaper solo;
//   disjoint ovals -> better solo.
AttackSolution select_strategy(const AttackScenario& sc);

}  // namespace bvr
