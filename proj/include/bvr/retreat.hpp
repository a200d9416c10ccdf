#pragma once

#include <optional>

#include "bvr/geometry.hpp"
#include "bvr/rootfind.hpp"

namespace bvr {

// One attacker missile A hunting the evader B, opposed by one defender
// missile D protecting B. A and D fly at equal speed; alpha = v_B / v_A.
struct MissilePair {
  Point2 A;
  Point2 D;
  double alpha = 0.0;
};

// Unwrapped angular interval, lo <= hi (may extend beyond [-pi, pi)).
struct AngularInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct RetreatScenario {
  Point2 B;
  MissilePair pair1;
  std::optional<MissilePair> pair2;  // absent: single-pair degenerate game
  double w = 0.5;                    // composite weight on pair1
  std::optional<AngularInterval> headingConstraint;
};

// Headings the evader may fly so the defender can still cut the attacker
// off on the pair's orthogonal bisector. theta_l points at the upper chord
// intersection, and the band sweeps ccw from there around the far side of
// the evader's Apollonius circle down to the lower intersection.
struct FeasibleBand {
  double theta_l = 0.0;  // fixed-frame radians, canonicalized into [-pi, pi)
  double theta_u = 0.0;  // theta_l <= theta_u <= theta_l + 2*pi
  double y_lo = 0.0;     // lower chord ordinate on x = x_m (pair frame)
  double y_hi = 0.0;     // upper chord ordinate
};

struct PairSolution {
  double yStar = 0.0;      // interception ordinate on x = x_m (pair frame)
  Point2 interceptPoint;   // fixed frame
  double chiStar = 0.0;    // attacker heading (fixed frame)
  double psiStar = 0.0;    // defender heading (fixed frame)
  double value = 0.0;      // terminal |A_f - B_f| of this pair's own game
};

// Relative geometry of a pair: defender at the origin, attacker on the +x
// axis at distance xA; the interception line is x = x_m = xA/2.
struct PairFrame {
  double xA = 0.0;
  double lamA = 0.0;  // fixed-frame bearing of A from D
  double xB = 0.0, yB = 0.0;
  double xm = 0.0;
};

PairFrame pair_frame(const MissilePair& pair, Point2 B);

// Quartic in the interception ordinate y; phi is the evader heading measured
// from the bisector direction (phi = theta_B - pi/2 - lamA). alpha is passed
// explicitly so the alpha -> 0 closed form can be exercised directly.
RealPolynomial pair_quartic(const PairFrame& fr, double alpha, double phi);

// Squared terminal separation |A_f - B_f|^2 if interception happens at
// ordinate y on x = x_m.
double pair_cost(const PairFrame& fr, double alpha, double phi, double y);

// Normalized residual of the un-squared stationarity relation dJ/dy = 0;
// accepted roots must stay below stationarity_rel.
double pair_stationarity(const PairFrame& fr, double alpha, double phi, double y);

// Throws NoFeasibleHeading when the evader's Apollonius circle misses the
// bisector (the defender cannot protect on any heading).
FeasibleBand feasible_band(const MissilePair& pair, Point2 B);

// Full pair game for an in-band heading: quartic roots filtered by the
// un-squared stationarity relation compete with the chord endpoints; the
// cost minimizer wins. Throws PathParallelToBisector when sin(phi) = 0 and
// InfeasibleHeading when theta_B lies outside the band.
PairSolution pair_game_solve(const MissilePair& pair, Point2 B, double thetaB);

// Closed-loop variant used mid-flight by the simulator: no band logic (the
// chord may have collapsed while missiles converge), stationary roots only,
// dense-grid fallback for degenerate geometry.
PairSolution pair_feedback_aim(const MissilePair& pair, Point2 B, double thetaB);

// Weighted separation at stage end: both pair games are solved, the earlier
// interception point is frozen, the evader keeps flying until the later one,
// and both distances are measured there. Single-pair scenarios return that
// pair's value (w ignored).
double composite_cost(const RetreatScenario& sc, double thetaB);

// Intersection of the pair bands and the heading constraint, unwrapped onto
// a common branch. Throws EmptyFeasibleSet when empty.
AngularInterval admissible_interval(const RetreatScenario& sc);

struct HeadingOpt {
  double thetaStar = 0.0;
  double value = 0.0;
  bool boundary = false;         // maximizer sits on the admissible interval edge
  bool constraintActive = false; // ... and that edge came from headingConstraint
};

// Maximize composite_cost over the admissible interval: 721-point grid seed,
// golden-section refinement to golden_tol, exact snap onto an active edge.
HeadingOpt optimize_heading(const RetreatScenario& sc);

// Optional re-pairing mode: swap which attacker each defender hunts when the
// swap strictly widens the band overlap. Ties and single-pair scenarios keep
// the declared pairing.
RetreatScenario best_pairing(const RetreatScenario& sc);

void validate(const RetreatScenario& sc);

}  // namespace bvr
