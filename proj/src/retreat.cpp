#include "bvr/retreat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bvr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_pair(const MissilePair& p) {
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    throw InvalidSpeedRatio("missile pair: alpha must lie in (0,1)");
  if (dist(p.A, p.D) < kTol.tiny)
    throw CoincidentAgents("missile pair: attacker and defender coincide");
}

// theta measured into the band's branch; true if within [lo, hi] + slack.
bool in_band(const FeasibleBand& b, double theta, double slack) {
  const double width = b.theta_u - b.theta_l;
  double u = std::fmod(theta - b.theta_l, 2.0 * M_PI);
  if (u < 0.0) u += 2.0 * M_PI;
  return u <= width + slack || u >= 2.0 * M_PI - slack;
}

// Shift interval b onto the branch closest to reference angle ref.
AngularInterval unwrap_near(AngularInterval b, double ref) {
  double mid = 0.5 * (b.lo + b.hi);
  while (mid < ref - M_PI) { b.lo += 2.0 * M_PI; b.hi += 2.0 * M_PI; mid += 2.0 * M_PI; }
  while (mid > ref + M_PI) { b.lo -= 2.0 * M_PI; b.hi -= 2.0 * M_PI; mid -= 2.0 * M_PI; }
  return b;
}

struct AdmissibleDetail {
  AngularInterval iv;
  bool lo_from_constraint = false;
  bool hi_from_constraint = false;
};

AdmissibleDetail admissible_detail(const RetreatScenario& sc) {
  const FeasibleBand b1 = feasible_band(sc.pair1, sc.B);
  AngularInterval iv{b1.theta_l, b1.theta_u};
  if (sc.pair2) {
    const FeasibleBand b2 = feasible_band(*sc.pair2, sc.B);
    const AngularInterval u2 =
        unwrap_near({b2.theta_l, b2.theta_u}, 0.5 * (iv.lo + iv.hi));
    iv.lo = std::max(iv.lo, u2.lo);
    iv.hi = std::min(iv.hi, u2.hi);
    if (iv.hi < iv.lo)
      throw EmptyFeasibleSet("admissible_interval: pair bands do not overlap");
  }
  AdmissibleDetail out{iv, false, false};
  if (sc.headingConstraint) {
    const AngularInterval c = unwrap_near(*sc.headingConstraint, 0.5 * (iv.lo + iv.hi));
    if (c.lo > iv.lo) { iv.lo = c.lo; out.lo_from_constraint = true; }
    if (c.hi < iv.hi) { iv.hi = c.hi; out.hi_from_constraint = true; }
    if (iv.hi < iv.lo)
      throw EmptyFeasibleSet("admissible_interval: heading constraint excludes the band overlap");
  }
  out.iv = iv;
  return out;
}

}  // namespace

void validate(const RetreatScenario& sc) {
  validate_pair(sc.pair1);
  if (sc.pair2) {
    validate_pair(*sc.pair2);
    if (std::abs(sc.pair2->alpha - sc.pair1.alpha) > kTol.tiny)
      throw ValidationError("retreat scenario: both pairs must share one speed ratio");
  }
  if (!(sc.w >= 0.0 && sc.w <= 1.0))
    throw ValidationError("retreat scenario: weight w must lie in [0,1]");
  for (const MissilePair* p : {&sc.pair1, sc.pair2 ? &*sc.pair2 : nullptr}) {
    if (!p) continue;
    if (dist(sc.B, p->A) < kTol.tiny)
      throw ValidationError("retreat scenario: attacker already on top of the evader");
  }
  if (sc.headingConstraint && !(sc.headingConstraint->hi >= sc.headingConstraint->lo))
    throw ValidationError("retreat scenario: heading constraint interval is reversed");
}

PairFrame pair_frame(const MissilePair& pair, Point2 B) {
  const Point2 d = pair.A - pair.D;
  PairFrame fr;
  fr.xA = norm(d);
  fr.lamA = std::atan2(d.y, d.x);
  const RelativeFrame rel{pair.D, fr.lamA};
  const Point2 Bp = rel.to_relative(B);
  fr.xB = Bp.x;
  fr.yB = Bp.y;
  fr.xm = 0.5 * fr.xA;
  return fr;
}

RealPolynomial pair_quartic(const PairFrame& fr, double alpha, double phi) {
  const double a2 = alpha * alpha;
  const double sv = std::sin(phi), cv = std::cos(phi);
  const double dm = (fr.xm - fr.xB) / sv;
  const double ym = fr.yB - dm * cv;
  const double c4 = (2.0 * alpha * cv) * (2.0 * alpha * cv) - (1.0 + a2) * (1.0 + a2);
  const double c3 = fr.yB + a2 * ((1.0 - 2.0 * cv * cv) * ym - dm * cv);
  const double c2 = a2 * ((dm + ym * cv) * (dm + ym * cv) + (2.0 * fr.xm * cv) * (2.0 * fr.xm * cv)) -
                    fr.yB * fr.yB - fr.xm * fr.xm * (1.0 + a2) * (1.0 + a2);
  const double c1 = fr.yB * fr.xm * fr.xm + a2 * fr.xm * fr.xm * ym * sv * sv;
  const double c0 = (alpha * fr.xm * fr.xm * cv) * (alpha * fr.xm * fr.xm * cv) -
                    fr.xm * fr.xm * fr.yB * fr.yB;
  return RealPolynomial{{c0, 2.0 * c1, c2, 2.0 * c3, c4}};
}

double pair_cost(const PairFrame& fr, double alpha, double phi, double y) {
  const double sv = std::sin(phi), cv = std::cos(phi);
  const double dm = (fr.xm - fr.xB) / sv;
  const double ym = fr.yB - dm * cv;
  const double t = dm + alpha * std::hypot(fr.xm, y);
  return t * t + (y - ym) * (y - ym) - 2.0 * (y - ym) * t * cv;
}

double pair_stationarity(const PairFrame& fr, double alpha, double phi, double y) {
  const double sv = std::sin(phi), cv = std::cos(phi);
  const double dm = (fr.xm - fr.xB) / sv;
  const double ym = fr.yB - dm * cv;
  const double a2 = alpha * alpha;
  const double S = std::hypot(fr.xm, y);
  const double lhs = ((1.0 + a2) * y - (ym + dm * cv)) * S;
  const double rhs = alpha * (2.0 * cv * y * y - (dm + ym * cv) * y + fr.xm * fr.xm * cv);
  const double scale = (1.0 + a2) * std::abs(y) * S + (std::abs(ym) + std::abs(dm)) * S +
                       std::abs(rhs) + 1.0;
  return std::abs(lhs - rhs) / scale;
}

FeasibleBand feasible_band(const MissilePair& pair, Point2 B) {
  validate_pair(pair);
  const PairFrame fr = pair_frame(pair, B);
  const double a2 = pair.alpha * pair.alpha;
  const double rad = a2 * ((fr.xB - fr.xA) * (fr.xB - fr.xA) + fr.yB * fr.yB) -
                     ((1.0 - a2) * fr.xm - fr.xB + a2 * fr.xA) *
                         ((1.0 - a2) * fr.xm - fr.xB + a2 * fr.xA);
  if (rad < 0.0)
    throw NoFeasibleHeading("feasible_band: Apollonius circle misses the interception line");
  const double root = std::sqrt(rad);
  FeasibleBand b;
  b.y_hi = (fr.yB + root) / (1.0 - a2);
  b.y_lo = (fr.yB - root) / (1.0 - a2);
  double lo = std::atan2(b.y_hi - fr.yB, fr.xm - fr.xB) + fr.lamA;
  double hi = std::atan2(b.y_lo - fr.yB, fr.xm - fr.xB) + fr.lamA;
  if (hi < lo) hi += 2.0 * M_PI;
  const double width = hi - lo;  // 0 at tangency
  b.theta_l = wrap_pi(lo);
  b.theta_u = b.theta_l + width;
  return b;
}

namespace {

PairSolution solve_at(const MissilePair& pair, const PairFrame& fr, double thetaB,
                      const FeasibleBand* band) {
  const double phi = thetaB - 0.5 * M_PI - fr.lamA;
  if (std::abs(std::sin(phi)) < kTol.parallel_sin_eps)
    throw PathParallelToBisector("pair game: evader path parallel to the interception line");

  const auto J = [&](double y) { return pair_cost(fr, pair.alpha, phi, y); };

  std::vector<double> cands;
  const RealPolynomial q = pair_quartic(fr, pair.alpha, phi);
  for (double y : real_roots(q, -kInf, kInf).roots)
    if (pair_stationarity(fr, pair.alpha, phi, y) < kTol.stationarity_rel)
      cands.push_back(y);

  if (band) {
    std::erase_if(cands, [&](double y) {
      return y < band->y_lo - 1e-9 || y > band->y_hi + 1e-9;
    });
    cands.push_back(band->y_lo);
    cands.push_back(band->y_hi);
  } else if (cands.empty()) {
    // Degenerate mid-flight geometry: fall back to a dense scan of the
    // coercive cost.
    const double R = 3.0 * fr.xm + 3.0 * std::abs(fr.yB);
    double besty = -R, bestJ = kInf;
    for (int i = 0; i < 2001; ++i) {
      const double y = -R + 2.0 * R * i / 2000.0;
      const double v = J(y);
      if (v < bestJ) { bestJ = v; besty = y; }
    }
    cands.push_back(besty);
  }

  double ystar = cands.front();
  for (double y : cands)
    if (J(y) < J(ystar) || (J(y) == J(ystar) && y < ystar)) ystar = y;

  PairSolution sol;
  sol.yStar = ystar;
  const RelativeFrame rel{pair.D, fr.lamA};
  sol.interceptPoint = rel.to_fixed({fr.xm, ystar});
  sol.chiStar = std::atan2(sol.interceptPoint.y - pair.A.y, sol.interceptPoint.x - pair.A.x);
  sol.psiStar = std::atan2(sol.interceptPoint.y - pair.D.y, sol.interceptPoint.x - pair.D.x);
  sol.value = std::sqrt(std::max(0.0, J(ystar)));
  return sol;
}

}  // namespace

PairSolution pair_game_solve(const MissilePair& pair, Point2 B, double thetaB) {
  const FeasibleBand band = feasible_band(pair, B);
  if (!in_band(band, thetaB, kTol.band_edge_slack))
    throw InfeasibleHeading("pair_game_solve: heading outside the feasible band");
  return solve_at(pair, pair_frame(pair, B), thetaB, &band);
}

PairSolution pair_feedback_aim(const MissilePair& pair, Point2 B, double thetaB) {
  validate_pair(pair);
  return solve_at(pair, pair_frame(pair, B), thetaB, nullptr);
}

double composite_cost(const RetreatScenario& sc, double thetaB) {
  validate(sc);
  const PairSolution s1 = pair_game_solve(sc.pair1, sc.B, thetaB);
  if (!sc.pair2) return s1.value;
  const PairSolution s2 = pair_game_solve(*sc.pair2, sc.B, thetaB);
  // Missiles share one speed, so path lengths order the interception times;
  // the evader advances alpha * (missile path) per unit of missile flight.
  const double L1 = dist(s1.interceptPoint, sc.pair1.D);
  const double L2 = dist(s2.interceptPoint, sc.pair2->D);
  const Point2 Bf = sc.B + sc.pair1.alpha * std::max(L1, L2) * unit_from_heading(thetaB);
  return sc.w * dist(s1.interceptPoint, Bf) + (1.0 - sc.w) * dist(s2.interceptPoint, Bf);
}

AngularInterval admissible_interval(const RetreatScenario& sc) {
  validate(sc);
  return admissible_detail(sc).iv;
}

RetreatScenario best_pairing(const RetreatScenario& sc) {
  validate(sc);
  if (!sc.pair2) return sc;
  const auto overlap = [&](const RetreatScenario& s) {
    try {
      const FeasibleBand b1 = feasible_band(s.pair1, s.B);
      const FeasibleBand b2 = feasible_band(*s.pair2, s.B);
      const AngularInterval u2 =
          unwrap_near({b2.theta_l, b2.theta_u}, 0.5 * (b1.theta_l + b1.theta_u));
      return std::min(b1.theta_u, u2.hi) - std::max(b1.theta_l, u2.lo);
    } catch (const EmptyFeasibleSet&) {
      return -kInf;
    }
  };
  RetreatScenario swapped = sc;
  std::swap(swapped.pair1.A, swapped.pair2->A);
  return overlap(swapped) > overlap(sc) + kTol.tiny ? swapped : sc;
}

HeadingOpt optimize_heading(const RetreatScenario& sc) {
  validate(sc);
  const AdmissibleDetail ad = admissible_detail(sc);
  const double lo = ad.iv.lo, hi = ad.iv.hi;

  const auto f = [&](double th) {
    try {
      return composite_cost(sc, th);
    } catch (const PathParallelToBisector&) {
      return -kInf;
    }
  };

  const int N = kTol.heading_grid;
  std::vector<double> ths(N), vals(N);
  for (int i = 0; i < N; ++i) {
    ths[i] = (N == 1) ? lo : lo + (hi - lo) * i / (N - 1);
    vals[i] = f(ths[i]);
  }
  int k = 0;
  for (int i = 1; i < N; ++i)
    if (vals[i] > vals[k]) k = i;
  if (vals[k] == -kInf)
    throw SolverFailure("optimize_heading: cost undefined across the whole interval");

  double a = ths[std::max(0, k - 1)], b = ths[std::min(N - 1, k + 1)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  while (b - a > kTol.golden_tol) {
    if (f(c) > f(d)) {
      b = d; d = c; c = b - gr * (b - a);
    } else {
      a = c; c = d; d = a + gr * (b - a);
    }
  }
  double th = 0.5 * (a + b);
  double val = f(th);

  // Snap onto an interval edge when the maximizer is within a grid cell of
  // it and the edge is no worse: an active bound must be reported exactly
  // (downstream closed-loop behavior keys on the precise boundary heading).
  HeadingOpt out;
  const double cell = (N > 1) ? 2.0 * (hi - lo) / (N - 1) : 0.0;
  const double slack = 1e-12 * (1.0 + std::abs(val));
  if (hi - th <= cell && f(hi) >= val - slack) {
    th = hi;
    val = f(hi);
    out.boundary = true;
    out.constraintActive = ad.hi_from_constraint;
  } else if (th - lo <= cell && f(lo) >= val - slack) {
    th = lo;
    val = f(lo);
    out.boundary = true;
    out.constraintActive = ad.lo_from_constraint;
  }
  out.thetaStar = th;
  out.value = val;
  return out;
}

}  // namespace bvr
