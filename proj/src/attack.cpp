#include "bvr/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bvr {

const char* to_string(AttackMode m) {
  switch (m) {
    case AttackMode::Cooperative: return "Cooperative";
    case AttackMode::Solo1: return "Solo1";
    case AttackMode::Solo2: return "Solo2";
    case AttackMode::BisectorRestricted: return "BisectorRestricted";
  }
  return "?";
}

const char* to_string(Winner w) {
  return w == Winner::Blue ? "Blue" : "Red";
}

void validate(const AttackScenario& sc) {
  if (!(sc.beta > 1.0))
    throw ValidationError("attack scenario: beta must exceed 1 (got " + std::to_string(sc.beta) + ")");
  if (!(sc.rho > 0.0) || !(sc.rho_s > 0.0))
    throw ValidationError("attack scenario: engagement ranges must be positive");
  if (dist(sc.B, sc.R1) < sc.rho || dist(sc.B, sc.R2) < sc.rho)
    throw ValidationError("attack scenario: evader already within an interceptor's engagement range");
  if (dist(sc.B, sc.Rs) < sc.rho_s)
    throw ValidationError("attack scenario: evader already inside the standoff ring");
}

namespace {

// Signed oval residual in the evader-anchored frame (B at the origin):
// zero on interceptor R's inner oval, positive on B's side of it.
double oval_residual(Point2 P, Point2 R, double beta, double rho) {
  return dist(P, R) - beta * norm(P) - rho;
}

bool lex_less(Point2 a, Point2 b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

struct Candidate {
  Point2 p;  // relative frame
  double cost = std::numeric_limits<double>::infinity();
};

// Smaller cost wins; exact cost ties go to the lexicographically smaller point.
void keep_better(Candidate& best, Point2 p, double cost) {
  if (cost < best.cost || (cost == best.cost && lex_less(p, best.p))) {
    best.p = p;
    best.cost = cost;
  }
}

AttackSolution finish(const AttackScenario& sc, AttackMode mode, Point2 aim) {
  AttackSolution sol;
  sol.mode = mode;
  sol.aimpoint = aim;
  sol.value = dist(aim, sc.Rs);
  sol.headingB = std::atan2(aim.y - sc.B.y, aim.x - sc.B.x);
  sol.heading1 = std::atan2(aim.y - sc.R1.y, aim.x - sc.R1.x);
  sol.heading2 = std::atan2(aim.y - sc.R2.y, aim.x - sc.R2.x);
  sol.winner = sol.value <= sc.rho_s ? Winner::Blue : Winner::Red;
  return sol;
}

}  // namespace

bool in_dominance_region(const AttackScenario& sc, Point2 P) {
  for (Point2 R : {sc.R1, sc.R2}) {
    const double margin = dist(P, R) - sc.rho - sc.beta * dist(P, sc.B);
    if (margin < -kTol.membership_slack_rel * std::max(1.0, dist(sc.B, R)))
      return false;
  }
  return true;
}

RealPolynomial coop_quartic(const CartesianOval& oval1, const BisectorLine& line) {
  const double x1 = oval1.x1, beta = oval1.beta, rho = oval1.rho;
  const double m = line.m, n = line.n;
  const double b = 1.0 - beta * beta;
  const double eta = rho * rho - x1 * x1;
  const double b2r2 = beta * beta * rho * rho;
  const double k3 = b * (1.0 + m * m) * (b * m * n - x1);
  const double k2 = b * b * n * n * (3.0 * m * m + 1.0) / 2.0 -
                    b * (2.0 * m * n * x1 + eta * (1.0 + m * m) / 2.0) +
                    x1 * x1 - b2r2 * (1.0 + m * m);
  const double k1 = b * b * m * n * n * n - b * n * (n * x1 + m * eta) +
                    x1 * eta - 2.0 * b2r2 * m * n;
  const double k0 = (b * n * n - eta) * (b * n * n - eta) -
                    (2.0 * beta * rho * n) * (2.0 * beta * rho * n);
  const double k4 = b * b * (1.0 + m * m) * (1.0 + m * m);
  return RealPolynomial{{k0, 4.0 * k1, 4.0 * k2, 4.0 * k3, k4}};
}

std::vector<Point2> coop_intersections(const RealPolynomial& q,
                                       const CartesianOval& oval1,
                                       const CartesianOval& oval2, Point2 r2,
                                       const BisectorLine& line) {
  const double inf = std::numeric_limits<double>::infinity();
  const RootSet roots = real_roots(q, -inf, inf);
  const double tol = kTol.oval_on_boundary_rel * std::max(1.0, oval1.x1);
  std::vector<Point2> pts;
  for (double x : roots.roots) {
    const Point2 P{x, line.m * x + line.n};
    const double o1 = oval_residual(P, {oval1.x1, 0.0}, oval1.beta, oval1.rho);
    const double o2 = oval_residual(P, r2, oval2.beta, oval2.rho);
    if (std::abs(o1) <= tol && std::abs(o2) <= tol) pts.push_back(P);
  }
  if (pts.empty())
    throw NoIntersection("coop_intersections: ovals do not intersect on the bisector");
  return pts;
}

AttackSolution solve_cooperative(const AttackScenario& sc) {
  validate(sc);
  const AttackFrame fr = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs);
  const CartesianOval oval1{fr.x1, sc.beta, sc.rho};
  const CartesianOval oval2{norm(fr.r2), sc.beta, sc.rho};
  const double tol = kTol.oval_on_boundary_rel * std::max(1.0, fr.x1);

  Candidate best;
  try {
    const BisectorLine line = bisector({fr.x1, 0.0}, fr.r2);
    const RealPolynomial q = coop_quartic(oval1, line);
    for (Point2 P : coop_intersections(q, oval1, oval2, fr.r2, line))
      keep_better(best, P, dist(P, fr.rs));
  } catch (const VerticalBisector&) {
    // Interceptors collinear with B: the bisector is x = (x1 + x2)/2.
    // On that line the oval relation reduces to a quadratic in u = |P|.
    const double x0 = (fr.x1 + fr.r2.x) / 2.0;
    const double b = 1.0 - sc.beta * sc.beta;
    const double dx = x0 - fr.x1;
    const RealPolynomial qu{{dx * dx - x0 * x0 - sc.rho * sc.rho,
                             -2.0 * sc.beta * sc.rho, b}};
    const double inf = std::numeric_limits<double>::infinity();
    for (double u : real_roots(qu, 0.0, inf).roots) {
      if (u * u < x0 * x0) continue;
      const double y = std::sqrt(std::max(0.0, u * u - x0 * x0));
      for (Point2 P : {Point2{x0, y}, Point2{x0, -y}}) {
        const double o1 = oval_residual(P, {fr.x1, 0.0}, sc.beta, sc.rho);
        const double o2 = oval_residual(P, fr.r2, sc.beta, sc.rho);
        if (std::abs(o1) <= tol && std::abs(o2) <= tol)
          keep_better(best, P, dist(P, fr.rs));
      }
    }
    if (!std::isfinite(best.cost))
      throw NoIntersection("solve_cooperative: ovals do not intersect on the vertical bisector");
  }
  return finish(sc, AttackMode::Cooperative, fr.frame.to_fixed(best.p));
}

RealPolynomial solo_sextic(const CartesianOval& oval, double ds, double phi) {
  const double x1 = oval.x1, beta = oval.beta, rho = oval.rho;
  const double b = 1.0 - beta * beta;
  const double eta = rho * rho - x1 * x1;
  const double cphi = std::cos(phi), sphi = std::abs(std::sin(phi));
  const double s2 = sphi * sphi;
  const double p = b * cphi;
  const double X = x1 / ds;
  const double brr = beta * beta * rho * rho;
  const double core = b * b + X * (X - 2.0 * p);  // shared quadratic form
  const double k0 = brr * eta * eta;
  const double k1 = 4.0 * beta * rho *
                    (eta * (brr - x1 * x1 * s2) + 0.5 * eta * eta * (X * cphi - b));
  const double k2 = 2.0 * brr * (2.0 * brr - 2.0 * x1 * x1 * (1.0 + s2) +
                                 eta * (4.0 * X * cphi - 5.0 * b)) +
                    eta * eta * core + 4.0 * x1 * x1 * s2 * (x1 * x1 + b * eta);
  const double k3 = 4.0 * beta * rho *
                    (brr * (2.0 * X * cphi - 3.0 * b) + b * eta * (2.0 * b - 3.0 * X * cphi) +
                     x1 * x1 * (eta / (ds * ds) + b * (2.0 + s2) - 2.0 * X * cphi));
  const double k4 = brr * (13.0 * b * b + 4.0 * X * (X - 4.0 * p)) -
                    2.0 * (b * eta + 2.0 * x1 * x1) * core;
  const double k5 = -2.0 * b * beta * rho * (3.0 * b * b + X * (2.0 * X - 5.0 * p));
  const double k6 = b * b * core;
  return RealPolynomial{{k0, k1, k2, k3, k4, k5, k6}};
}

AttackSolution solve_solo(const AttackScenario& sc, int interceptor) {
  validate(sc);
  if (interceptor != 1 && interceptor != 2)
    throw ValidationError("solve_solo: interceptor index must be 1 or 2");
  const Point2 Ri = interceptor == 1 ? sc.R1 : sc.R2;
  const Point2 Ro = interceptor == 1 ? sc.R2 : sc.R1;
  const AttackFrame fr = attack_relative_frame(sc.B, Ri, Ro, sc.Rs);
  const CartesianOval oval{fr.x1, sc.beta, sc.rho};
  const auto [rlo, rhi] = oval_radius_bounds(oval);

  const double ds = norm(fr.rs);
  const double phi = std::atan2(fr.rs.y, fr.rs.x);
  const double zeta = fr.rs.y >= 0.0 ? 1.0 : -1.0;
  const double cphi = std::cos(phi), sphi = std::abs(std::sin(phi));
  const double b = 1.0 - sc.beta * sc.beta;
  const double eta = sc.rho * sc.rho - fr.x1 * fr.x1;
  const double X = fr.x1 / ds;

  // Un-squared stationarity of the oval-to-target distance in r; squaring
  // (which produced the sextic) admits sign-spurious roots that fail this.
  const auto stationary = [&](double r) {
    const double g = b * r * r - 2.0 * sc.beta * sc.rho * r - eta;
    const double rb = b * r - sc.beta * sc.rho;
    const double S = std::sqrt(std::max(0.0, 4.0 * fr.x1 * fr.x1 * r * r - g * g));
    const double lhs = sphi * (2.0 * fr.x1 * fr.x1 * r - g * rb);
    const double rhs = (X * r - rb * cphi) * S;
    const double scale =
        sphi * (2.0 * fr.x1 * fr.x1 * r + std::abs(g * rb)) + (std::abs(rb) + X * r) * S + 1.0;
    return std::abs(lhs - rhs) / scale < kTol.stationarity_rel;
  };

  Candidate best;
  const RealPolynomial sx = solo_sextic(oval, ds, phi);
  for (double r : real_roots(sx, rlo, rhi).roots) {
    if (!stationary(r)) continue;
    const double g = b * r * r - 2.0 * sc.beta * sc.rho * r - eta;
    const double ct = g / (2.0 * fr.x1 * r);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const Point2 P{r * ct, zeta * r * st};
    keep_better(best, P, dist(P, fr.rs));
  }
  // The oval vertices always compete: they carry the optimum whenever no
  // interior stationary point does.
  keep_better(best, {rlo, 0.0}, dist({rlo, 0.0}, fr.rs));
  keep_better(best, {-rhi, 0.0}, dist({-rhi, 0.0}, fr.rs));

  return finish(sc, interceptor == 1 ? AttackMode::Solo1 : AttackMode::Solo2,
                fr.frame.to_fixed(best.p));
}

AttackSolution select_strategy(const AttackScenario& sc) {
  validate(sc);
  const AttackSolution sol1 = solve_solo(sc, 1);
  const AttackSolution sol2 = solve_solo(sc, 2);
  const AttackSolution& cheaper = sol2.value < sol1.value ? sol2 : sol1;
  const bool in1 = in_dominance_region(sc, sol1.aimpoint);
  const bool in2 = in_dominance_region(sc, sol2.aimpoint);

  if (in1 != in2) return in1 ? sol1 : sol2;

  if (in1 && in2) {
    // Both one-on-one aimpoints are safe: restrict to the bisector at the
    // solo abscissae and take the cheaper projection.
    const AttackFrame fr = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs);
    BisectorLine line;
    try {
      line = bisector({fr.x1, 0.0}, fr.r2);
    } catch (const VerticalBisector&) {
      AttackSolution out = cheaper;
      out.mode = AttackMode::BisectorRestricted;
      return out;
    }
    Candidate best;
    for (const AttackSolution* s : {&sol1, &sol2}) {
      const double x = fr.frame.to_relative(s->aimpoint).x;
      const Point2 P{x, line.m * x + line.n};
      keep_better(best, P, dist(P, fr.rs));
    }
    return finish(sc, AttackMode::BisectorRestricted, fr.frame.to_fixed(best.p));
  }

  try {
    return solve_cooperative(sc);
  } catch (const NoIntersection&) {
    return cheaper;  // disjoint ovals: only one interceptor can matter
  }
}

}  // namespace bvr
