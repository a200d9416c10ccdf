#include "bvr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "bvr/tolerances.hpp"

namespace bvr {

int TrajectoryLog::add_agent(const std::string& id) {
  agents.push_back(id);
  series.emplace_back();
  return static_cast<int>(agents.size()) - 1;
}

void TrajectoryLog::sample(int idx, double t, const AgentDynamics& a) {
  series[idx].push_back({t, a.position, a.heading, a.speed});
}

Point2 step_velocity(const AgentDynamics& a) {
  switch (a.kind) {
    case MotionKind::SimpleMotion:
      return a.commandedSpeed * unit_from_heading(a.commandedHeading);
    case MotionKind::HeadingLag:
      return a.commandedSpeed * unit_from_heading(a.heading);
    case MotionKind::HeadingSpeedLag:
      return a.speed * unit_from_heading(a.heading);
  }
  return {0.0, 0.0};
}

AgentDynamics step_agent(const AgentDynamics& a, double dt) {
  if (!(dt > 0.0)) throw ValidationError("step_agent: dt must be positive");
  AgentDynamics n = a;
  n.position = a.position + dt * step_velocity(a);
  switch (a.kind) {
    case MotionKind::SimpleMotion:
      n.heading = a.commandedHeading;
      n.speed = a.commandedSpeed;
      break;
    case MotionKind::HeadingLag:
      if (!(a.tauHeading > 0.0))
        throw ValidationError("step_agent: heading lag requires tauHeading > 0");
      n.heading = a.commandedHeading +
                  wrap_signed(a.heading - a.commandedHeading) * std::exp(-dt / a.tauHeading);
      n.speed = a.commandedSpeed;
      break;
    case MotionKind::HeadingSpeedLag:
      if (!(a.tauHeading > 0.0) || !(a.tauSpeed > 0.0))
        throw ValidationError("step_agent: heading/speed lag requires positive time constants");
      n.heading = a.commandedHeading +
                  wrap_signed(a.heading - a.commandedHeading) * std::exp(-dt / a.tauHeading);
      n.speed = a.commandedSpeed + (a.speed - a.commandedSpeed) * std::exp(-dt / a.tauSpeed);
      break;
  }
  return n;
}

namespace {

void advance(AgentDynamics& a, double dt) {
  if (dt > 0.0) a = step_agent(a, dt);
}

// Earliest fraction s in [0, 1] at which |d + s*dv| falls to r; 0 when
// already inside, nullopt when the step never crosses.
std::optional<double> crossing_fraction(Point2 d, Point2 dv, double r) {
  const double c = dot(d, d) - r * r;
  if (c <= 0.0) return 0.0;
  const double a = dot(dv, dv);
  if (a <= 0.0) return std::nullopt;
  const double b = 2.0 * dot(d, dv);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = (-b - std::sqrt(disc)) / (2.0 * a);
  if (s >= 0.0 && s <= 1.0) return s;
  return std::nullopt;
}

std::string state_snapshot(double t, std::initializer_list<std::pair<const char*, Point2>> pts) {
  std::ostringstream os;
  os.precision(12);
  os << "t=" << t;
  for (const auto& [name, p] : pts) os << " " << name << "=(" << p.x << "," << p.y << ")";
  return os.str();
}

}  // namespace

AttackTerminal run_attack_stage(const AttackScenario& sc, const AttackAgentSetup& setup,
                                const SimConfig& cfg, TrajectoryLog* log) {
  validate(sc);
  if (!(cfg.dt > 0.0) || cfg.replanEvery < 1)
    throw ValidationError("run_attack_stage: dt must be positive and replanEvery >= 1");

  AgentDynamics B = setup.B, R1 = setup.R1, R2 = setup.R2, BW = setup.BW;
  B.position = sc.B;
  R1.position = sc.R1;
  R2.position = sc.R2;

  int iB = -1, i1 = -1, i2 = -1, iW = -1;
  if (log) {
    iB = log->add_agent("B");
    i1 = log->add_agent("R1");
    i2 = log->add_agent("R2");
    iW = log->add_agent("BW");
    log->sample(iB, 0.0, B);
    log->sample(i1, 0.0, R1);
    log->sample(i2, 0.0, R2);
    log->sample(iW, 0.0, BW);
  }

  double t = 0.0;
  auto finish = [&](AttackTermination why) {
    AttackTerminal term;
    term.termination = why;
    term.t = t;
    term.B = B.position;
    term.R1 = R1.position;
    term.R2 = R2.position;
    term.BW = BW.position;
    term.headingB = B.heading;
    term.speedB = B.speed;
    term.d1 = dist(B.position, R1.position);
    term.d2 = dist(B.position, R2.position);
    term.J = dist(B.position, sc.Rs);
    term.rho = sc.rho;
    term.winner = term.J <= sc.rho_s ? Winner::Blue : Winner::Red;
    return term;
  };

  for (long step = 0; t + kTol.tiny < cfg.maxTime; ++step) {
    // Containment first: a start on (or numerically inside) a terminal ring
    // ends the stage before any replanning is attempted.
    if (dist(B.position, R1.position) <= sc.rho) {
      if (log) log->events.push_back({t, "RangeReached", "B,R1"});
      return finish(AttackTermination::RangeReached);
    }
    if (dist(B.position, R2.position) <= sc.rho) {
      if (log) log->events.push_back({t, "RangeReached", "B,R2"});
      return finish(AttackTermination::RangeReached);
    }
    if (dist(B.position, sc.Rs) <= sc.rho_s) {
      if (log) log->events.push_back({t, "GammaReached", "B"});
      return finish(AttackTermination::GammaReached);
    }

    if (step % cfg.replanEvery == 0) {
      AttackScenario cur = sc;
      cur.B = B.position;
      cur.R1 = R1.position;
      cur.R2 = R2.position;
      try {
        const AttackSolution sol = select_strategy(cur);
        B.commandedHeading = sol.headingB;
        BW.commandedHeading = sol.headingB;  // wingman flies formation
        R1.commandedHeading = sol.heading1;
        R2.commandedHeading = sol.heading2;
      } catch (const Error& e) {
        throw SolverFailure(std::string("attack replan failed (") + e.what() + ") at " +
                            state_snapshot(t, {{"B", cur.B}, {"R1", cur.R1}, {"R2", cur.R2}}));
      }
    }

    const double stepDt = std::min(cfg.dt, cfg.maxTime - t);
    const Point2 vB = stepDt * step_velocity(B);
    const Point2 v1 = stepDt * step_velocity(R1);
    const Point2 v2 = stepDt * step_velocity(R2);

    double smin = 2.0;
    int which = -1;  // 0: R1 range, 1: R2 range, 2: standoff ring
    if (auto s = crossing_fraction(B.position - R1.position, vB - v1, sc.rho); s && *s < smin) {
      smin = *s;
      which = 0;
    }
    if (auto s = crossing_fraction(B.position - R2.position, vB - v2, sc.rho); s && *s < smin) {
      smin = *s;
      which = 1;
    }
    if (auto s = crossing_fraction(B.position - sc.Rs, vB, sc.rho_s); s && *s < smin) {
      smin = *s;
      which = 2;
    }

    const double sdt = which >= 0 ? smin * stepDt : stepDt;
    advance(B, sdt);
    advance(R1, sdt);
    advance(R2, sdt);
    advance(BW, sdt);
    t += sdt;
    if (log) {
      log->sample(iB, t, B);
      log->sample(i1, t, R1);
      log->sample(i2, t, R2);
      log->sample(iW, t, BW);
    }

    if (which == 0 || which == 1) {
      if (log) log->events.push_back({t, "RangeReached", which == 0 ? "B,R1" : "B,R2"});
      return finish(AttackTermination::RangeReached);
    }
    if (which == 2) {
      if (log) log->events.push_back({t, "GammaReached", "B"});
      return finish(AttackTermination::GammaReached);
    }
  }
  if (log) log->events.push_back({t, "Timeout", ""});
  return finish(AttackTermination::Timeout);
}

RetreatScenario spawn_retreat(const AttackTerminal& terminal, Point2 defenderLaunch,
                              double vRetreat, double vMissile, double w,
                              std::optional<AngularInterval> headingConstraint,
                              double launchEps) {
  if (terminal.termination == AttackTermination::GammaReached)
    throw WrongTermination(
        "spawn_retreat: evader reached the standoff ring; no retreat game is posed");
  if (terminal.termination == AttackTermination::Timeout)
    throw WrongTermination("spawn_retreat: attack stage timed out without a block");
  if (!(vRetreat > 0.0) || !(vMissile > 0.0))
    throw ValidationError("spawn_retreat: speeds must be positive");

  const double alpha = vRetreat / vMissile;
  const bool launch1 = terminal.d1 <= terminal.rho + launchEps;
  const bool launch2 = terminal.d2 <= terminal.rho + launchEps;
  if (!launch1 && !launch2)
    throw WrongTermination("spawn_retreat: no interceptor closed to launch range");

  RetreatScenario sc;
  sc.B = terminal.B;
  sc.w = w;
  sc.headingConstraint =
      headingConstraint ? *headingConstraint
                        : AngularInterval{terminal.headingB, terminal.headingB + M_PI};
  if (launch1) {
    sc.pair1 = MissilePair{terminal.R1, defenderLaunch, alpha};
    if (launch2) sc.pair2 = MissilePair{terminal.R2, defenderLaunch, alpha};
  } else {
    sc.pair1 = MissilePair{terminal.R2, defenderLaunch, alpha};
  }
  validate(sc);
  return sc;
}

RetreatOutcome run_retreat_stage(const RetreatScenario& sc, const AgentDynamics& evader,
                                 double vMissile, const SimConfig& cfg, TrajectoryLog* log,
                                 bool replanHeading) {
  validate(sc);
  if (!(vMissile > 0.0))
    throw ValidationError("run_retreat_stage: missile speed must be positive");
  if (!(cfg.dt > 0.0) || cfg.replanEvery < 1)
    throw ValidationError("run_retreat_stage: dt must be positive and replanEvery >= 1");

  const HeadingOpt opening = optimize_heading(sc);

  AgentDynamics B = evader;
  B.position = sc.B;
  B.commandedHeading = opening.thetaStar;

  struct MissileState {
    MissilePair pair;
    AgentDynamics A, D;
    bool alive = true;
    double tInt = 0.0;
    Point2 I{0.0, 0.0};
    Point2 aim{0.0, 0.0};
    int logA = -1, logD = -1;
    const char* idA = "";
    const char* idD = "";
  };
  const int npairs = sc.pair2 ? 2 : 1;
  MissileState ms[2];
  for (int i = 0; i < npairs; ++i) {
    ms[i].pair = i == 0 ? sc.pair1 : *sc.pair2;
    ms[i].A.kind = MotionKind::SimpleMotion;
    ms[i].A.position = ms[i].pair.A;
    ms[i].A.speed = ms[i].A.commandedSpeed = vMissile;
    ms[i].D = ms[i].A;
    ms[i].D.position = ms[i].pair.D;
    ms[i].aim = sc.B;
    ms[i].idA = i == 0 ? "A1" : "A2";
    ms[i].idD = i == 0 ? "D1" : "D2";
  }

  int iB = -1;
  if (log) {
    iB = log->add_agent("B");
    for (int i = 0; i < npairs; ++i) {
      ms[i].logA = log->add_agent(ms[i].idA);
      ms[i].logD = log->add_agent(ms[i].idD);
      log->events.push_back({0.0, "MissileLaunch", std::string(ms[i].idA) + "," + ms[i].idD});
    }
    log->sample(iB, 0.0, B);
    for (int i = 0; i < npairs; ++i) {
      log->sample(ms[i].logA, 0.0, ms[i].A);
      log->sample(ms[i].logD, 0.0, ms[i].D);
    }
  }

  double t = 0.0;
  RetreatOutcome out;
  out.thetaStar = opening.thetaStar;
  out.plannedValue = opening.value;
  out.constraintActive = opening.constraintActive;

  auto finish = [&](RetreatOutcome::Termination why, Winner win) {
    out.termination = why;
    out.winner = win;
    out.tEnd = t;
    const auto pair_result = [&](const MissileState& m, double& tInt, Point2& I, double& d) {
      if (m.alive) {
        I = m.A.position;
        tInt = 0.0;
        d = dist(m.A.position, B.position);
      } else {
        I = m.I;
        tInt = m.tInt;
        d = dist(m.I, B.position);
      }
    };
    pair_result(ms[0], out.t1, out.I1, out.d1);
    if (npairs == 2) {
      pair_result(ms[1], out.t2, out.I2, out.d2);
      out.Jc = sc.w * out.d1 + (1.0 - sc.w) * out.d2;
    } else {
      out.Jc = out.d1;
    }
    return out;
  };

  for (long step = 0; t + kTol.tiny < cfg.maxTime; ++step) {
    if (step % cfg.replanEvery == 0) {
      if (replanHeading && std::all_of(ms, ms + npairs, [](const MissileState& m) {
            return m.alive;
          })) {
        RetreatScenario cur = sc;
        cur.B = B.position;
        cur.pair1 = MissilePair{ms[0].A.position, ms[0].D.position, sc.pair1.alpha};
        if (npairs == 2)
          cur.pair2 = MissilePair{ms[1].A.position, ms[1].D.position, sc.pair2->alpha};
        try {
          B.commandedHeading = optimize_heading(cur).thetaStar;
        } catch (const Error&) {
          // keep the previous command when the replanned game degenerates
        }
      }
      for (int i = 0; i < npairs; ++i) {
        if (!ms[i].alive) continue;
        const MissilePair cur{ms[i].A.position, ms[i].D.position, ms[i].pair.alpha};
        try {
          ms[i].aim = pair_feedback_aim(cur, B.position, B.commandedHeading).interceptPoint;
        } catch (const Error&) {
          // keep steering at the previous interception point
        }
        const auto steer = [&](AgentDynamics& a) {
          const Point2 d = ms[i].aim - a.position;
          if (norm(d) > 1e-9) {
            a.commandedHeading = std::atan2(d.y, d.x);
            a.commandedSpeed = vMissile;
          } else {
            a.commandedSpeed = 0.0;
          }
        };
        steer(ms[i].A);
        steer(ms[i].D);
      }
    }

    const double stepDt = std::min(cfg.dt, cfg.maxTime - t);
    const Point2 vB = stepDt * step_velocity(B);

    double smin = 2.0;
    int which = -1;   // pair index
    bool capture = false;
    for (int i = 0; i < npairs; ++i) {
      if (!ms[i].alive) continue;
      const Point2 vA = stepDt * step_velocity(ms[i].A);
      const Point2 vD = stepDt * step_velocity(ms[i].D);
      if (auto s = crossing_fraction(ms[i].A.position - ms[i].D.position, vA - vD,
                                     cfg.captureEps);
          s && *s < smin) {
        smin = *s;
        which = i;
        capture = false;
      }
      if (auto s = crossing_fraction(ms[i].A.position - B.position, vA - vB, cfg.captureEps);
          s && *s < smin) {
        smin = *s;
        which = i;
        capture = true;
      }
    }

    const double sdt = which >= 0 ? smin * stepDt : stepDt;
    advance(B, sdt);
    for (int i = 0; i < npairs; ++i) {
      if (!ms[i].alive) continue;
      advance(ms[i].A, sdt);
      advance(ms[i].D, sdt);
    }
    t += sdt;
    if (log) {
      log->sample(iB, t, B);
      for (int i = 0; i < npairs; ++i) {
        log->sample(ms[i].logA, t, ms[i].A);
        log->sample(ms[i].logD, t, ms[i].D);
      }
    }

    if (which >= 0) {
      MissileState& m = ms[which];
      if (capture) {
        if (log) log->events.push_back({t, "Capture", std::string(m.idA) + ",B"});
        m.alive = false;
        m.tInt = t;
        m.I = m.A.position;
        return finish(RetreatOutcome::Termination::Captured, Winner::Red);
      }
      // Both missiles arrive together, so the midpoint of the closing pair is
      // the interception-point estimate (second-order accurate in captureEps).
      m.alive = false;
      m.tInt = t;
      m.I = 0.5 * (m.A.position + m.D.position);
      m.A.commandedSpeed = m.A.speed = 0.0;
      m.D.commandedSpeed = m.D.speed = 0.0;
      if (log) log->events.push_back({t, "Interception", std::string(m.idA) + "," + m.idD});
      if (std::none_of(ms, ms + npairs, [](const MissileState& s) { return s.alive; }))
        return finish(RetreatOutcome::Termination::Intercepted, Winner::Blue);
    }
  }
  if (log) log->events.push_back({t, "Timeout", ""});
  const bool anyAlive = std::any_of(ms, ms + npairs, [](const MissileState& s) { return s.alive; });
  return finish(RetreatOutcome::Termination::Timeout, anyAlive ? Winner::Red : Winner::Blue);
}

}  // namespace bvr
