#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bvr/attack.hpp"
#include "bvr/geometry.hpp"
#include "bvr/retreat.hpp"

namespace bvr {

enum class MotionKind {
  SimpleMotion,     // heading/speed track commands instantly
  HeadingLag,       // first-order heading lag, speed tracks instantly
  HeadingSpeedLag,  // first-order lag on both heading and speed
};

struct AgentDynamics {
  MotionKind kind = MotionKind::SimpleMotion;
  double tauHeading = 0.0;  // > 0 for lag kinds
  double tauSpeed = 0.0;    // > 0 for HeadingSpeedLag
  Point2 position{0.0, 0.0};
  double heading = 0.0;
  double speed = 0.0;
  double commandedHeading = 0.0;
  double commandedSpeed = 0.0;
};

// Velocity the agent will fly during the next Euler step (commands applied
// instantly where the model has no lag).
Point2 step_velocity(const AgentDynamics& a);

// Advance one step: position by explicit Euler at the step-initial velocity,
// then the lagged states by the exact exponential relaxation over dt.
// Heading relaxes along the shortest arc.
AgentDynamics step_agent(const AgentDynamics& a, double dt);

struct SimConfig {
  double dt = 1e-3;
  double captureEps = 1e-2;  // point-capture radius for missile events
  int replanEvery = 1;       // steps between guidance updates
  double maxTime = 200.0;
};

struct SimEvent {
  double t = 0.0;
  std::string kind;      // RangeReached, GammaReached, MissileLaunch,
                         // Interception, Capture, StageTransition, Timeout
  std::string subjects;  // comma-separated agent ids
};

struct StateSample {
  double t = 0.0;
  Point2 position{0.0, 0.0};
  double heading = 0.0;
  double speed = 0.0;
};

struct TrajectoryLog {
  std::vector<std::string> agents;
  std::vector<std::vector<StateSample>> series;  // parallel to agents
  std::vector<SimEvent> events;

  int add_agent(const std::string& id);
  void sample(int idx, double t, const AgentDynamics& a);
};

enum class AttackTermination { RangeReached, GammaReached, Timeout };

struct AttackTerminal {
  AttackTermination termination = AttackTermination::Timeout;
  double t = 0.0;
  Point2 B, R1, R2, BW;
  double headingB = 0.0;
  double speedB = 0.0;
  double d1 = 0.0, d2 = 0.0;  // terminal evader-interceptor separations
  double J = 0.0;             // terminal |B - Rs|
  double rho = 0.0;           // engagement range, carried for the hand-off
  Winner winner = Winner::Red;
};

struct AttackAgentSetup {
  AgentDynamics B, R1, R2, BW;  // positions of B/R1/R2 are taken from the scenario
};

// Closed-loop attack stage: every replanEvery steps the aimpoint strategy is
// re-solved at the current state and commanded headings updated (the wingman
// flies formation on the evader's command). Terminates when an interceptor
// closes to rho, the evader reaches the standoff ring, or maxTime.
AttackTerminal run_attack_stage(const AttackScenario& sc, const AttackAgentSetup& setup,
                                const SimConfig& cfg, TrajectoryLog* log = nullptr);

// Build the retreat game posed at the attack hand-off: missiles launch from
// the interceptors that actually closed to range (within launchEps) and the
// defenders from the wingman's position; the heading constraint defaults to
// [terminal evader heading, + pi].
RetreatScenario spawn_retreat(const AttackTerminal& terminal, Point2 defenderLaunch,
                              double vRetreat, double vMissile, double w,
                              std::optional<AngularInterval> headingConstraint = std::nullopt,
                              double launchEps = 1e-2);

struct RetreatOutcome {
  enum class Termination { Intercepted, Captured, Timeout };
  Termination termination = Termination::Timeout;
  double thetaStar = 0.0;
  double plannedValue = 0.0;  // composite cost predicted by the opening solve
  bool constraintActive = false;
  double tEnd = 0.0;
  double t1 = 0.0, t2 = 0.0;  // interception times (0 when the pair is absent)
  Point2 I1, I2;              // interception points (pair midpoints at capture)
  double d1 = 0.0, d2 = 0.0;  // distances from the final evader position
  double Jc = 0.0;
  Winner winner = Winner::Red;
};

// Closed-loop retreat stage: the evader's heading command is solved once at
// stage start (optionally re-solved when replanHeading is set); each replan
// interval the missiles steer at the current pair-game interception point
// computed against the evader's commanded heading.
RetreatOutcome run_retreat_stage(const RetreatScenario& sc, const AgentDynamics& evader,
                                 double vMissile, const SimConfig& cfg,
                                 TrajectoryLog* log = nullptr, bool replanHeading = false);

}  // namespace bvr
