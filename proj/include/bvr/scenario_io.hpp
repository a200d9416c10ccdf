#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvr/attack.hpp"
#include "bvr/retreat.hpp"
#include "bvr/sim.hpp"

namespace bvr {

struct AgentSpec {
  std::string id;
  std::string role;  // evader | interceptor | wingman | asset | attacker | defender
  Point2 position{0.0, 0.0};
  double speed = 0.0;
  double heading = 0.0;
  MotionKind dynamics = MotionKind::SimpleMotion;
  std::optional<double> tau_heading;
  std::optional<double> tau_speed;
};

struct Parameters {
  std::optional<double> beta, rho, rho_s;          // attack stage
  std::optional<double> alpha, w;                  // retreat stage
  std::optional<double> v_retreat, v_missile;      // retreat kinematics
  std::optional<AngularInterval> heading_constraint;
};

struct ScenarioFile {
  int schema_version = 1;
  std::string stage;  // attack | retreat | chained
  std::vector<AgentSpec> agents;
  Parameters params;
  SimConfig sim;  // defaults applied where the file is silent
};

// Strict parse: unknown keys, wrong types, and malformed JSON raise
// ParseError with the offending key path; schema-valid but game-invalid
// content (beta <= 1, alpha outside (0,1), strictly-inside starts, missing
// roles for the declared stage, ...) raises ValidationError.
ScenarioFile parse_scenario(const std::string& text);

// Canonical form: fixed key order, resolved sim block, defaults made
// explicit. parse(serialize(parse(text))) reproduces the same record, and
// identical records serialize to identical bytes.
std::string serialize_scenario(const ScenarioFile& sc);

ScenarioFile load_scenario(const std::string& path);  // IoError on unreadable files

// Resolved speed ratio alpha = v_retreat / v_missile (checked consistent
// with an explicit alpha when both forms are present).
double resolve_alpha(const Parameters& p);

AttackScenario make_attack_scenario(const ScenarioFile& sc);
AttackAgentSetup make_attack_setup(const ScenarioFile& sc);
// Standalone retreat stage: evader + 1..2 attackers + shared or per-attacker
// defender launch points, paired by declaration order.
RetreatScenario make_retreat_scenario(const ScenarioFile& sc);
// Evader dynamics for the retreat stage (commanded speed = v_retreat).
AgentDynamics make_retreat_evader(const ScenarioFile& sc);

const AgentSpec* find_role(const ScenarioFile& sc, const std::string& role);

// CSV: header `t,agent,x,y,heading,speed`, rows time-major, 9 significant
// digits everywhere.
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out);
// CSV: header `t,event,subjects`.
void write_events_csv(const TrajectoryLog& log, std::ostream& out);
// Writes <dir>/trajectory.csv and <dir>/events.csv. IoError on failure.
void write_trajectory(const TrajectoryLog& log, const std::string& dir);

// Results summary with the fixed key set {stage, mode, value, terminal_cost,
// winner, theta_star, events}; inapplicable entries are null. Extra detail
// fields may follow the fixed set.
struct Summary {
  std::string stage;
  std::optional<std::string> mode;
  std::optional<double> value;
  std::optional<double> terminal_cost;
  std::optional<std::string> winner;
  std::optional<double> theta_star;
  std::vector<SimEvent> events;
  std::vector<std::pair<std::string, double>> extra;  // preserves insertion order
};

std::string serialize_summary(const Summary& s);

}  // namespace bvr
