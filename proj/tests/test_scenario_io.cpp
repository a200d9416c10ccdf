#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bvr/errors.hpp"
#include "bvr/retreat.hpp"
#include "bvr/scenario_io.hpp"

#include "json.hpp"

using namespace bvr;

namespace {

std::string scenario_path(const char* name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class E>
std::string message_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected an exception");
  return {};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("baseline attack file loads and round-trips byte-identically") {
  const ScenarioFile sc = load_scenario(scenario_path("attack_baseline.json"));
  CHECK(sc.schema_version == 1);
  CHECK(sc.stage == "attack");
  REQUIRE(sc.agents.size() == 5);
  CHECK(sc.agents[0].id == "B");
  CHECK(sc.agents[0].role == "evader");
  CHECK(sc.agents[0].position.x == -6.0);
  CHECK(sc.agents[0].dynamics == MotionKind::HeadingLag);
  CHECK(*sc.agents[0].tau_heading == 0.14);
  CHECK(sc.agents[4].role == "asset");
  CHECK(*sc.params.beta == 1.25);
  CHECK(*sc.params.rho == 5.0);
  CHECK(*sc.params.rho_s == 7.0);
  CHECK(sc.sim.dt == 1e-3);
  CHECK(sc.sim.maxTime == 60.0);

  const std::string one = serialize_scenario(sc);
  const ScenarioFile back = parse_scenario(one);
  CHECK(back.agents.size() == sc.agents.size());
  CHECK(back.agents[2].position.y == sc.agents[2].position.y);
  CHECK(back.sim.replanEvery == sc.sim.replanEvery);
  CHECK(serialize_scenario(back) == one);

  // canonical key order is stable
  CHECK(one.find("\"schema_version\"") < one.find("\"stage\""));
  CHECK(one.find("\"stage\"") < one.find("\"agents\""));
  CHECK(one.find("\"agents\"") < one.find("\"parameters\""));
  CHECK(one.find("\"parameters\"") < one.find("\"sim\""));
}

TEST_CASE("solver inputs are assembled from the file") {
  const ScenarioFile sc = load_scenario(scenario_path("attack_baseline.json"));
  const AttackScenario game = make_attack_scenario(sc);
  CHECK(game.B.x == -6.0);
  CHECK(game.R1.y == 14.0);
  CHECK(game.R2.x == 16.0);
  CHECK(game.Rs.y == 10.0);
  CHECK(game.beta == 1.25);

  const AttackAgentSetup setup = make_attack_setup(sc);
  CHECK(setup.B.kind == MotionKind::HeadingLag);
  CHECK(setup.B.tauHeading == 0.14);
  CHECK(setup.B.commandedSpeed == 1.0);
  CHECK(setup.R1.tauHeading == 0.12);
  CHECK(setup.R2.speed == 1.25);
  CHECK(setup.BW.position.x == -7.4);

  // without a wingman the evader's own dynamics stand in
  ScenarioFile solo = sc;
  solo.agents.erase(solo.agents.begin() + 1);
  const AttackAgentSetup noWing = make_attack_setup(solo);
  CHECK(noWing.BW.position.x == -6.0);
  CHECK(noWing.BW.kind == MotionKind::HeadingLag);
}

TEST_CASE("unknown keys are rejected with their full path") {
  const std::string base = slurp(scenario_path("attack_baseline.json"));

  std::string top = base;
  top.insert(top.find("\"stage\""), "\"colour\": 3, ");
  CHECK(message_of<ParseError>(top).find("colour") != std::string::npos);

  std::string agent = base;
  agent.insert(agent.find("\"role\""), "\"callsign\": \"x\", ");
  CHECK(message_of<ParseError>(agent).find("agents[0].callsign") != std::string::npos);

  std::string params = base;
  params.insert(params.find("\"beta\""), "\"gamma\": 2.0, ");
  CHECK(message_of<ParseError>(params).find("parameters.gamma") != std::string::npos);
}

TEST_CASE("missing and malformed required fields are named") {
  CHECK(message_of<ParseError>("{}").find("schema_version") != std::string::npos);
  CHECK(message_of<ParseError>("{\"schema_version\": 1}").find("stage") != std::string::npos);
  CHECK(message_of<ParseError>("not json").find("malformed JSON") != std::string::npos);
  CHECK(message_of<ParseError>("{\"schema_version\": 2, \"stage\": \"attack\"}")
            .find("unsupported version") != std::string::npos);

  const std::string noPos =
      "{\"schema_version\": 1, \"stage\": \"attack\", \"agents\": [{\"id\": \"B\", "
      "\"role\": \"evader\"}]}";
  CHECK(message_of<ParseError>(noPos).find("agents[0].position") != std::string::npos);

  std::string badKind = slurp(scenario_path("attack_baseline.json"));
  const auto at = badKind.find("heading_lag");
  badKind.replace(at, 11, "banananana!");
  CHECK(message_of<ParseError>(badKind).find("agents[0].dynamics") != std::string::npos);
}

TEST_CASE("schema-valid but game-invalid content is named too") {
  const std::string base = slurp(scenario_path("attack_baseline.json"));

  std::string beta = base;
  beta.replace(beta.find("\"beta\": 1.25"), 12, "\"beta\": 0.9");
  CHECK(message_of<ValidationError>(beta).find("parameters.beta") != std::string::npos);

  std::string replan = base;
  replan.replace(replan.find("\"replan_every\": 1"), 17, "\"replan_every\": 0");
  CHECK(message_of<ValidationError>(replan).find("sim.replan_every") != std::string::npos);

  std::string noTau = base;
  noTau.replace(noTau.find(", \"tau_heading\": 0.14}"), 22, "}");
  CHECK(message_of<ValidationError>(noTau).find("tau_heading") != std::string::npos);

  std::string badW = slurp(scenario_path("retreat_baseline.json"));
  badW.replace(badW.find("\"w\": 0.5"), 8, "\"w\": 1.5");
  CHECK(message_of<ValidationError>(badW).find("parameters.w") != std::string::npos);
}

TEST_CASE("speed-ratio resolution") {
  Parameters p;
  p.alpha = 0.5;
  CHECK(resolve_alpha(p) == 0.5);

  p = {};
  p.v_retreat = 1.5;
  p.v_missile = 3.0;
  CHECK(resolve_alpha(p) == 0.5);

  p.alpha = 0.5;  // consistent with the speeds
  CHECK(resolve_alpha(p) == 0.5);

  p.alpha = 0.4;
  CHECK_THROWS_AS(resolve_alpha(p), ValidationError);

  p = {};
  p.alpha = 1.2;
  CHECK_THROWS_AS(resolve_alpha(p), InvalidSpeedRatio);

  p = {};
  CHECK_THROWS_AS(resolve_alpha(p), ParseError);

  p = {};
  p.v_retreat = 1.5;
  p.v_missile = 0.0;
  CHECK_THROWS_AS(resolve_alpha(p), ValidationError);
}

TEST_CASE("retreat baseline builds the hand-off game") {
  const ScenarioFile sc = load_scenario(scenario_path("retreat_baseline.json"));
  const RetreatScenario game = make_retreat_scenario(sc);
  CHECK(game.B.x == 1.70978872);
  CHECK(game.pair1.A.x == 6.34865124);
  CHECK(game.pair1.D.x == 0.30978872);  // shared defender launch point
  REQUIRE(game.pair2.has_value());
  CHECK(game.pair2->A.y == 7.80899402);
  CHECK(game.pair2->D.x == 0.30978872);
  CHECK(game.pair1.alpha == 0.5);
  CHECK(game.w == 0.5);
  REQUIRE(game.headingConstraint.has_value());
  CHECK(game.headingConstraint->hi == 3.18860107430229);

  const AgentDynamics ev = make_retreat_evader(sc);
  CHECK(ev.kind == MotionKind::SimpleMotion);
  CHECK(ev.commandedSpeed == 1.5);

  const HeadingOpt opt = optimize_heading(game);
  CHECK(opt.thetaStar == doctest::Approx(3.18860107430229).epsilon(1e-9));
  CHECK(opt.value == doctest::Approx(3.252950917).epsilon(1e-6));
}

TEST_CASE("per-attacker defenders pair by declaration order") {
  const std::string two = R"({
    "schema_version": 1,
    "stage": "retreat",
    "agents": [
      {"id": "B", "role": "evader", "position": [0, 0], "speed": 1.5},
      {"id": "A1", "role": "attacker", "position": [4, 2.4]},
      {"id": "A2", "role": "attacker", "position": [3.5, -3]},
      {"id": "D1", "role": "defender", "position": [-3, 1.2]},
      {"id": "D2", "role": "defender", "position": [-2.5, -1.8]}
    ],
    "parameters": {"alpha": 0.5, "w": 0.4}
  })";
  const RetreatScenario game = make_retreat_scenario(parse_scenario(two));
  CHECK(game.pair1.A.x == 4.0);
  CHECK(game.pair1.D.y == 1.2);
  CHECK(game.pair2->A.y == -3.0);
  CHECK(game.pair2->D.y == -1.8);

  // one defender fewer than attackers (and not shared) is malformed
  std::string bad = two;
  bad.replace(bad.find(",\n      {\"id\": \"D2\""), bad.find("]") - bad.find(",\n      {\"id\": \"D2\""), "");
  // simpler: three defenders cannot match two attackers either
  std::string three = two;
  three.insert(three.find("\n    ],"),
               ",\n      {\"id\": \"D3\", \"role\": \"defender\", \"position\": [0, -9]}");
  CHECK_THROWS_AS(parse_scenario(three), ValidationError);
}

TEST_CASE("trajectory csv is header plus time-major rows at nine digits") {
  TrajectoryLog log;
  std::ostringstream empty;
  write_trajectory_csv(log, empty);
  CHECK(empty.str() == "t,agent,x,y,heading,speed\n");

  const int a = log.add_agent("B");
  const int b = log.add_agent("R1");
  AgentDynamics d;
  d.position = {1.5, -2.25};
  d.heading = 0.7853981633974483;
  d.speed = 1.0;
  log.sample(a, 0.0, d);
  d.position = {0.123456789123, 3.0};
  log.sample(b, 0.0, d);
  d.position = {1.501, -2.249};
  log.sample(a, 0.001, d);
  log.sample(b, 0.001, d);

  std::ostringstream out;
  write_trajectory_csv(log, out);
  const auto rows = lines_of(out.str());
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "t,agent,x,y,heading,speed");
  CHECK(rows[1] == "0,B,1.5,-2.25,0.785398163,1");
  CHECK(rows[2] == "0,R1,0.123456789,3,0.785398163,1");
  CHECK(rows[3].substr(0, 7) == "0.001,B");
  CHECK(rows[4].substr(0, 8) == "0.001,R1");
}

TEST_CASE("event csv quotes the subject list") {
  TrajectoryLog log;
  log.events.push_back({0.0, "MissileLaunch", "A1,D1"});
  log.events.push_back({1.25, "Interception", "A2,D2"});
  std::ostringstream out;
  write_events_csv(log, out);
  const auto rows = lines_of(out.str());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "t,event,subjects");
  CHECK(rows[1] == "0,MissileLaunch,\"A1,D1\"");
  CHECK(rows[2] == "1.25,Interception,\"A2,D2\"");
}

TEST_CASE("nine significant digits survive a write-read cycle") {
  TrajectoryLog log;
  const int a = log.add_agent("B");
  std::vector<double> xs;
  for (int i = 0; i < 50; ++i) {
    AgentDynamics d;
    d.position = {std::sqrt(2.0) * (i + 1) * 0.37, -std::sqrt(3.0) * i};
    d.heading = 0.1 * i - 2.0;
    d.speed = 1.0 + 1e-4 * i;
    xs.push_back(d.position.x);
    log.sample(a, i * 1e-3, d);
  }
  std::ostringstream out;
  write_trajectory_csv(log, out);
  const auto rows = lines_of(out.str());
  REQUIRE(rows.size() == 51);
  for (int i = 0; i < 50; ++i) {
    const std::string& row = rows[i + 1];
    size_t p = row.find(",B,") + 3;
    const double x = std::strtod(row.c_str() + p, nullptr);
    CHECK(x == doctest::Approx(xs[i]).epsilon(1e-8));
  }
}

TEST_CASE("directory writer creates files and surfaces io failures") {
  TrajectoryLog log;
  const int a = log.add_agent("B");
  AgentDynamics d;
  log.sample(a, 0.0, d);
  log.events.push_back({0.0, "GammaReached", "B"});

  const std::string dir = std::string("/tmp/bvr_io_") + std::to_string(::getpid());
  write_trajectory(log, dir);
  CHECK(lines_of(slurp(dir + "/trajectory.csv")).size() == 2);
  CHECK(lines_of(slurp(dir + "/events.csv")).size() == 2);
  std::remove((dir + "/trajectory.csv").c_str());
  std::remove((dir + "/events.csv").c_str());
  std::remove(dir.c_str());

  CHECK_THROWS_AS(write_trajectory(log, "/proc/no_such_dir/x"), IoError);
  CHECK_THROWS_AS(load_scenario("/no/such/file.json"), IoError);
}

TEST_CASE("summary serialization keeps the fixed key set and nulls") {
  Summary s;
  s.stage = "attack";
  s.mode = "cooperative";
  s.value = 13.9870;
  s.winner = "Red";
  s.events.push_back({7.6155, "RangeReached", "B,R1"});
  s.extra.emplace_back("attack_t", 7.6155);
  s.extra.emplace_back("d1", 5.0);
  const std::string text = serialize_summary(s);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["stage"] == "attack");
  CHECK(j["mode"] == "cooperative");
  CHECK(j["value"].get<double>() == doctest::Approx(13.987));
  CHECK(j["terminal_cost"].is_null());
  CHECK(j["theta_star"].is_null());
  CHECK(j["winner"] == "Red");
  REQUIRE(j["events"].size() == 1);
  CHECK(j["events"][0]["event"] == "RangeReached");
  CHECK(j["events"][0]["subjects"] == "B,R1");
  CHECK(j["attack_t"].get<double>() == doctest::Approx(7.6155));
  CHECK(j["d1"].get<double>() == 5.0);
  // extras follow the fixed block in insertion order
  CHECK(text.find("\"attack_t\"") < text.find("\"d1\""));
}

TEST_CASE("chained baseline resolves both stages") {
  const ScenarioFile sc = load_scenario(scenario_path("chained_baseline.json"));
  CHECK(sc.stage == "chained");
  CHECK(resolve_alpha(sc.params) == 0.5);
  const AttackAgentSetup setup = make_attack_setup(sc);
  CHECK(setup.B.kind == MotionKind::HeadingSpeedLag);
  CHECK(setup.B.tauSpeed == 0.2);
  CHECK(setup.BW.kind == MotionKind::HeadingLag);
  CHECK(make_attack_scenario(sc).rho_s == 7.0);
}
