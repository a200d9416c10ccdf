#include "bvr/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace bvr {

namespace {

using ojson = nlohmann::ordered_json;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void expect_keys(const ojson& o, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : o.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) { ok = true; break; }
    if (!ok) throw ParseError("unknown key: " + (path.empty() ? k : path + "." + k));
  }
}

const ojson* get(const ojson& o, const char* key) {
  auto it = o.find(key);
  return it == o.end() ? nullptr : &*it;
}

double as_number(const ojson& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

std::string as_string(const ojson& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a string");
  return v.get<std::string>();
}

Point2 as_point(const ojson& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2)
    throw ParseError(path + ": expected a 2-element [x, y] array");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

MotionKind kind_from_string(const std::string& s, const std::string& path) {
  if (s == "simple") return MotionKind::SimpleMotion;
  if (s == "heading_lag") return MotionKind::HeadingLag;
  if (s == "heading_speed_lag") return MotionKind::HeadingSpeedLag;
  throw ParseError(path + ": unknown dynamics kind '" + s +
                   "' (expected simple | heading_lag | heading_speed_lag)");
}

const char* kind_to_string(MotionKind k) {
  switch (k) {
    case MotionKind::SimpleMotion: return "simple";
    case MotionKind::HeadingLag: return "heading_lag";
    case MotionKind::HeadingSpeedLag: return "heading_speed_lag";
  }
  return "simple";
}

bool known_role(const std::string& r) {
  return r == "evader" || r == "interceptor" || r == "wingman" || r == "asset" ||
         r == "attacker" || r == "defender";
}

std::vector<const AgentSpec*> all_with_role(const ScenarioFile& sc, const std::string& role) {
  std::vector<const AgentSpec*> out;
  for (const auto& a : sc.agents)
    if (a.role == role) out.push_back(&a);
  return out;
}

void require_role_count(const ScenarioFile& sc, const std::string& role, size_t lo, size_t hi) {
  const size_t n = all_with_role(sc, role).size();
  if (n < lo || n > hi) {
    std::string want = lo == hi ? "exactly " + std::to_string(lo)
                                : std::to_string(lo) + ".." + std::to_string(hi);
    throw ValidationError("stage " + sc.stage + ": requires " + want + " agent(s) with role " +
                          role + " (found " + std::to_string(n) + ")");
  }
}

void validate_file(const ScenarioFile& sc) {
  for (size_t i = 0; i < sc.agents.size(); ++i)
    for (size_t j = i + 1; j < sc.agents.size(); ++j)
      if (sc.agents[i].id == sc.agents[j].id)
        throw ValidationError("duplicate agent id '" + sc.agents[i].id + "'");

  for (const auto& a : sc.agents) {
    const std::string where = "agent '" + a.id + "'";
    if (a.speed < 0.0) throw ValidationError(where + ": speed must be >= 0");
    if (a.dynamics != MotionKind::SimpleMotion) {
      if (!a.tau_heading || !(*a.tau_heading > 0.0))
        throw ValidationError(where + ": lag dynamics require tau_heading > 0");
      if (a.dynamics == MotionKind::HeadingSpeedLag && (!a.tau_speed || !(*a.tau_speed > 0.0)))
        throw ValidationError(where + ": heading_speed_lag requires tau_speed > 0");
    }
  }

  if (!(sc.sim.dt > 0.0)) throw ValidationError("sim.dt: must be > 0");
  if (!(sc.sim.captureEps > 0.0)) throw ValidationError("sim.capture_eps: must be > 0");
  if (sc.sim.replanEvery < 1) throw ValidationError("sim.replan_every: must be >= 1");
  if (!(sc.sim.maxTime > 0.0)) throw ValidationError("sim.max_time: must be > 0");

  const Parameters& p = sc.params;
  if (p.w && !(*p.w >= 0.0 && *p.w <= 1.0))
    throw ValidationError("parameters.w: must lie in [0, 1]");
  if (p.heading_constraint && !(p.heading_constraint->hi >= p.heading_constraint->lo))
    throw ValidationError("parameters.heading_constraint: interval is reversed");

  if (sc.stage == "attack" || sc.stage == "chained") {
    require_role_count(sc, "evader", 1, 1);
    require_role_count(sc, "interceptor", 2, 2);
    require_role_count(sc, "asset", 1, 1);
    if (sc.stage == "chained") require_role_count(sc, "wingman", 1, 1);
    if (!p.beta) throw ParseError("parameters.beta: missing required field");
    if (!p.rho || !p.rho_s)
      throw ParseError("parameters: rho and rho_s are required for the attack stage");
    if (!(*p.beta > 1.0))
      throw ValidationError("parameters.beta: must be > 1 (got " + g9(*p.beta) + ")");
    if (!(*p.rho > 0.0) || !(*p.rho_s > 0.0))
      throw ValidationError("parameters: rho and rho_s must be > 0");
    // Mirrors the solver's scenario check so a file is rejected with a
    // path-qualified message instead of a downstream solver error.
    make_attack_scenario(sc);
  } else if (sc.stage == "retreat") {
    require_role_count(sc, "evader", 1, 1);
    require_role_count(sc, "attacker", 1, 2);
    const size_t na = all_with_role(sc, "attacker").size();
    const size_t nd = all_with_role(sc, "defender").size();
    if (nd != 1 && nd != na)
      throw ValidationError(
          "stage retreat: defender count must be 1 (shared launch point) or match the attacker "
          "count (found " + std::to_string(nd) + ")");
    make_retreat_scenario(sc);
  }
  if (sc.stage == "chained") resolve_alpha(p);
}

AgentDynamics dyn_from_spec(const AgentSpec& s) {
  AgentDynamics a;
  a.kind = s.dynamics;
  a.tauHeading = s.tau_heading.value_or(0.0);
  a.tauSpeed = s.tau_speed.value_or(0.0);
  a.position = s.position;
  a.heading = a.commandedHeading = s.heading;
  a.speed = a.commandedSpeed = s.speed;
  return a;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level: expected an object");
  expect_keys(j, "", {"schema_version", "stage", "agents", "parameters", "sim"});

  ScenarioFile sc;
  const ojson* ver = get(j, "schema_version");
  if (!ver) throw ParseError("schema_version: missing required field");
  if (!ver->is_number_integer()) throw ParseError("schema_version: expected an integer");
  sc.schema_version = ver->get<int>();
  if (sc.schema_version != 1)
    throw ParseError("schema_version: unsupported version " +
                     std::to_string(sc.schema_version) + " (expected 1)");

  const ojson* stage = get(j, "stage");
  if (!stage) throw ParseError("stage: missing required field");
  sc.stage = as_string(*stage, "stage");
  if (sc.stage != "attack" && sc.stage != "retreat" && sc.stage != "chained")
    throw ParseError("stage: unknown stage '" + sc.stage +
                     "' (expected attack | retreat | chained)");

  const ojson* agents = get(j, "agents");
  if (!agents || !agents->is_array()) throw ParseError("agents: expected an array");
  for (size_t i = 0; i < agents->size(); ++i) {
    const ojson& a = (*agents)[i];
    const std::string path = "agents[" + std::to_string(i) + "]";
    if (!a.is_object()) throw ParseError(path + ": expected an object");
    expect_keys(a, path, {"id", "role", "position", "speed", "heading", "dynamics",
                          "tau_heading", "tau_speed"});
    AgentSpec spec;
    const ojson* id = get(a, "id");
    if (!id) throw ParseError(path + ".id: missing required field");
    spec.id = as_string(*id, path + ".id");
    const ojson* role = get(a, "role");
    if (!role) throw ParseError(path + ".role: missing required field");
    spec.role = as_string(*role, path + ".role");
    if (!known_role(spec.role)) throw ParseError(path + ".role: unknown role '" + spec.role + "'");
    const ojson* pos = get(a, "position");
    if (!pos) throw ParseError(path + ".position: missing required field");
    spec.position = as_point(*pos, path + ".position");
    if (const ojson* v = get(a, "speed")) spec.speed = as_number(*v, path + ".speed");
    if (const ojson* v = get(a, "heading")) spec.heading = as_number(*v, path + ".heading");
    if (const ojson* v = get(a, "dynamics"))
      spec.dynamics = kind_from_string(as_string(*v, path + ".dynamics"), path + ".dynamics");
    if (const ojson* v = get(a, "tau_heading"))
      spec.tau_heading = as_number(*v, path + ".tau_heading");
    if (const ojson* v = get(a, "tau_speed")) spec.tau_speed = as_number(*v, path + ".tau_speed");
    sc.agents.push_back(std::move(spec));
  }

  if (const ojson* p = get(j, "parameters")) {
    if (!p->is_object()) throw ParseError("parameters: expected an object");
    expect_keys(*p, "parameters",
                {"beta", "rho", "rho_s", "alpha", "w", "v_retreat", "v_missile",
                 "heading_constraint"});
    auto opt = [&](const char* key) -> std::optional<double> {
      if (const ojson* v = get(*p, key))
        return as_number(*v, std::string("parameters.") + key);
      return std::nullopt;
    };
    sc.params.beta = opt("beta");
    sc.params.rho = opt("rho");
    sc.params.rho_s = opt("rho_s");
    sc.params.alpha = opt("alpha");
    sc.params.w = opt("w");
    sc.params.v_retreat = opt("v_retreat");
    sc.params.v_missile = opt("v_missile");
    if (const ojson* v = get(*p, "heading_constraint")) {
      const Point2 iv = as_point(*v, "parameters.heading_constraint");
      sc.params.heading_constraint = AngularInterval{iv.x, iv.y};
    }
  }

  if (const ojson* s = get(j, "sim")) {
    if (!s->is_object()) throw ParseError("sim: expected an object");
    expect_keys(*s, "sim", {"dt", "capture_eps", "replan_every", "max_time"});
    if (const ojson* v = get(*s, "dt")) sc.sim.dt = as_number(*v, "sim.dt");
    if (const ojson* v = get(*s, "capture_eps"))
      sc.sim.captureEps = as_number(*v, "sim.capture_eps");
    if (const ojson* v = get(*s, "replan_every")) {
      if (!v->is_number_integer()) throw ParseError("sim.replan_every: expected an integer");
      sc.sim.replanEvery = v->get<int>();
    }
    if (const ojson* v = get(*s, "max_time")) sc.sim.maxTime = as_number(*v, "sim.max_time");
  }

  validate_file(sc);
  return sc;
}

std::string serialize_scenario(const ScenarioFile& sc) {
  ojson j;
  j["schema_version"] = sc.schema_version;
  j["stage"] = sc.stage;
  ojson agents = ojson::array();
  for (const auto& a : sc.agents) {
    ojson o;
    o["id"] = a.id;
    o["role"] = a.role;
    o["position"] = {a.position.x, a.position.y};
    o["speed"] = a.speed;
    o["heading"] = a.heading;
    o["dynamics"] = kind_to_string(a.dynamics);
    if (a.tau_heading) o["tau_heading"] = *a.tau_heading;
    if (a.tau_speed) o["tau_speed"] = *a.tau_speed;
    agents.push_back(std::move(o));
  }
  j["agents"] = std::move(agents);
  ojson p;
  if (sc.params.beta) p["beta"] = *sc.params.beta;
  if (sc.params.rho) p["rho"] = *sc.params.rho;
  if (sc.params.rho_s) p["rho_s"] = *sc.params.rho_s;
  if (sc.params.alpha) p["alpha"] = *sc.params.alpha;
  if (sc.params.w) p["w"] = *sc.params.w;
  if (sc.params.v_retreat) p["v_retreat"] = *sc.params.v_retreat;
  if (sc.params.v_missile) p["v_missile"] = *sc.params.v_missile;
  if (sc.params.heading_constraint)
    p["heading_constraint"] = {sc.params.heading_constraint->lo, sc.params.heading_constraint->hi};
  if (!p.empty()) j["parameters"] = std::move(p);
  ojson s;
  s["dt"] = sc.sim.dt;
  s["capture_eps"] = sc.sim.captureEps;
  s["replan_every"] = sc.sim.replanEvery;
  s["max_time"] = sc.sim.maxTime;
  j["sim"] = std::move(s);
  return j.dump(2) + "\n";
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

double resolve_alpha(const Parameters& p) {
  std::optional<double> fromSpeeds;
  if (p.v_retreat && p.v_missile) {
    if (!(*p.v_missile > 0.0)) throw ValidationError("parameters.v_missile: must be > 0");
    fromSpeeds = *p.v_retreat / *p.v_missile;
  }
  double alpha;
  if (p.alpha) {
    alpha = *p.alpha;
    if (fromSpeeds && std::abs(alpha - *fromSpeeds) > 1e-9)
      throw ValidationError("parameters.alpha: inconsistent with v_retreat / v_missile (" +
                            g9(alpha) + " vs " + g9(*fromSpeeds) + ")");
  } else if (fromSpeeds) {
    alpha = *fromSpeeds;
  } else {
    throw ParseError("parameters: need alpha or the v_retreat / v_missile pair");
  }
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidSpeedRatio("parameters.alpha: must lie in (0, 1), got " + g9(alpha));
  return alpha;
}

const AgentSpec* find_role(const ScenarioFile& sc, const std::string& role) {
  for (const auto& a : sc.agents)
    if (a.role == role) return &a;
  return nullptr;
}

AttackScenario make_attack_scenario(const ScenarioFile& sc) {
  const auto ev = all_with_role(sc, "evader");
  const auto rs = all_with_role(sc, "interceptor");
  const auto as = all_with_role(sc, "asset");
  if (ev.size() != 1 || rs.size() != 2 || as.size() != 1)
    throw ValidationError("attack stage needs one evader, two interceptors, one asset");
  if (!sc.params.beta || !sc.params.rho || !sc.params.rho_s)
    throw ValidationError("attack stage needs parameters beta, rho, rho_s");
  AttackScenario out;
  out.B = ev[0]->position;
  out.R1 = rs[0]->position;
  out.R2 = rs[1]->position;
  out.Rs = as[0]->position;
  out.beta = *sc.params.beta;
  out.rho = *sc.params.rho;
  out.rho_s = *sc.params.rho_s;
  validate(out);
  return out;
}

AttackAgentSetup make_attack_setup(const ScenarioFile& sc) {
  const AgentSpec* ev = find_role(sc, "evader");
  const auto rs = all_with_role(sc, "interceptor");
  if (!ev || rs.size() != 2)
    throw ValidationError("attack stage needs one evader and two interceptors");
  AttackAgentSetup setup;
  setup.B = dyn_from_spec(*ev);
  setup.R1 = dyn_from_spec(*rs[0]);
  setup.R2 = dyn_from_spec(*rs[1]);
  const AgentSpec* w = find_role(sc, "wingman");
  setup.BW = w ? dyn_from_spec(*w) : setup.B;
  return setup;
}

RetreatScenario make_retreat_scenario(const ScenarioFile& sc) {
  const AgentSpec* ev = find_role(sc, "evader");
  const auto as = all_with_role(sc, "attacker");
  const auto ds = all_with_role(sc, "defender");
  if (!ev || as.empty() || as.size() > 2 || ds.empty())
    throw ValidationError("retreat stage needs one evader, 1..2 attackers, and defender(s)");
  const double alpha = resolve_alpha(sc.params);
  RetreatScenario out;
  out.B = ev->position;
  out.w = sc.params.w.value_or(0.5);
  out.headingConstraint = sc.params.heading_constraint;
  out.pair1 = MissilePair{as[0]->position, ds[0]->position, alpha};
  if (as.size() == 2)
    out.pair2 = MissilePair{as[1]->position, (ds.size() == 2 ? ds[1] : ds[0])->position, alpha};
  validate(out);
  return out;
}

AgentDynamics make_retreat_evader(const ScenarioFile& sc) {
  const AgentSpec* ev = find_role(sc, "evader");
  if (!ev) throw ValidationError("retreat stage needs an evader agent");
  AgentDynamics dyn = dyn_from_spec(*ev);
  if (sc.params.v_retreat) dyn.commandedSpeed = *sc.params.v_retreat;
  return dyn;
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t,agent,x,y,heading,speed\n";
  size_t maxLen = 0;
  for (const auto& s : log.series) maxLen = std::max(maxLen, s.size());
  for (size_t k = 0; k < maxLen; ++k)
    for (size_t a = 0; a < log.series.size(); ++a) {
      if (k >= log.series[a].size()) continue;
      const StateSample& s = log.series[a][k];
      out << g9(s.t) << ',' << log.agents[a] << ',' << g9(s.position.x) << ','
          << g9(s.position.y) << ',' << g9(s.heading) << ',' << g9(s.speed) << '\n';
    }
  if (!out) throw IoError("trajectory sink: write failed");
}

void write_events_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t,event,subjects\n";
  for (const SimEvent& e : log.events)
    out << g9(e.t) << ',' << e.kind << ",\"" << e.subjects << "\"\n";
  if (!out) throw IoError("event sink: write failed");
}

void write_trajectory(const TrajectoryLog& log, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  std::ofstream traj(dir + "/trajectory.csv");
  if (!traj) throw IoError("cannot open " + dir + "/trajectory.csv for writing");
  write_trajectory_csv(log, traj);
  std::ofstream ev(dir + "/events.csv");
  if (!ev) throw IoError("cannot open " + dir + "/events.csv for writing");
  write_events_csv(log, ev);
}

std::string serialize_summary(const Summary& s) {
  ojson j;
  j["stage"] = s.stage;
  j["mode"] = s.mode ? ojson(*s.mode) : ojson(nullptr);
  j["value"] = s.value ? ojson(*s.value) : ojson(nullptr);
  j["terminal_cost"] = s.terminal_cost ? ojson(*s.terminal_cost) : ojson(nullptr);
  j["winner"] = s.winner ? ojson(*s.winner) : ojson(nullptr);
  j["theta_star"] = s.theta_star ? ojson(*s.theta_star) : ojson(nullptr);
  ojson evs = ojson::array();
  for (const SimEvent& e : s.events) {
    ojson o;
    o["t"] = e.t;
    o["event"] = e.kind;
    o["subjects"] = e.subjects;
    evs.push_back(std::move(o));
  }
  j["events"] = std::move(evs);
  for (const auto& [k, v] : s.extra) j[k] = v;
  return j.dump(2) + "\n";
}

}  // namespace bvr
