#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bvr/scenario_io.hpp"

namespace {

using namespace bvr;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Round for display so summaries diff stably across platforms.
double r9(double v) { return std::strtod(g9(v).c_str(), nullptr); }

struct CommonOpts {
  std::string scenario;
  std::string out;
  std::optional<double> dt, captureEps, w;
  std::optional<int> replanEvery;
  std::string stage;            // simulate override
  std::string pairing = "index";
  std::string grid;             // sweep spec
  unsigned seed = 0;            // reserved for sampled sweeps
  bool replanHeading = false;
};

SimConfig resolved_sim(const ScenarioFile& file, const CommonOpts& o) {
  SimConfig cfg = file.sim;
  if (o.dt) cfg.dt = *o.dt;
  if (o.captureEps) cfg.captureEps = *o.captureEps;
  if (o.replanEvery) cfg.replanEvery = *o.replanEvery;
  if (!(cfg.dt > 0.0) || !(cfg.captureEps > 0.0) || cfg.replanEvery < 1)
    throw ValidationError("sim overrides: dt and capture-eps must be > 0, replan-every >= 1");
  return cfg;
}

void emit_summary(const Summary& s, const std::string& outDir) {
  const std::string text = serialize_summary(s);
  std::cout << text;
  if (!outDir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);
    if (ec) throw IoError("cannot create output directory " + outDir + ": " + ec.message());
    std::ofstream f(outDir + "/summary.json");
    if (!f) throw IoError("cannot open " + outDir + "/summary.json for writing");
    f << text;
    if (!f) throw IoError("write failed: " + outDir + "/summary.json");
  }
}

RetreatScenario retreat_from_file(const ScenarioFile& file, const CommonOpts& o) {
  RetreatScenario rsc = make_retreat_scenario(file);
  if (o.w) rsc.w = *o.w;
  if (o.pairing == "best") rsc = best_pairing(rsc);
  validate(rsc);
  return rsc;
}

void print_bands(const RetreatScenario& rsc) {
  const auto show = [&](const char* name, const MissilePair& p) {
    try {
      const FeasibleBand b = feasible_band(p, rsc.B);
      std::cerr << name << " band: [" << g9(b.theta_l) << ", " << g9(b.theta_u) << "]\n";
    } catch (const EmptyFeasibleSet&) {
      std::cerr << name << " band: empty (no feasible heading)\n";
    }
  };
  show("pair1", rsc.pair1);
  if (rsc.pair2) show("pair2", *rsc.pair2);
  if (rsc.headingConstraint)
    std::cerr << "constraint: [" << g9(rsc.headingConstraint->lo) << ", "
              << g9(rsc.headingConstraint->hi) << "]\n";
}

int cmd_solve_attack(const CommonOpts& o) {
  const ScenarioFile file = load_scenario(o.scenario);
  const AttackScenario sc = make_attack_scenario(file);
  const AttackSolution sol = select_strategy(sc);
  Summary s;
  s.stage = "attack";
  s.mode = to_string(sol.mode);
  s.value = r9(sol.value);
  s.winner = to_string(sol.winner);
  s.theta_star = r9(sol.headingB);
  s.extra = {{"aimpoint_x", r9(sol.aimpoint.x)},
             {"aimpoint_y", r9(sol.aimpoint.y)},
             {"heading_r1", r9(sol.heading1)},
             {"heading_r2", r9(sol.heading2)}};
  emit_summary(s, o.out);
  return 0;
}

int cmd_solve_retreat(const CommonOpts& o) {
  const ScenarioFile file = load_scenario(o.scenario);
  const RetreatScenario rsc = retreat_from_file(file, o);
  HeadingOpt opt;
  try {
    opt = optimize_heading(rsc);
  } catch (const EmptyFeasibleSet&) {
    print_bands(rsc);
    throw;
  }
  Summary s;
  s.stage = "retreat";
  s.value = r9(opt.value);
  s.theta_star = r9(opt.thetaStar);
  const FeasibleBand b1 = feasible_band(rsc.pair1, rsc.B);
  const AngularInterval adm = admissible_interval(rsc);
  s.extra = {{"admissible_lo", r9(adm.lo)},
             {"admissible_hi", r9(adm.hi)},
             {"band1_lo", r9(b1.theta_l)},
             {"band1_hi", r9(b1.theta_u)},
             {"constraint_active", opt.constraintActive ? 1.0 : 0.0},
             {"pair1_value", r9(pair_game_solve(rsc.pair1, rsc.B, opt.thetaStar).value)}};
  if (rsc.pair2) {
    const FeasibleBand b2 = feasible_band(*rsc.pair2, rsc.B);
    s.extra.push_back({"band2_lo", r9(b2.theta_l)});
    s.extra.push_back({"band2_hi", r9(b2.theta_u)});
    s.extra.push_back({"pair2_value", r9(pair_game_solve(*rsc.pair2, rsc.B, opt.thetaStar).value)});
  }
  emit_summary(s, o.out);
  return 0;
}

void merge_shifted(TrajectoryLog& into, const TrajectoryLog& from, double t0) {
  for (size_t a = 0; a < from.agents.size(); ++a) {
    int idx = -1;
    for (size_t k = 0; k < into.agents.size(); ++k)
      if (into.agents[k] == from.agents[a]) { idx = static_cast<int>(k); break; }
    if (idx < 0) idx = into.add_agent(from.agents[a]);
    for (StateSample s : from.series[a]) {
      s.t += t0;
      into.series[idx].push_back(s);
    }
  }
  for (SimEvent e : from.events) {
    e.t += t0;
    into.events.push_back(e);
  }
}

int cmd_simulate(const CommonOpts& o) {
  const ScenarioFile file = load_scenario(o.scenario);
  const std::string stage = o.stage.empty() ? file.stage : o.stage;
  const SimConfig cfg = resolved_sim(file, o);
  TrajectoryLog log;
  Summary s;
  s.stage = stage;

  if (stage == "attack" || stage == "chained") {
    const AttackScenario asc = make_attack_scenario(file);
    const AttackAgentSetup setup = make_attack_setup(file);
    const AttackTerminal term = run_attack_stage(asc, setup, cfg, &log);
    s.value = r9(term.J);
    s.winner = to_string(term.winner);
    s.theta_star = r9(term.headingB);
    s.extra = {{"attack_t", r9(term.t)}, {"d1", r9(term.d1)}, {"d2", r9(term.d2)},
               {"dt", r9(cfg.dt)}};
    if (stage == "chained") {
      if (!file.params.v_retreat || !file.params.v_missile)
        throw ValidationError("parameters: v_retreat and v_missile are required for --stage chained");
      const double w = o.w ? *o.w : file.params.w.value_or(0.5);
      RetreatScenario rsc = spawn_retreat(term, term.BW, *file.params.v_retreat,
                                          *file.params.v_missile, w,
                                          file.params.heading_constraint, cfg.captureEps);
      if (o.pairing == "best") rsc = best_pairing(rsc);
      log.events.push_back({term.t, "StageTransition", "B"});
      AgentDynamics evader = make_retreat_evader(file);
      evader.heading = evader.commandedHeading = term.headingB;
      evader.speed = term.speedB;
      TrajectoryLog rlog;
      RetreatOutcome ro;
      try {
        ro = run_retreat_stage(rsc, evader, *file.params.v_missile, cfg, &rlog,
                               o.replanHeading);
      } catch (const EmptyFeasibleSet&) {
        print_bands(rsc);
        throw;
      }
      merge_shifted(log, rlog, term.t);
      s.terminal_cost = r9(ro.Jc);
      s.winner = ro.winner == Winner::Blue ? "Blue" : "Red";
      s.theta_star = r9(ro.thetaStar);
      s.extra.push_back({"planned_jc", r9(ro.plannedValue)});
      s.extra.push_back({"constraint_active", ro.constraintActive ? 1.0 : 0.0});
      s.extra.push_back({"t1", r9(ro.t1)});
      s.extra.push_back({"t2", r9(ro.t2)});
      s.extra.push_back({"jc", r9(ro.Jc)});
    } else {
      s.terminal_cost = r9(term.J);
    }
  } else if (stage == "retreat") {
    RetreatScenario rsc = retreat_from_file(file, o);
    if (!file.params.v_missile)
      throw ValidationError("parameters.v_missile: required to simulate the retreat stage");
    RetreatOutcome ro;
    try {
      ro = run_retreat_stage(rsc, make_retreat_evader(file), *file.params.v_missile, cfg, &log,
                             o.replanHeading);
    } catch (const EmptyFeasibleSet&) {
      print_bands(rsc);
      throw;
    }
    s.value = r9(ro.Jc);
    s.terminal_cost = r9(ro.Jc);
    s.winner = ro.winner == Winner::Blue ? "Blue" : "Red";
    s.theta_star = r9(ro.thetaStar);
    s.extra = {{"planned_jc", r9(ro.plannedValue)},
               {"constraint_active", ro.constraintActive ? 1.0 : 0.0},
               {"t1", r9(ro.t1)},
               {"t2", r9(ro.t2)},
               {"dt", r9(cfg.dt)}};
  } else {
    throw ValidationError("--stage: expected attack | retreat | chained, got '" + stage + "'");
  }

  s.events = log.events;
  if (!o.out.empty()) write_trajectory(log, o.out);
  emit_summary(s, o.out);
  return 0;
}

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

std::vector<GridAxis> parse_grid(const std::string& spec) {
  static const char* allowed[] = {"beta", "alpha", "rho", "rho_s", "w", "Bx", "By"};
  std::vector<GridAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      throw ParseError("--grid: expected name=lo:hi:n, got '" + part + "'");
    GridAxis ax;
    ax.name = part.substr(0, eq);
    bool ok = false;
    for (const char* a : allowed)
      if (ax.name == a) { ok = true; break; }
    if (!ok) throw ParseError("--grid: unknown parameter '" + ax.name + "'");
    const std::string rest = part.substr(eq + 1);
    double lo, hi;
    long n;
    char c1, c2;
    std::stringstream rs(rest);
    if (!(rs >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 ||
        !(rs >> std::ws).eof())
      throw ParseError("--grid: expected lo:hi:n after '" + ax.name + "=', got '" + rest + "'");
    for (long i = 0; i < n; ++i)
      ax.values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
    axes.push_back(std::move(ax));
  }
  if (axes.empty()) throw ParseError("--grid: empty grid specification");
  return axes;
}

void apply_axis(ScenarioFile& file, const std::string& name, double v) {
  if (name == "beta") file.params.beta = v;
  else if (name == "alpha") file.params.alpha = v;
  else if (name == "rho") file.params.rho = v;
  else if (name == "rho_s") file.params.rho_s = v;
  else if (name == "w") file.params.w = v;
  else {
    for (auto& a : file.agents)
      if (a.role == "evader") {
        if (name == "Bx") a.position.x = v;
        else a.position.y = v;
        return;
      }
    throw ValidationError("--grid: no evader agent to move");
  }
}

int cmd_sweep(const CommonOpts& o) {
  const ScenarioFile base = load_scenario(o.scenario);
  const std::vector<GridAxis> axes = parse_grid(o.grid);

  size_t total = 1;
  for (const auto& ax : axes) total *= ax.values.size();

  struct Row {
    std::vector<double> coords;
    std::string mode, winner, error;
    std::optional<double> value;
  };
  std::vector<Row> rows(total);

  const auto eval_point = [&](size_t idx) {
    Row& row = rows[idx];
    size_t rem = idx;
    row.coords.resize(axes.size());
    for (size_t a = axes.size(); a-- > 0;) {
      row.coords[a] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
    }
    try {
      ScenarioFile file = base;
      for (size_t a = 0; a < axes.size(); ++a) apply_axis(file, axes[a].name, row.coords[a]);
      if (file.stage == "retreat") {
        const RetreatScenario rsc = retreat_from_file(file, o);
        const HeadingOpt opt = optimize_heading(rsc);
        row.mode = "Retreat";
        row.value = opt.value;
      } else {
        const AttackSolution sol = select_strategy(make_attack_scenario(file));
        row.mode = to_string(sol.mode);
        row.value = sol.value;
        row.winner = to_string(sol.winner);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const size_t nThreads = std::max<size_t>(1, std::min<size_t>(
      total, std::thread::hardware_concurrency() ? std::thread::hardware_concurrency() : 4));
  std::vector<std::future<void>> futs;
  for (size_t tIdx = 0; tIdx < nThreads; ++tIdx)
    futs.push_back(std::async(std::launch::async, [&, tIdx] {
      for (size_t i = tIdx; i < total; i += nThreads) eval_point(i);
    }));
  for (auto& f : futs) f.get();

  std::ostringstream out;
  for (const auto& ax : axes) out << ax.name << ',';
  out << "mode,value,winner,error\n";
  for (const Row& row : rows) {
    for (double c : row.coords) out << g9(c) << ',';
    std::string err = row.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
    out << row.mode << ',' << (row.value ? g9(*row.value) : "") << ',' << row.winner << ','
        << err << '\n';
  }
  std::cout << out.str();
  if (!o.out.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create output directory " + o.out + ": " + ec.message());
    std::ofstream f(o.out + "/sweep.csv");
    if (!f) throw IoError("cannot open " + o.out + "/sweep.csv for writing");
    f << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage pursuit-evasion solver and engagement simulator"};
  app.require_subcommand(1);
  CommonOpts o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON path")->required();
    sub->add_option("--out", o.out, "Output directory");
  };

  CLI::App* solveAttack = app.add_subcommand("solve-attack", "Solve the attack-stage game");
  add_common(solveAttack);

  CLI::App* solveRetreat = app.add_subcommand("solve-retreat", "Solve the retreat-stage game");
  add_common(solveRetreat);
  solveRetreat->add_option("--w", o.w, "Composite weight on pair 1");
  solveRetreat->add_option("--pairing", o.pairing, "Defender-attacker pairing: index | best")
      ->check(CLI::IsMember({"index", "best"}));

  CLI::App* simulate = app.add_subcommand("simulate", "Run the closed-loop engagement");
  add_common(simulate);
  simulate->add_option("--dt", o.dt, "Integration step override");
  simulate->add_option("--capture-eps", o.captureEps, "Point-capture tolerance override");
  simulate->add_option("--replan-every", o.replanEvery, "Steps between guidance updates");
  simulate->add_option("--stage", o.stage, "Stage override: attack | retreat | chained")
      ->check(CLI::IsMember({"attack", "retreat", "chained"}));
  simulate->add_option("--w", o.w, "Composite weight on pair 1");
  simulate->add_option("--pairing", o.pairing, "Defender-attacker pairing: index | best")
      ->check(CLI::IsMember({"index", "best"}));
  simulate->add_flag("--replan-heading", o.replanHeading,
                     "Re-solve the retreat heading each replan interval (experimental)");

  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate a parameter grid");
  add_common(sweep);
  sweep->add_option("--grid", o.grid, "Axes, e.g. rho_s=10:16:25,beta=1.1:1.4:4")->required();
  sweep->add_option("--w", o.w, "Composite weight on pair 1");
  sweep->add_option("--seed", o.seed, "Reserved for sampled sweeps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solveAttack->parsed()) return cmd_solve_attack(o);
    if (solveRetreat->parsed()) return cmd_solve_retreat(o);
    if (simulate->parsed()) return cmd_simulate(o);
    return cmd_sweep(o);
  } catch (const bvr::EmptyFeasibleSet& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const bvr::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bvr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bvr::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bvr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
