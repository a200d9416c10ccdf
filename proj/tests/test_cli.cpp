#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string tmp_root() {
  static const std::string dir = [] {
    std::string d = "/tmp/bvr_cli_" + std::to_string(::getpid());
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

CliResult run_cli(const std::string& args) {
  static int serial = 0;
  const std::string o = tmp_root() + "/out" + std::to_string(serial);
  const std::string e = tmp_root() + "/err" + std::to_string(serial);
  ++serial;
  const std::string cmd =
      std::string("\"") + BVRSOLVE_PATH + "\" " + args + " >" + o + " 2>" + e;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string scenario(const char* name) { return std::string(SCENARIO_DIR) + "/" + name; }

const std::string kTwoPairRetreat = R"({
  "schema_version": 1,
  "stage": "retreat",
  "agents": [
    {"id": "B", "role": "evader", "position": [0, 0], "speed": 1.5},
    {"id": "A1", "role": "attacker", "position": [4, 2.4]},
    {"id": "A2", "role": "attacker", "position": [3.5, -3]},
    {"id": "D1", "role": "defender", "position": [-3, 1.2]},
    {"id": "D2", "role": "defender", "position": [-2.5, -1.8]}
  ],
  "parameters": {"alpha": 0.5, "v_missile": 3.0, "v_retreat": 1.5}
})";

}  // namespace

TEST_CASE("attack solve on the shipped baseline") {
  const std::string out = tmp_root() + "/attack_base";
  const CliResult r =
      run_cli("solve-attack --scenario " + scenario("attack_baseline.json") + " --out " + out);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["stage"] == "attack");
  CHECK(j["mode"] == "Cooperative");
  CHECK(std::fabs(j["value"].get<double>() - 13.986992569) < 1e-6);
  CHECK(std::fabs(j["value"].get<double>() - 13.9870) < 1e-3);
  CHECK(j["winner"] == "Red");
  CHECK(std::fabs(j["theta_star"].get<double>() - 0.052200227) < 1e-6);
  CHECK(std::fabs(j["aimpoint_x"].get<double>() - 1.605127734) < 1e-6);
  CHECK(std::fabs(j["aimpoint_y"].get<double>() - 8.397350365) < 1e-6);
  CHECK(j.contains("heading_r1"));
  // the --out copy matches stdout byte for byte
  CHECK(slurp(out + "/summary.json") == r.out);
}

TEST_CASE("attack solve on a mirror-symmetric spread") {
  const std::string path = tmp_root() + "/sym.json";
  write_file(path, R"({
    "schema_version": 1,
    "stage": "attack",
    "agents": [
      {"id": "B", "role": "evader", "position": [0, 0], "speed": 1.0},
      {"id": "R1", "role": "interceptor", "position": [8, 3], "speed": 1.25},
      {"id": "R2", "role": "interceptor", "position": [8, -3], "speed": 1.25},
      {"id": "Rs", "role": "asset", "position": [10, 0]}
    ],
    "parameters": {"beta": 1.25, "rho": 2.0, "rho_s": 3.0}
  })");
  const CliResult r = run_cli("solve-attack --scenario " + path);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["mode"] == "Cooperative");
  CHECK(std::fabs(j["theta_star"].get<double>()) < 1e-9);
  CHECK(std::fabs(j["aimpoint_y"].get<double>()) < 1e-9);
  CHECK(std::fabs(j["aimpoint_x"].get<double>() - 3.038427461) < 1e-6);
}

TEST_CASE("attack solve falls back to solo play when the ovals separate") {
  std::string text = slurp(scenario("attack_baseline.json"));
  const std::string needle = "\"position\": [16.0, 6.5]";
  const auto at = text.find(needle);
  REQUIRE(at != std::string::npos);
  text.replace(at, needle.size(), "\"position\": [60.0, -40.0]");
  const std::string path = tmp_root() + "/far.json";
  write_file(path, text);
  const CliResult r = run_cli("solve-attack --scenario " + path);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["mode"] == "Solo1");
  CHECK(std::fabs(j["value"].get<double>() - 13.951304972) < 1e-6);
}

TEST_CASE("retreat solve on the shipped hand-off state") {
  const CliResult r =
      run_cli("solve-retreat --scenario " + scenario("retreat_baseline.json"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["stage"] == "retreat");
  const double th = j["theta_star"].get<double>();
  CHECK(std::fabs(th - 3.188601074) < 1e-6);
  CHECK(std::fabs(th - 3.1956) < 1e-2);
  CHECK(j["constraint_active"].get<double>() == 1.0);
  CHECK(std::fabs(j["value"].get<double>() - 3.2442) < 1e-2);
  CHECK(std::fabs(j["admissible_hi"].get<double>() - 3.188601074) < 1e-6);
  CHECK(j["band1_lo"].get<double>() < j["band1_hi"].get<double>());
  CHECK(std::fabs(j["pair1_value"].get<double>() - 3.080926717) < 1e-6);
  CHECK(j["pair2_value"].get<double>() > 0.0);
}

TEST_CASE("retreat solve reports the bands when nothing is feasible") {
  const std::string path = tmp_root() + "/walled.json";
  write_file(path, R"({
    "schema_version": 1,
    "stage": "retreat",
    "agents": [
      {"id": "B", "role": "evader", "position": [0, 0], "speed": 1.5},
      {"id": "A1", "role": "attacker", "position": [10, 0]},
      {"id": "D1", "role": "defender", "position": [4, 0]}
    ],
    "parameters": {"alpha": 0.5}
  })");
  const CliResult r = run_cli("solve-retreat --scenario " + path);
  CHECK(r.code == 4);
  CHECK(r.err.find("band") != std::string::npos);
  CHECK(r.err.find("empty") != std::string::npos);
}

TEST_CASE("composite weight pulls the heading toward the heavier pair") {
  const std::string path = tmp_root() + "/twopair.json";
  write_file(path, kTwoPairRetreat);
  const CliResult lo = run_cli("solve-retreat --scenario " + path + " --w 0.25");
  const CliResult hi = run_cli("solve-retreat --scenario " + path + " --w 0.75");
  REQUIRE(lo.code == 0);
  REQUIRE(hi.code == 0);
  const double thLo = json::parse(lo.out)["theta_star"].get<double>();
  const double thHi = json::parse(hi.out)["theta_star"].get<double>();
  CHECK(std::fabs(thLo - 3.065554722) < 1e-6);
  CHECK(std::fabs(thHi - 3.370079888) < 1e-6);
  CHECK(thHi > thLo);  // pair 1 alone prefers ~3.51, pair 2 alone ~2.93
}

TEST_CASE("chained simulation runs both stages end to end") {
  const std::string out = tmp_root() + "/chain";
  const CliResult r =
      run_cli("simulate --scenario " + scenario("chained_baseline.json") + " --out " + out);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["stage"] == "chained");
  CHECK(std::fabs(j["value"].get<double>() - 13.887794304) < 1e-6);
  CHECK(std::fabs(j["value"].get<double>() - 13.9052) < 0.05);
  CHECK(std::fabs(j["terminal_cost"].get<double>() - 2.947081) < 1e-6);
  CHECK(std::fabs(j["terminal_cost"].get<double>() - 2.9308) < 0.06);
  CHECK(j["winner"] == "Blue");
  CHECK(std::fabs(j["theta_star"].get<double>() - 3.188601074) < 1e-6);
  CHECK(j["constraint_active"].get<double>() == 1.0);
  CHECK(std::fabs(j["planned_jc"].get<double>() - 3.252950918) < 1e-6);
  CHECK(std::fabs(j["attack_t"].get<double>() - 7.7181) < 1e-3);
  CHECK(std::fabs(j["d1"].get<double>() - 5.0) < 1e-2);
  CHECK(j["jc"] == j["terminal_cost"]);
  const double gap = j["t1"].get<double>() - j["t2"].get<double>();
  CHECK(gap > 0.05);
  CHECK(gap < 0.15);

  int launches = 0, interceptions = 0;
  bool transition = false, block = false;
  for (const auto& e : j["events"]) {
    const std::string kind = e["event"].get<std::string>();
    launches += kind == "MissileLaunch";
    interceptions += kind == "Interception";
    transition |= kind == "StageTransition";
    block |= kind == "RangeReached";
  }
  CHECK(launches == 2);
  CHECK(interceptions == 2);
  CHECK(transition);
  CHECK(block);

  CHECK(slurp(out + "/summary.json") == r.out);
  const std::string traj = slurp(out + "/trajectory.csv");
  CHECK(traj.substr(0, 26) == "t,agent,x,y,heading,speed\n");
  CHECK(traj.find("BW") != std::string::npos);
  CHECK(traj.find("D2") != std::string::npos);
  const std::string events = slurp(out + "/events.csv");
  CHECK(events.find("Interception,\"A1,D1\"") != std::string::npos);
}

TEST_CASE("halving dt changes the lagged cost by its discretization error") {
  const CliResult r = run_cli("simulate --scenario " + scenario("chained_baseline.json") +
                              " --dt 0.0005 --stage attack");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["stage"] == "attack");
  CHECK(j["dt"].get<double>() == 0.0005);
  CHECK(std::fabs(j["value"].get<double>() - 13.888071425) < 1e-6);
  CHECK(std::fabs(j["value"].get<double>() - 13.887794304) < 5e-4);
  CHECK(j["terminal_cost"] == j["value"]);
}

TEST_CASE("bad inputs exit with code 2") {
  CHECK(run_cli("solve-attack --scenario /no/such/file.json").code == 2);

  const std::string garbled = tmp_root() + "/garbled.json";
  write_file(garbled, "not json at all");
  const CliResult g = run_cli("solve-attack --scenario " + garbled);
  CHECK(g.code == 2);
  CHECK(g.err.find("malformed") != std::string::npos);

  std::string text = slurp(scenario("attack_baseline.json"));
  text.replace(text.find("\"beta\": 1.25"), 12, "\"beta\": 0.9");
  const std::string shallow = tmp_root() + "/shallow.json";
  write_file(shallow, text);
  const CliResult b = run_cli("solve-attack --scenario " + shallow);
  CHECK(b.code == 2);
  CHECK(b.err.find("parameters.beta") != std::string::npos);

  CHECK(run_cli("sweep --scenario " + scenario("attack_baseline.json") +
                " --grid bogus=1:2:3")
            .code == 2);
  CHECK(run_cli("sweep --scenario " + scenario("attack_baseline.json") + " --grid rho_s=1:2")
            .code == 2);
}

TEST_CASE("chaining off the wrong termination exits with code 3") {
  std::string text = slurp(scenario("chained_baseline.json"));
  const std::string evader = "\"position\": [-6.0, 8.0]";
  text.replace(text.find(evader), evader.size(), "\"position\": [8.5, 10.0]");
  const std::string path = tmp_root() + "/ringstart.json";
  write_file(path, text);  // evader starts exactly on the standoff ring
  const CliResult r = run_cli("simulate --scenario " + path);
  CHECK(r.code == 3);
  CHECK(r.err.find("no retreat game") != std::string::npos);
}

TEST_CASE("single-point sweep agrees with the solver and repeats bitwise") {
  const std::string args =
      "sweep --scenario " + scenario("attack_baseline.json") + " --grid rho_s=7:7:1";
  const CliResult a = run_cli(args);
  REQUIRE(a.code == 0);
  std::istringstream ss(a.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  CHECK(header == "rho_s,mode,value,winner,error");
  CHECK(row.substr(0, 14) == "7,Cooperative,");
  const double v = std::strtod(row.c_str() + 14, nullptr);
  CHECK(std::fabs(v - 13.986992569) < 1e-6);
  CHECK(row.find(",Red,") != std::string::npos);

  const CliResult b = run_cli(args);
  CHECK(b.out == a.out);
}

TEST_CASE("sweeping the standoff radius flips the winner at the game value") {
  const CliResult r = run_cli("sweep --scenario " + scenario("attack_baseline.json") +
                              " --grid rho_s=13:15:5");
  REQUIRE(r.code == 0);
  std::istringstream ss(r.out);
  std::string line;
  std::getline(ss, line);  // header
  int n = 0;
  while (std::getline(ss, line)) {
    const double rho_s = std::strtod(line.c_str(), nullptr);
    const bool blue = line.find(",Blue,") != std::string::npos;
    CHECK(blue == (rho_s > 13.9870));  // value 13.987 separates the outcomes
    CHECK(line.find("Cooperative") != std::string::npos);
    ++n;
  }
  CHECK(n == 5);
}

TEST_CASE("invocation without a subcommand fails") {
  CHECK(run_cli("").code != 0);
}
