// Drives the installed command-line binary as a subprocess and checks its
// exit-code contract, JSON reports, and reproducibility guarantees.
#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

using json = nlohmann::json;
using Catch::Matchers::ContainsSubstring;

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& tag) {
  static int counter = 0;
  return "/tmp/macrolab_cli_" + std::to_string(::getpid()) + "_" + tag + "_" +
         std::to_string(counter++);
}

// Runs the binary through the shell, capturing stdout/stderr and the exit
// status. env_prefix (e.g. "MACROLAB_THREADS=4 ") is prepended verbatim.
CmdResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string out_path = temp_path("out");
  const std::string err_path = temp_path("err");
  const std::string cmd =
      env_prefix + MACROLAB_CLI_BIN + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
  REQUIRE(os.good());
}

// Drops the timestamp line so two reports of the same run can be compared
// byte for byte.
std::string strip_timestamp(const std::string& text) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string line;
  bool saw_timestamp = false;
  while (std::getline(is, line)) {
    if (line.find("\"timestamp\"") != std::string::npos) {
      saw_timestamp = true;
      continue;
    }
    os << line << '\n';
  }
  REQUIRE(saw_timestamp);
  return os.str();
}

json common_fields(const CmdResult& r, const std::string& subcommand) {
  const json d = json::parse(r.out);
  REQUIRE(d.at("schema").get<int>() == 1);
  REQUIRE(d.at("subcommand").get<std::string>() == subcommand);
  REQUIRE(d.contains("timestamp"));
  REQUIRE(d.contains("failures"));
  REQUIRE(d.contains("pass"));
  return d;
}

TEST_CASE("help succeeds and malformed invocations exit with the usage code") {
  const CmdResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK_THAT(help.out, ContainsSubstring("verify-adn"));
  CHECK_THAT(help.out, ContainsSubstring("estimate-report"));

  CHECK(run_cli("verify-adn --help").code == 0);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("no-such-subcommand").code == 2);
  CHECK(run_cli("simulate --no-such-flag").code == 2);
  CHECK(run_cli("estimate-report --ratio-cap -1").code == 2);
  CHECK(run_cli("check-moments --grid 200").code == 2);
  CHECK(run_cli("verify-adn --out /no/such/directory/report.json").code == 2);

  const CmdResult shape = run_cli("simulate --shape dodecahedron --steps 0");
  CHECK(shape.code == 2);
  CHECK_THAT(shape.err, ContainsSubstring("dodecahedron"));

  const std::string cfg = temp_path("badcfg");
  write_file(cfg, "shape = ball\ncolor = red\n");
  const CmdResult bad = run_cli("simulate --config " + cfg);
  CHECK(bad.code == 2);
  CHECK_THAT(bad.err, ContainsSubstring("unknown configuration key: color"));
  std::remove(cfg.c_str());
}

TEST_CASE("the symbolic pipeline subcommand reports the exact closing determinant") {
  const CmdResult r = run_cli("verify-adn");
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "verify-adn");
  CHECK(d.at("pass").get<bool>());
  CHECK(d.at("failures").empty());

  const auto det = d.at("final_determinant").get<std::string>();
  CHECK_THAT(det, ContainsSubstring("384"));
  CHECK_THAT(det, ContainsSubstring("ell^8"));
  CHECK_THAT(det, ContainsSubstring("n3"));

  REQUIRE(d.at("steps").size() > 10);
  for (const auto& step : d.at("steps")) CHECK(step.at("pass").get<bool>());
}

TEST_CASE("the moment table reproduces the Gaussian facts at tight tolerance") {
  const CmdResult r = run_cli("check-moments");
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "check-moments");
  CHECK(d.at("pass").get<bool>());

  bool saw_fourth = false;
  for (const auto& row : d.at("table")) {
    CHECK(row.at("pass").get<bool>());
    CHECK(row.at("defect").get<double>() <= 1e-12);
    if (row.at("name").get<std::string>() == "fact:|v_i|^4") {
      saw_fourth = true;
      CHECK(row.at("value").get<double>() == Catch::Approx(3.0).margin(1e-12));
      CHECK(row.at("reference").get<double>() == 3.0);
    }
  }
  REQUIRE(saw_fourth);
  CHECK(d.at("table").size() == 10);
}

TEST_CASE("a zero-step simulation emits a single trace row of zeros") {
  const std::string csv_path = temp_path("trace") + ".csv";
  const CmdResult r = run_cli("simulate --shape spheroid --steps 0 --trace " + csv_path);
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "simulate");
  CHECK(d.at("pass").get<bool>());

  const json& trace = d.at("trace");
  const std::vector<std::string> cols = trace.at("columns");
  REQUIRE(cols ==
          std::vector<std::string>{"time", "mass", "energy", "angular_momentum_1"});
  REQUIRE(trace.at("rows").size() == 1);
  for (const auto& value : trace.at("rows")[0])
    CHECK(std::abs(value.get<double>()) <= 1e-12);

  const std::string csv = slurp(csv_path);
  CHECK_THAT(csv, ContainsSubstring("time,mass,energy,angular_momentum_1\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  std::remove(csv_path.c_str());
}

TEST_CASE("flags override the configuration file and echo into the report") {
  const std::string cfg = temp_path("cfg");
  write_file(cfg,
             "shape = ball\ngrid = 8\nsteps = 12\ncadence = 4\nseed = 5\n"
             "forcing = microscopic_noise\n");
  const CmdResult r = run_cli("simulate --config " + cfg + " --seed 9");
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "simulate");
  CHECK(d.at("config").at("seed").get<std::uint64_t>() == 9);
  CHECK(d.at("config").at("steps").get<int>() == 12);
  CHECK(d.at("config").at("forcing").get<std::string>() == "microscopic_noise");
  CHECK(d.at("trace").at("rows").size() == 13);
  CHECK(d.at("summary").at("max_mass_step_drift").get<double>() <= 1e-12);
  std::remove(cfg.c_str());
}

TEST_CASE("identical runs reproduce byte-identical reports modulo the timestamp") {
  const std::string args = "simulate --grid 8 --steps 6 --seed 5 --forcing microscopic_noise";
  const CmdResult a = run_cli(args);
  const CmdResult b = run_cli(args);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));

  const CmdResult t1 = run_cli(args, "MACROLAB_THREADS=1 ");
  const CmdResult t4 = run_cli(args, "MACROLAB_THREADS=4 ");
  REQUIRE(t1.code == 0);
  REQUIRE(t4.code == 0);
  CHECK(strip_timestamp(t1.out) == strip_timestamp(a.out));
  CHECK(strip_timestamp(t4.out) == strip_timestamp(a.out));
}

TEST_CASE("the constrained solve certifies its energy identity end to end") {
  const CmdResult r = run_cli("solve-sym-poisson --shape spheroid --refine 1 --seed 7");
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "solve-sym-poisson");
  CHECK(d.at("pass").get<bool>());
  CHECK(d.at("rigid_dim").get<int>() == 1);

  bool saw_energy = false;
  for (const auto& c : d.at("checks")) {
    CHECK(c.at("pass").get<bool>());
    if (c.at("name").get<std::string>() == "energy_identity_relative") {
      saw_energy = true;
      CHECK(c.at("value").get<double>() <= 1e-8);
    }
  }
  REQUIRE(saw_energy);
}

TEST_CASE("the domain stability constant comes out positive") {
  const CmdResult r = run_cli("korn-constant --shape ball --refine 1");
  REQUIRE(r.code == 0);
  const json d = common_fields(r, "korn-constant");
  CHECK(d.at("pass").get<bool>());
  CHECK(d.at("constant").get<double>() > 0.0);
  CHECK(d.at("rigid_dim").get<int>() == 3);
}

TEST_CASE("estimate caps separate passing runs from failing ones") {
  const std::string args =
      "estimate-report --steps 40 --cadence 8 --seed 3 --forcing microscopic_noise";
  const CmdResult ok = run_cli(args);
  REQUIRE(ok.code == 0);
  const json d = common_fields(ok, "estimate-report");
  CHECK(d.at("pass").get<bool>());
  CHECK(d.at("l2").at("ratio").get<double>() <= 3.0);
  CHECK(d.at("l2").at("g_bound_constant").get<double>() <= 0.05);
  CHECK(d.at("l6").at("ratio").get<double>() <= 3.0);
  CHECK(d.at("snapshots").get<int>() >= 2);

  const CmdResult bad = run_cli(args + " --ratio-cap 1e-15");
  CHECK(bad.code == 1);
  CHECK_THAT(bad.err, ContainsSubstring("l2_ratio_within_cap"));
  const json f = json::parse(bad.out);
  CHECK_FALSE(f.at("pass").get<bool>());
  const std::vector<std::string> failures = f.at("failures");
  CHECK_THAT(failures.at(0), ContainsSubstring("ratio_within_cap"));

  const CmdResult l2only = run_cli(args + " --kind l2");
  REQUIRE(l2only.code == 0);
  const json g = json::parse(l2only.out);
  CHECK(g.contains("l2"));
  CHECK_FALSE(g.contains("l6"));
}

}  // namespace
