#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsat/plant.hpp"
#include "dsat/presets.hpp"
#include "dsat/simulate.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_dsat;

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr merged
};

RunResult run_tool(const std::string& args) {
  RunResult r;
  const std::string cmd = g_dsat + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    r.output.append(buf, n);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_dir() {
  std::string tmpl =
      (fs::temp_directory_path() / "dsat-cli-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  REQUIRE(mkdtemp(buf.data()) != nullptr);
  return std::string(buf.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

size_t count_substr(const std::string& hay, const std::string& needle) {
  size_t count = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("model preset report") {
  const std::string dir = temp_dir();
  const RunResult r =
      run_tool("--out " + dir + " model --preset paper-longitudinal");
  CHECK(r.code == 0);
  CHECK(r.output.find("3.7113") != std::string::npos);
  CHECK(r.output.find("structure: ok") != std::string::npos);
  // Nutation pair shows up in the mode table.
  CHECK(r.output.find("3.86862") != std::string::npos);
  CHECK(fs::exists(dir + "/manifest.json"));
  CHECK(slurp(dir + "/manifest.json").find("dsat 1.0.0") !=
        std::string::npos);
}

TEST_CASE("model echoes the gravity column") {
  const std::string dir = temp_dir();
  const RunResult r =
      run_tool("--out " + dir + " model --preset paper-lateral");
  CHECK(r.code == 0);
  CHECK(r.output.find("-6.1872e-07") != std::string::npos);
  CHECK(r.output.find("7.2937e-07") != std::string::npos);
  CHECK(r.output.find("-1.3422e-07") != std::string::npos);
}

TEST_CASE("model accepts a degenerate all-zero literal") {
  const std::string dir = temp_dir();
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) {
    a.push_back({0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  }
  nlohmann::json b = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) b.push_back({0.0, 0.0});
  const nlohmann::json cfg = {{"literal", {{"A", a}, {"B", b}}}};
  write_file(dir + "/zero.json", cfg.dump());

  const RunResult r =
      run_tool("--out " + dir + " model --config " + dir + "/zero.json");
  CHECK(r.code == 0);
  CHECK(r.output.find("structure diagnostics:") != std::string::npos);
  // All six eigenvalues sit at the origin.
  CHECK(count_substr(r.output, "0.0000e+00i") == 6);
}

TEST_CASE("model historical row-6 layout needs the opt-in flag") {
  const std::string dir = temp_dir();
  nlohmann::json cfg =
      dsat::plant_to_json(dsat::plant_preset("paper-longitudinal"));
  cfg["literal"]["A"][5] = {0.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  write_file(dir + "/row6.json", cfg.dump());

  const RunResult rejected =
      run_tool("--out " + dir + " model --config " + dir + "/row6.json");
  CHECK(rejected.code == 2);
  CHECK(rejected.output.find("row 6") != std::string::npos);

  const RunResult accepted =
      run_tool("--out " + dir + " model --accept-literal-row6 --config " +
               dir + "/row6.json");
  CHECK(accepted.code == 0);
  CHECK(accepted.output.find("structure diagnostics:") != std::string::npos);
  CHECK(accepted.output.find("row 6") != std::string::npos);
}

TEST_CASE("model rejects malformed configs") {
  const std::string dir = temp_dir();
  write_file(dir + "/broken.json", "{ not json");
  RunResult r =
      run_tool("--out " + dir + " model --config " + dir + "/broken.json");
  CHECK(r.code == 2);
  CHECK(r.output.find("error:") != std::string::npos);

  nlohmann::json cfg =
      dsat::plant_to_json(dsat::plant_preset("paper-longitudinal"));
  cfg["literal"]["A"].erase(5);  // five rows only
  write_file(dir + "/short.json", cfg.dump());
  r = run_tool("--out " + dir + " model --config " + dir + "/short.json");
  CHECK(r.code == 2);

  r = run_tool("--out " + dir + " model --preset paper-vertical");
  CHECK(r.code == 2);

  r = run_tool("--out " + dir + " model");
  CHECK(r.code == 2);
}

TEST_CASE("simulate preset writes the result csv") {
  const std::string dir = temp_dir();
  const RunResult r =
      run_tool("--out " + dir + " simulate --preset pitch-recovery");
  CHECK(r.code == 0);
  const std::string csv = dir + "/pitch-recovery.csv";
  REQUIRE(fs::exists(csv));
  const std::string text = slurp(csv);
  CHECK(text.rfind(
            "t,p,q,r,phi_s_deg,theta_s_deg,psi_s_deg,xc_1,de_applied,"
            "dn_applied\n",
            0) == 0);
  // First sample carries the initial offset in degrees.
  const std::string first_row = text.substr(text.find('\n') + 1);
  CHECK(first_row.rfind("0,0,0,0,0,-1.5,0,", 0) == 0);
  CHECK(fs::exists(dir + "/manifest.json"));
}

TEST_CASE("simulate output is byte deterministic") {
  const std::string dir1 = temp_dir();
  const std::string dir2 = temp_dir();
  CHECK(run_tool("--out " + dir1 + " simulate --preset pitch-recovery")
            .code == 0);
  CHECK(run_tool("--out " + dir2 + " simulate --preset pitch-recovery")
            .code == 0);
  CHECK(slurp(dir1 + "/pitch-recovery.csv") ==
        slurp(dir2 + "/pitch-recovery.csv"));
}

TEST_CASE("simulate runs a whole figure group") {
  const std::string dir = temp_dir();
  const RunResult r = run_tool("--out " + dir + " simulate --paper-figure 29");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir + "/longitudinal-esweep-short-e0.csv"));
  CHECK(fs::exists(dir + "/longitudinal-esweep-short-e0.1.csv"));
  CHECK(fs::exists(dir + "/longitudinal-esweep-short-e0.2.csv"));
  CHECK(count_substr(r.output, "samples ->") == 3);

  CHECK(run_tool("--out " + dir + " simulate --paper-figure 33").code == 2);
  CHECK(run_tool("--out " + dir + " simulate --preset nope").code == 2);
  CHECK(run_tool("--out " + dir + " simulate").code == 2);
}

TEST_CASE("quiet circular run stays identically zero") {
  const std::string dir = temp_dir();
  dsat::Scenario sc = dsat::find_scenario("longitudinal-esweep-short-e0");
  sc.name = "quiet";
  sc.input = dsat::InputSignal{};
  sc.orbit.e = 0.0;
  sc.orbit.i = 0.0;
  sc.duration = 5.0;
  write_file(dir + "/quiet.json", dsat::scenario_to_json(sc).dump());

  const RunResult r =
      run_tool("--out " + dir + " simulate --config " + dir + "/quiet.json");
  CHECK(r.code == 0);
  const std::string text = slurp(dir + "/quiet.csv");
  // Last data row: everything still exactly zero at t = 5.
  const size_t tail = text.rfind("\n5,");
  REQUIRE(tail != std::string::npos);
  CHECK(text.substr(tail) == "\n5,0,0,0,0,0,0,0,0,0\n");
}

TEST_CASE("simulate reports divergence with a partial trace") {
  const std::string dir = temp_dir();
  dsat::Scenario sc;
  sc.name = "blowup";
  sc.plant = dsat::plant_preset("paper-longitudinal");
  sc.plant.A(dsat::kP, dsat::kR) = 100.0;
  sc.plant.A(dsat::kR, dsat::kP) = 100.0;
  sc.orbit = dsat::find_scenario("longitudinal-esweep-short-e0").orbit;
  sc.duration = 20.0;
  sc.dt = 0.01;
  sc.x0[dsat::kP] = 1e-3;
  write_file(dir + "/blowup.json", dsat::scenario_to_json(sc).dump());

  const RunResult r =
      run_tool("--out " + dir + " simulate --config " + dir + "/blowup.json");
  CHECK(r.code == 1);
  CHECK(r.output.find("diverged at t =") != std::string::npos);
  CHECK(r.output.find("partial trace written") != std::string::npos);
  CHECK(fs::exists(dir + "/blowup.csv"));
}

TEST_CASE("analyze computes metrics from a result csv") {
  const std::string dir = temp_dir();
  REQUIRE(run_tool("--out " + dir + " simulate --preset pitch-recovery")
              .code == 0);
  const std::string csv = dir + "/pitch-recovery.csv";

  const RunResult r = run_tool("--out " + dir + " analyze " + csv +
                               " --column theta_s_deg");
  CHECK(r.code == 0);
  CHECK(r.output.find("settling_time_s") != std::string::npos);
  CHECK(r.output.find("dominant_period_s") != std::string::npos);
  REQUIRE(fs::exists(dir + "/metrics.json"));
  const nlohmann::json m = nlohmann::json::parse(slurp(dir + "/metrics.json"));
  CHECK(m["peak_deg"].get<double>() >= 1.5);
  CHECK(m["budget"].contains("margin_deg"));

  const RunResult bad =
      run_tool("--out " + dir + " analyze " + csv + " --column bogus");
  CHECK(bad.code == 2);
  CHECK(bad.output.find("bogus") != std::string::npos);

  CHECK(run_tool("--out " + dir + " analyze").code == 2);
  CHECK(run_tool("--out " + dir + " analyze /nonexistent.csv --column t")
            .code == 2);
}

TEST_CASE("analyze config drives the window and budget") {
  const std::string dir = temp_dir();
  REQUIRE(run_tool("--out " + dir + " simulate --preset pitch-recovery")
              .code == 0);
  const nlohmann::json cfg = {{"csv", dir + "/pitch-recovery.csv"},
                              {"column", "theta_s_deg"},
                              {"band_fraction", 0.1},
                              {"window", {100.0, 500.0}},
                              {"budget_deg", 5.0}};
  write_file(dir + "/an.json", cfg.dump());
  const RunResult r =
      run_tool("--out " + dir + " analyze --config " + dir + "/an.json");
  CHECK(r.code == 0);
  const nlohmann::json m = nlohmann::json::parse(slurp(dir + "/metrics.json"));
  CHECK(m["budget"]["limit_deg"].get<double>() == 5.0);
  CHECK(m["budget"]["pass"].get<bool>());
  // The tail window excludes the big initial transient.
  CHECK(std::abs(m["envelope_deg"][0].get<double>()) < 0.5);
}

TEST_CASE("rootlocus preset emits csv and annotations") {
  const std::string dir = temp_dir();
  const RunResult r =
      run_tool("--out " + dir + " rootlocus --preset paper-directional");
  CHECK(r.code == 0);
  CHECK(r.output.find("locus:") != std::string::npos);
  REQUIRE(fs::exists(dir + "/locus.csv"));
  CHECK(slurp(dir + "/locus.csv").rfind("gain,", 0) == 0);
  REQUIRE(fs::exists(dir + "/locus_annotations.json"));
  const nlohmann::json ann =
      nlohmann::json::parse(slurp(dir + "/locus_annotations.json"));
  CHECK(ann.contains("critical_gains"));
  CHECK(ann.contains("breakaway"));
}

TEST_CASE("rootlocus rejects a bad gain grid") {
  const std::string dir = temp_dir();
  nlohmann::json cfg = dsat::loop_to_json(dsat::loop_preset("paper-lateral"));
  cfg["gains"] = {{"k_min", 5.0}, {"k_max", 1.0}};
  write_file(dir + "/locus.json", cfg.dump());
  const RunResult r =
      run_tool("--out " + dir + " rootlocus --config " + dir + "/locus.json");
  CHECK(r.code == 2);

  CHECK(run_tool("--out " + dir + " rootlocus").code == 2);
}

TEST_CASE("presets list shows the catalogue") {
  const RunResult r = run_tool("presets list");
  CHECK(r.code == 0);
  CHECK(r.output.find("paper-longitudinal") != std::string::npos);
  CHECK(r.output.find("paper-directional") != std::string::npos);
  CHECK(r.output.find("longitudinal-esweep-short-e0.2") != std::string::npos);
  CHECK(r.output.find("pitch-recovery") != std::string::npos);
  CHECK(r.output.find("lateral-open-long") != std::string::npos);
  CHECK(r.output.find("29 -> longitudinal-esweep-short") !=
        std::string::npos);
  CHECK(r.output.find("42 -> directional-isweep-long") != std::string::npos);
}

TEST_CASE("bare invocation is a usage error") {
  CHECK(run_tool("").code == 2);
  CHECK(run_tool("frobnicate").code == 2);
}

int cli_main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <dsat-binary> [doctest args]\n");
    return 1;
  }
  g_dsat = argv[1];
  std::vector<char*> args;
  args.push_back(argv[0]);
  for (int i = 2; i < argc; ++i) args.push_back(argv[i]);
  doctest::Context ctx(static_cast<int>(args.size()), args.data());
  return ctx.run();
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
