#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dsat/analysis.hpp"
#include "dsat/control.hpp"
#include "dsat/csvio.hpp"
#include "dsat/orbit.hpp"
#include "dsat/plant.hpp"
#include "dsat/presets.hpp"
#include "dsat/simulate.hpp"

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string out_dir = ".";
  std::string config_path;
  std::string preset;
  int paper_figure = 0;
  bool accept_literal_row6 = false;
  std::string csv_path;
  std::string column;
};

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + " is not valid JSON: " +
                                e.what());
  }
  return j;
}

std::string out_path(const Options& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

std::string join_args(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

void print_matrix(const char* name, const Eigen::MatrixXd& m) {
  std::printf("%s =\n", name);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::printf("%14.6g", m(r, c));
    }
    std::printf("\n");
  }
}

void print_modes(const Eigen::MatrixXd& A) {
  std::printf("modes:\n");
  std::printf("%24s %14s %10s\n", "lambda", "omega_n", "zeta");
  for (const dsat::EigenMode& m : dsat::eigen_modes(A)) {
    std::printf("%11.4e %+11.4ei %14.6g %10.4g\n", m.lambda.real(),
                m.lambda.imag(), m.omega_n, m.zeta);
  }
}

int cmd_model(const Options& opt, const std::string& command) {
  dsat::PlantMatrices plant;
  std::vector<std::string> config_paths;
  nlohmann::json effective;
  if (!opt.preset.empty()) {
    plant = dsat::plant_preset(opt.preset);
    effective = dsat::plant_to_json(plant);
  } else if (!opt.config_path.empty()) {
    effective = load_config(opt.config_path);
    plant = dsat::load_plant_literal(effective, opt.accept_literal_row6);
    config_paths.push_back(opt.config_path);
  } else {
    throw std::invalid_argument("model needs --preset or --config");
  }

  print_matrix("A", plant.A);
  print_matrix("B", plant.B);
  const std::vector<std::string> diags = dsat::validate_structure(plant);
  if (diags.empty()) {
    std::printf("structure: ok\n");
  } else {
    std::printf("structure diagnostics:\n");
    for (const std::string& d : diags) std::printf("  %s\n", d.c_str());
  }
  print_modes(plant.A);

  dsat::RunManifest manifest;
  manifest.command = command;
  manifest.config_paths = config_paths;
  manifest.out_dir = opt.out_dir;
  manifest.config_hash = dsat::fnv1a_hex(effective.dump());
  dsat::write_manifest(manifest, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_rootlocus(const Options& opt, const std::string& command) {
  dsat::FeedbackLoop shape;
  dsat::PlantMatrices plant;
  nlohmann::json effective;
  std::vector<std::string> config_paths;
  double k_min = 0.0, k_max = 0.0, sign = 1.0;
  int ppd = 20;

  if (!opt.preset.empty()) {
    shape = dsat::loop_preset(opt.preset);
    plant = dsat::plant_preset(opt.preset);
    effective = dsat::loop_to_json(shape);
  } else if (!opt.config_path.empty()) {
    effective = load_config(opt.config_path);
    shape = dsat::loop_from_json(effective);
    if (effective.contains("plant")) {
      plant = dsat::load_plant_literal(effective.at("plant"),
                                       opt.accept_literal_row6);
    } else {
      plant = dsat::plant_preset(shape.sensed == dsat::SensedOutput::theta_s
                                     ? "paper-longitudinal"
                                     : "paper-lateral");
    }
    if (effective.contains("gains")) {
      const auto& gj = effective.at("gains");
      k_min = gj.value("k_min", 0.0);
      k_max = gj.value("k_max", 0.0);
      ppd = gj.value("points_per_decade", 20);
      sign = gj.value("sign", 1.0);
    }
    config_paths.push_back(opt.config_path);
  } else {
    throw std::invalid_argument("rootlocus needs --preset or --config");
  }

  if (k_min <= 0.0 || k_max <= 0.0) {
    // Default grid brackets the design gain by several decades.
    const double k_design = std::abs(shape.compensator.K);
    if (k_design <= 0.0) {
      throw std::invalid_argument(
          "root locus needs a gain grid or a nonzero design gain");
    }
    k_min = k_design * 1e-4;
    k_max = k_design * 1e2;
    sign = shape.compensator.K < 0.0 ? -1.0 : 1.0;
  }

  const std::vector<double> gains =
      dsat::log_gain_grid(k_min, k_max, ppd, sign);
  const dsat::LocusData locus = dsat::root_locus(plant, shape, gains);
  dsat::write_locus_csv(locus, out_path(opt, "locus.csv"));
  const nlohmann::json ann = dsat::locus_annotations(locus);
  {
    std::ofstream out(out_path(opt, "locus_annotations.json"),
                      std::ios::binary);
    out << ann.dump(2) << '\n';
  }
  std::printf("locus: %zu gains, %zu branches\n", locus.gains.size(),
              locus.branches.size());
  std::printf("critical gains: %zu, breakaway points: %zu\n",
              ann.at("critical_gains").size(), ann.at("breakaway").size());

  dsat::RunManifest manifest;
  manifest.command = command;
  manifest.config_paths = config_paths;
  manifest.out_dir = opt.out_dir;
  manifest.config_hash = dsat::fnv1a_hex(effective.dump());
  manifest.outputs = {"locus.csv", "locus_annotations.json"};
  dsat::write_manifest(manifest, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_simulate(const Options& opt, const std::string& command) {
  std::vector<dsat::Scenario> runs;
  std::vector<std::string> config_paths;
  std::string hash_input;

  if (opt.paper_figure != 0) {
    const std::string group_name = dsat::figure_alias(opt.paper_figure);
    for (const dsat::ScenarioGroup& g : dsat::scenario_groups()) {
      if (g.name == group_name) {
        runs = g.members;
        break;
      }
    }
  } else if (!opt.preset.empty()) {
    runs.push_back(dsat::find_scenario(opt.preset));
  } else if (!opt.config_path.empty()) {
    runs.push_back(dsat::scenario_from_json(load_config(opt.config_path)));
    config_paths.push_back(opt.config_path);
  } else {
    throw std::invalid_argument(
        "simulate needs --preset, --paper-figure, or --config");
  }

  dsat::RunManifest manifest;
  manifest.command = command;
  manifest.config_paths = config_paths;
  manifest.out_dir = opt.out_dir;

  int rc = 0;
  for (const dsat::Scenario& sc : runs) {
    hash_input += dsat::scenario_to_json(sc).dump();
    const dsat::SimulationResult result = dsat::simulate(sc);
    const std::string csv_name = sc.name + ".csv";
    dsat::write_result_csv(result, out_path(opt, csv_name));
    manifest.outputs.push_back(csv_name);
    if (result.diverged) {
      std::fprintf(stderr,
                   "error: %s diverged at t = %s s (partial trace written)\n",
                   sc.name.c_str(),
                   dsat::format_double(result.t_diverged).c_str());
      rc = 1;
    } else {
      std::printf("%s: %d samples -> %s\n", sc.name.c_str(),
                  result.samples(), csv_name.c_str());
    }
  }
  manifest.config_hash = dsat::fnv1a_hex(hash_input);
  dsat::write_manifest(manifest, out_path(opt, "manifest.json"));
  return rc;
}

// Reads t plus one named column from a result CSV.
void read_csv_column(const std::string& path, const std::string& column,
                     std::vector<double>& t, std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open csv file " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("csv file " + path + " is empty");
  }
  std::vector<std::string> headers;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) headers.push_back(field);
  }
  int t_idx = -1, y_idx = -1;
  for (size_t i = 0; i < headers.size(); ++i) {
    if (headers[i] == "t") t_idx = static_cast<int>(i);
    if (headers[i] == column) y_idx = static_cast<int>(i);
  }
  if (t_idx < 0) {
    throw std::invalid_argument("csv file " + path + " has no column \"t\"");
  }
  if (y_idx < 0) {
    throw std::invalid_argument("csv file " + path + " has no column \"" +
                                column + "\"");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    int idx = 0;
    double tv = 0.0, yv = 0.0;
    bool got_t = false, got_y = false;
    while (std::getline(ss, field, ',')) {
      if (idx == t_idx) {
        tv = std::stod(field);
        got_t = true;
      }
      if (idx == y_idx) {
        yv = std::stod(field);
        got_y = true;
      }
      ++idx;
    }
    if (!got_t || !got_y) {
      throw std::invalid_argument("csv row with missing fields in " + path);
    }
    t.push_back(tv);
    y.push_back(yv);
  }
  if (t.empty()) {
    throw std::invalid_argument("csv file " + path + " has no data rows");
  }
}

int cmd_analyze(const Options& opt, const std::string& command) {
  std::string csv = opt.csv_path;
  std::string column = opt.column;
  double band_fraction = 0.05;
  double window_lo = 0.0, window_hi = 1e300;
  double budget = dsat::kPointingBudgetDeg;
  std::vector<std::string> config_paths;
  nlohmann::json effective;

  if (!opt.config_path.empty()) {
    effective = load_config(opt.config_path);
    csv = effective.at("csv").get<std::string>();
    column = effective.value("column", column);
    band_fraction = effective.value("band_fraction", band_fraction);
    if (effective.contains("window")) {
      window_lo = effective.at("window").at(0).get<double>();
      window_hi = effective.at("window").at(1).get<double>();
    }
    budget = effective.value("budget_deg", budget);
    config_paths.push_back(opt.config_path);
  }
  if (csv.empty() || column.empty()) {
    throw std::invalid_argument(
        "analyze needs a csv path and a column (--config or csv --column)");
  }

  std::vector<double> t, y;
  read_csv_column(csv, column, t, y);
  const dsat::ResponseMetrics metrics = dsat::analyze_response(
      t, y, band_fraction, window_lo, window_hi, budget);
  const nlohmann::json mj = dsat::metrics_to_json(metrics);
  std::printf("%s\n", mj.dump(2).c_str());
  {
    std::ofstream out(out_path(opt, "metrics.json"), std::ios::binary);
    out << mj.dump(2) << '\n';
  }

  dsat::RunManifest manifest;
  manifest.command = command;
  manifest.config_paths = config_paths;
  manifest.out_dir = opt.out_dir;
  if (effective.is_null()) {
    effective = {{"csv", csv}, {"column", column}};
  }
  manifest.config_hash = dsat::fnv1a_hex(effective.dump());
  manifest.outputs = {"metrics.json"};
  dsat::write_manifest(manifest, out_path(opt, "manifest.json"));
  return 0;
}

int cmd_presets_list() {
  std::printf("plant presets:\n");
  for (const std::string& n : dsat::plant_preset_names()) {
    std::printf("  %s\n", n.c_str());
  }
  std::printf("loop presets:\n");
  for (const std::string& n : dsat::loop_preset_names()) {
    std::printf("  %s\n", n.c_str());
  }
  std::printf("scenario groups:\n");
  for (const dsat::ScenarioGroup& g : dsat::scenario_groups()) {
    std::printf("  %s (focus %s)\n", g.name.c_str(),
                g.angle_of_interest.c_str());
    for (const dsat::Scenario& sc : g.members) {
      std::printf("    %s\n", sc.name.c_str());
    }
  }
  std::printf("figure aliases:\n");
  for (const auto& [num, name] : dsat::figure_aliases()) {
    std::printf("  %d -> %s\n", num, name.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-spin satellite attitude model and simulation tool"};
  app.require_subcommand(1);
  Options opt;

  app.add_option("--out", opt.out_dir, "output directory");

  CLI::App* model = app.add_subcommand("model", "build and inspect a plant");
  model->add_option("--preset", opt.preset, "plant preset name");
  model->add_option("--config", opt.config_path, "plant config JSON");
  model->add_flag("--accept-literal-row6", opt.accept_literal_row6,
                  "admit the historical row-6 layout in literal configs");

  CLI::App* rootlocus =
      app.add_subcommand("rootlocus", "sweep a loop gain and trace branches");
  rootlocus->add_option("--preset", opt.preset, "loop preset name");
  rootlocus->add_option("--config", opt.config_path, "loop config JSON");

  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate a scenario over its orbit");
  simulate->add_option("--preset", opt.preset, "scenario preset name");
  simulate->add_option("--paper-figure", opt.paper_figure,
                       "run the scenario group for a published figure");
  simulate->add_option("--config", opt.config_path, "scenario config JSON");

  CLI::App* analyze =
      app.add_subcommand("analyze", "compute response metrics from a csv");
  analyze->add_option("csv", opt.csv_path, "result csv path");
  analyze->add_option("--column", opt.column, "column to analyze");
  analyze->add_option("--config", opt.config_path, "analysis config JSON");

  CLI::App* presets = app.add_subcommand("presets", "preset catalogue");
  CLI::App* presets_list =
      presets->add_subcommand("list", "list all preset names");
  presets->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  }

  const std::string command = join_args(argc, argv);
  try {
    if (model->parsed()) return cmd_model(opt, command);
    if (rootlocus->parsed()) return cmd_rootlocus(opt, command);
    if (simulate->parsed()) return cmd_simulate(opt, command);
    if (analyze->parsed()) return cmd_analyze(opt, command);
    if (presets->parsed() && presets_list->parsed()) {
      return cmd_presets_list();
    }
    std::fprintf(stderr, "error: no subcommand\n");
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
