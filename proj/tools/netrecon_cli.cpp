// Command line front end: simulate series, recover networks, run experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "netrecon/error.hpp"
#include "netrecon/experiments.hpp"
#include "netrecon/io.hpp"
#include "netrecon/plot.hpp"
#include "netrecon/recovery.hpp"

namespace fs = std::filesystem;
using namespace netrecon;

namespace {

// Nonzero exit status per failing stage.
int exit_code(const std::string& stage) {
  static const std::map<std::string, int> codes = {
      {"config", 3},  {"io", 4},        {"topology", 5}, {"dynamics", 6},
      {"signal", 7},  {"basis", 8},     {"adapt", 8},    {"solvers", 9},
      {"analysis", 10}, {"recovery", 11}, {"experiment", 12}, {"plot", 13},
  };
  const auto it = codes.find(stage);
  return it == codes.end() ? 1 : it->second;
}

Json load_json(const std::string& path) {
  if (path.empty()) return Json::object();
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw Error("config", path + ": " + e.what());
  }
}

struct SimulateArgs {
  std::string network = "star";
  int nodes = 10;
  int leaves_a = 4, leaves_b = 4;
  double coupling = 0.1;
  std::string model = "stuart-landau";
  double t_end = 100.0;
  double dt = 0.1;
  int seed_index = 0;
  std::uint64_t master_seed = 1;
  std::string out;
  std::string truth_out;
  std::string config;
};

void run_simulate(const SimulateArgs& a) {
  Json j = load_json(a.config);
  j["experiment"] = "time-sweep";
  if (!j.contains("network")) j["network"] = Json::object();
  auto& net = j["network"];
  if (!net.contains("kind")) net["kind"] = a.network;
  if (!net.contains("nodes")) net["nodes"] = a.nodes;
  if (!net.contains("leaves_a")) net["leaves_a"] = a.leaves_a;
  if (!net.contains("leaves_b")) net["leaves_b"] = a.leaves_b;
  if (!j.contains("coupling")) j["coupling"] = a.coupling;
  if (!j.contains("model")) j["model"] = a.model;
  if (!j.contains("dt_sample")) j["dt_sample"] = a.dt;
  if (!j.contains("master_seed")) j["master_seed"] = a.master_seed;
  const ExperimentConfig cfg = config_from_json(j);

  const Network truth = cfg.network.build();
  const Instance inst = draw_instance(truth.size(), cfg.master_seed, a.seed_index);
  const MultivariateSeries series = simulate_instance(cfg, truth, inst, a.t_end);
  std::ostringstream csv;
  write_series_csv(csv, series);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(a.out, csv.str());
  }
  if (!a.truth_out.empty()) write_text_file(a.truth_out, to_edge_list(truth));
}

struct RecoverArgs {
  std::string series;
  std::string truth;
  std::string method = "lasso";
  double coupling = 0.0;
  std::string out;
  std::string edges_out;
  std::string config;
};

void run_recover(const RecoverArgs& a) {
  Json j = load_json(a.config);
  j["experiment"] = "time-sweep";
  const ExperimentConfig cfg = config_from_json(j);
  RecoveryConfig rc = cfg.recovery;
  rc.coupling = a.coupling;

  std::ifstream in(a.series);
  if (!in) throw Error("io", "cannot open " + a.series);
  const MultivariateSeries series = read_series_csv(in);
  std::optional<Network> truth;
  if (!a.truth.empty()) truth = parse_edge_list(read_text_file(a.truth));

  const RecoveryReport report = recover(series, truth, parse_method(a.method), rc);
  const std::string text = to_json(report).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(a.out, text);
  }
  if (!a.edges_out.empty()) write_text_file(a.edges_out, to_edge_list(report.recovered));
}

struct ExperimentArgs {
  std::string name;
  std::string config;
  std::string out;
  std::optional<int> seeds;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;
  bool full = false;
};

void run_experiment_command(const ExperimentArgs& a) {
  Json j = load_json(a.config);
  if (j.contains("experiment") && j["experiment"] != a.name)
    throw Error("config", "config names experiment " + j["experiment"].dump() + ", not " + a.name);
  j["experiment"] = a.name;
  if (a.full) j["seeds"] = 100;
  if (a.seeds) j["seeds"] = *a.seeds;
  if (a.master_seed) j["master_seed"] = *a.master_seed;
  if (a.threads) j["threads"] = *a.threads;
  if (!a.out.empty()) j["output"] = a.out;
  const ExperimentConfig cfg = config_from_json(j);
  for (const auto& path : run_experiment(cfg)) std::cout << path.string() << '\n';
}

struct PlotArgs {
  std::string csv;
  std::string x, y, std_col, group = "method";
  std::string title;
  bool log_x = false;
  std::string out;
};

void run_plot(const PlotArgs& a) {
  LinePlotSpec spec;
  spec.title = a.title.empty() ? a.y + " vs " + a.x : a.title;
  spec.x_column = a.x;
  spec.y_column = a.y;
  spec.std_column = a.std_col;
  spec.group_column = a.group;
  spec.log_x = a.log_x;
  write_text_file(a.out, line_chart_svg(parse_csv(read_text_file(a.csv)), spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network reconstruction from oscillator time series"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate one random instance and write its series CSV");
  simulate->add_option("--network", sim.network, "star, twin-stars or ring")
      ->check(CLI::IsMember({"star", "twin-stars", "ring"}));
  simulate->add_option("--nodes", sim.nodes, "node count (star, ring)");
  simulate->add_option("--leaves-a", sim.leaves_a, "leaves of hub A (twin-stars)");
  simulate->add_option("--leaves-b", sim.leaves_b, "leaves of hub B (twin-stars)");
  simulate->add_option("--coupling", sim.coupling, "coupling strength alpha");
  simulate->add_option("--model", sim.model, "stuart-landau (writes Re z) or phase")
      ->check(CLI::IsMember({"phase", "stuart-landau"}));
  simulate->add_option("--t-end", sim.t_end, "acquisition time");
  simulate->add_option("--dt", sim.dt, "sample interval");
  simulate->add_option("--seed-index", sim.seed_index, "instance index");
  simulate->add_option("--master-seed", sim.master_seed, "master seed");
  simulate->add_option("--config", sim.config, "JSON config (network, coupling, model, ...)");
  simulate->add_option("--out", sim.out, "series CSV (stdout when omitted)");
  simulate->add_option("--truth-out", sim.truth_out, "write the true network as an edge list");

  RecoverArgs rec;
  auto* recover_cmd = app.add_subcommand("recover", "Recover the network behind a series CSV");
  recover_cmd->add_option("--series", rec.series, "series CSV")->required();
  recover_cmd->add_option("--truth", rec.truth, "true network edge list, for scoring");
  recover_cmd->add_option("--method", rec.method, "l2 or lasso")
      ->check(CLI::IsMember({"l2", "lasso"}));
  recover_cmd->add_option("--coupling", rec.coupling, "alpha, enables the kappa metrics");
  recover_cmd->add_option("--config", rec.config, "JSON config (filter and solver sections)");
  recover_cmd->add_option("--out", rec.out, "report JSON (stdout when omitted)");
  recover_cmd->add_option("--edges-out", rec.edges_out, "recovered network as an edge list");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment");
  experiment->add_option("name", exp.name, "experiment name")
      ->required()
      ->check(CLI::IsMember({"time-sweep", "size-sweep", "three-networks", "basis-extension",
                             "noise-sweep", "instability-demo"}));
  experiment->add_option("--config", exp.config, "JSON experiment config");
  experiment->add_option("--out", exp.out, "output directory");
  experiment->add_option("--seeds", exp.seeds, "number of seeds")->check(CLI::PositiveNumber);
  experiment->add_option("--master-seed", exp.master_seed, "master seed");
  experiment->add_option("--threads", exp.threads, "worker threads")->check(CLI::PositiveNumber);
  experiment->add_flag("--full", exp.full, "full reproduction (100 seeds)");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Redraw a sweep chart from its CSV");
  plot_cmd->add_option("--csv", plot.csv, "sweep CSV")->required();
  plot_cmd->add_option("--x", plot.x, "x column")->required();
  plot_cmd->add_option("--y", plot.y, "y column")->required();
  plot_cmd->add_option("--std", plot.std_col, "std column for the shaded band");
  plot_cmd->add_option("--group", plot.group, "grouping column");
  plot_cmd->add_option("--title", plot.title, "chart title");
  plot_cmd->add_flag("--log-x", plot.log_x, "logarithmic x axis");
  plot_cmd->add_option("--out", plot.out, "SVG file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) run_simulate(sim);
    if (*recover_cmd) run_recover(rec);
    if (*experiment) run_experiment_command(exp);
    if (*plot_cmd) run_plot(plot);
  } catch (const Error& e) {
    std::cerr << "error [" << e.stage() << "] " << e.what() << '\n';
    return exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "error " << e.what() << '\n';
    return 1;
  }
  return 0;
}
