// crnlab: analyze, simulate, run experiments on and tabulate stationary laws
// of mass-action reaction networks.
//
// Exit codes: 0 ok, 2 input error, 3 threshold violated, 4 precondition refused.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crnlab/experiment_config.hpp"
#include "crnlab/parser.hpp"
#include "crnlab/simulator.hpp"
#include "crnlab/structural.hpp"

using namespace crnlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kThreshold = 3;
constexpr int kRefused = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ReactionNetwork load_model(const std::string& path) { return parse_network(read_model_file(path)); }

std::vector<Count> parse_vector(const std::string& text, const char* what) {
  std::vector<Count> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw InputError(std::string("bad ") + what + " entry '" + item + "'");
    }
    if (used != item.size() || v < 0) throw InputError(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(static_cast<Count>(v));
  }
  return out;
}

// Writes to the named file, or stdout when the name is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

json report_json(const ReactionNetwork& net, const StructuralReport& r) {
  json complexes = json::array();
  for (const auto& c : net.complexes()) complexes.push_back(c.vec());
  return {{"species", net.species_names()},
          {"complexes", complexes},
          {"complex_count", r.complex_count},
          {"linkage_classes", r.linkage_classes},
          {"linkage_class_count", r.linkage_classes.size()},
          {"weakly_reversible", r.weakly_reversible},
          {"stoich_rank", r.stoich_rank},
          {"deficiency", r.deficiency}};
}

int cmd_analyze(const std::string& model, const std::string& out) {
  const auto net = load_model(model);
  emit(out, report_json(net, analyze(net)).dump(2) + "\n");
  return kOk;
}

int cmd_simulate(const std::string& model, const std::string& init, std::uint64_t seed, double max_time,
                 std::uint64_t max_events, std::uint64_t every, double grid, const std::string& out) {
  const auto net = load_model(model);
  StateVector x0(parse_vector(init, "--init"));
  if (x0.size() != net.n_species()) {
    throw InputError("--init has " + std::to_string(x0.size()) + " entries, model has " +
                     std::to_string(net.n_species()) + " species");
  }
  SimConfig cfg;
  cfg.seed = seed;
  cfg.max_time = max_time;
  cfg.max_events = max_events;
  if (grid > 0.0) {
    cfg.thinning = Thinning::on_grid(grid);
  } else if (every > 1) {
    cfg.thinning = Thinning::every_k(every);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto rec = simulate(net, x0, cfg);
  std::ostringstream csv;
  write_trajectory_csv(csv, rec);
  emit(out, csv.str());
  return kOk;
}

int cmd_experiment(const std::string& config, const std::string& out, const std::string& csv_out) {
  const auto cfg = read_json_file(config);
  const auto base = std::filesystem::path(config).parent_path();
  const auto outcome = run_experiment(cfg, base);
  emit(out, outcome.result.dump(2) + "\n");
  if (!csv_out.empty()) emit(csv_out, outcome.csv);
  for (const auto& v : outcome.violations) std::cerr << "threshold violated: " << v << "\n";
  return outcome.passed() ? kOk : kThreshold;
}

int cmd_stationary(const std::string& model, const std::string& base_text, Count window, const std::string& out) {
  const auto net = load_model(model);
  const auto report = analyze(net);
  if (!report.weakly_reversible || report.deficiency != 0) {
    throw PreconditionRefused("product-form measure needs a weakly reversible network of deficiency zero; this one has "
                              "weakly_reversible=" + std::string(report.weakly_reversible ? "true" : "false") +
                              ", deficiency=" + std::to_string(report.deficiency));
  }
  StateVector base(net.n_species());
  if (!base_text.empty()) {
    base = StateVector(parse_vector(base_text, "--base-state"));
    if (base.size() != net.n_species()) throw InputError("--base-state dimension does not match the model");
  }
  // Equilibrium in the stoichiometric class of the base state; an all-ones
  // guess stands in for the zero state.
  std::vector<double> guess(net.n_species(), 1.0);
  bool any = false;
  for (std::size_t i = 0; i < base.size(); ++i) any = any || base[i] > 0;
  if (any) {
    for (std::size_t i = 0; i < base.size(); ++i) guess[i] = std::max(static_cast<double>(base[i]), 1e-3);
  }
  const auto c = deterministic_equilibrium(net, guess);
  ProductFormMeasure measure(c);
  Window win{std::vector<Count>(net.n_species(), window)};
  const auto cls = measure.truncated_class(net, base, win);
  json table = json::array();
  for (std::size_t i = 0; i < cls.states.size(); ++i) {
    table.push_back({{"state", cls.states[i].vec()}, {"probability", cls.probability[i]}});
  }
  const json result = {{"equilibrium", c},
                       {"window", window},
                       {"base_state", base.vec()},
                       {"states", cls.states.size()},
                       {"boundary_leak", cls.boundary_leak},
                       {"normalizable", cls.normalizable},
                       {"residual", stationarity_residual(net, measure, win)},
                       {"measure", table}};
  emit(out, result.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic chemical reaction network laboratory"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (default: available parallelism)")->check(CLI::NonNegativeNumber);

  std::string model, out = "-", init, base_state, config, csv_out;
  std::uint64_t seed = 0, max_events = 100'000'000, every = 1;
  double max_time = 0.0, grid = 0.0;
  Count window = 30;

  auto* analyze_cmd = app.add_subcommand("analyze", "Structural report as JSON");
  analyze_cmd->add_option("model", model, "Model file (.crn)")->required();
  analyze_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* sim_cmd = app.add_subcommand("simulate", "One exact trajectory as CSV");
  sim_cmd->add_option("model", model, "Model file (.crn)")->required();
  sim_cmd->add_option("--init", init, "Initial state, comma separated")->required();
  sim_cmd->add_option("--seed", seed, "Random seed (default 0)");
  sim_cmd->add_option("--max-time", max_time, "Time horizon")->required();
  sim_cmd->add_option("--max-events", max_events, "Event limit (default 1e8)");
  sim_cmd->add_option("--every", every, "Record every k-th event");
  sim_cmd->add_option("--grid", grid, "Record on a time grid with this step instead");
  sim_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment config");
  exp_cmd->add_option("config", config, "Experiment config (.json)")->required();
  exp_cmd->add_option("--out", out, "Result JSON (default stdout)");
  exp_cmd->add_option("--csv", csv_out, "Also write the per-N table as CSV");

  auto* stat_cmd = app.add_subcommand("stationary", "Product-form stationary measure on a window");
  stat_cmd->add_option("model", model, "Model file (.crn)")->required();
  stat_cmd->add_option("--base-state", base_state, "State fixing the irreducible class (default 0)");
  stat_cmd->add_option("--window", window, "Window bound per coordinate (default 30)");
  stat_cmd->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  set_worker_count(jobs);

  try {
    if (*analyze_cmd) return cmd_analyze(model, out);
    if (*sim_cmd) return cmd_simulate(model, init, seed, max_time, max_events, every, grid, out);
    if (*exp_cmd) return cmd_experiment(config, out, csv_out);
    if (*stat_cmd) return cmd_stationary(model, base_state, window, out);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefused;
  } catch (const ExperimentFailure& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kThreshold;
  } catch (const StructuralError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    // Unreadable files land here.
    std::cerr << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
