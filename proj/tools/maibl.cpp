#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maibl/experiment.hpp"
#include "maibl/grid.hpp"
#include "maibl/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

template <class T>
T parse_scalar(const std::string& text) {
  T out{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("'" + text + "' is not a valid value");
  return out;
}

template <>
std::string parse_scalar<std::string>(const std::string& text) {
  return text;
}

template <>
bool parse_scalar<bool>(const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean (use true/false)");
}

// Config-file key -> { the matching CLI option (to let explicit flags win),
// a setter that parses the file value into the bound ExperimentConfig
// field }. CLI11's own set_config is a no-op on subcommands, so the file is
// applied by hand after parsing.
struct ConfigBinding {
  const CLI::Option* option = nullptr;
  std::function<void(const std::string&)> apply;
};
using ConfigBindings = std::map<std::string, ConfigBinding>;

ConfigBindings add_config_flags(CLI::App& cmd, maibl::ExperimentConfig& cfg) {
  ConfigBindings bindings;
  const auto bind = [&bindings](CLI::Option* opt, auto& field) {
    using Field = std::remove_reference_t<decltype(field)>;
    bindings[opt->get_lnames().front()] =
        ConfigBinding{opt, [&field](const std::string& v) { field = parse_scalar<Field>(v); }};
    return opt;
  };

  bind(cmd.add_option("--model", cfg.model,
                      "Model id: greedy-maibl, hysteretic-maibl, lenient-maibl, q, "
                      "hysteretic-q, lenient-q"),
       cfg.model)
      ->capture_default_str();
  bind(cmd.add_option("--scenario", cfg.scenario, "Reward scenario id (1-4)"),
       cfg.scenario)
      ->capture_default_str();
  bind(cmd.add_option("--runs", cfg.runs, "Independent runs"), cfg.runs)
      ->capture_default_str();
  bind(cmd.add_option("--episodes", cfg.episodes, "Episodes per run"), cfg.episodes)
      ->capture_default_str();
  bind(cmd.add_option("--step-limit", cfg.step_limit, "Step cap per episode"),
       cfg.step_limit)
      ->capture_default_str();
  bind(cmd.add_option("--seed", cfg.seed, "Master seed"), cfg.seed)
      ->capture_default_str();
  bind(cmd.add_option("--map", cfg.map_path, "Map file (default: built-in 16x16 map)"),
       cfg.map_path);
  bind(cmd.add_option("--output", cfg.output_dir, "Output directory"), cfg.output_dir)
      ->capture_default_str();
  bind(cmd.add_option("--decay", cfg.decay, "Memory decay d"), cfg.decay)
      ->capture_default_str();
  bind(cmd.add_option("--noise", cfg.noise, "Activation noise sigma"), cfg.noise)
      ->capture_default_str();
  bind(cmd.add_option("--default-utility", cfg.default_utility, "Default utility x0"),
       cfg.default_utility)
      ->capture_default_str();
  bind(cmd.add_option("--tau", cfg.tau, "Retrieval temperature (0 = sigma*sqrt(2))"),
       cfg.tau)
      ->capture_default_str();
  bind(cmd.add_option("--epsilon0", cfg.epsilon0, "Initial exploration rate"),
       cfg.epsilon0)
      ->capture_default_str();
  bind(cmd.add_option("--eta", cfg.eta, "Per-episode epsilon decay"), cfg.eta)
      ->capture_default_str();
  bind(cmd.add_option("--boltzmann-t", cfg.boltzmann_t,
                      "Exploration softmax temperature"),
       cfg.boltzmann_t)
      ->capture_default_str();
  bind(cmd.add_option("--gamma", cfg.gamma, "Discount factor"), cfg.gamma)
      ->capture_default_str();
  bind(cmd.add_option("--alpha", cfg.alpha, "Learning rate"), cfg.alpha)
      ->capture_default_str();
  bind(cmd.add_option("--beta", cfg.beta, "Hysteretic negative learning rate"), cfg.beta)
      ->capture_default_str();
  bind(cmd.add_option("--t-max", cfg.t_max, "Initial leniency temperature"), cfg.t_max)
      ->capture_default_str();
  bind(cmd.add_option("--k", cfg.k, "Leniency exponent constant"), cfg.k)
      ->capture_default_str();
  bind(cmd.add_option("--theta", cfg.theta, "Leniency temperature decay"), cfg.theta)
      ->capture_default_str();
  bind(cmd.add_option("--nu", cfg.nu, "Next-observation temperature mix-in"), cfg.nu)
      ->capture_default_str();
  bind(cmd.add_option("--temp-decay", cfg.temp_decay,
                      "Lenient-Q temperature fold multiplier"),
       cfg.temp_decay)
      ->capture_default_str();
  bind(cmd.add_option("--threads", cfg.threads, "Worker threads (0 = hardware)"),
       cfg.threads)
      ->capture_default_str();
  bind(cmd.add_flag("--full-trace", cfg.full_trace, "Persist per-step events in traces"),
       cfg.full_trace);
  return bindings;
}

// key=value lines; blank lines and '#' comments allowed; keys are the long
// flag names without the leading dashes; values given explicitly on the
// command line win over the file.
void apply_config_file(const std::string& path, const ConfigBindings& bindings) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::string at = path + ":" + std::to_string(lineno) + ": ";
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(at + "expected key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = bindings.find(key);
    if (it == bindings.end())
      throw std::invalid_argument(at + "unknown config key '" + key + "'");
    if (it->second.option->count() > 0) continue;
    try {
      it->second.apply(value);
    } catch (const std::exception& e) {
      throw std::invalid_argument(at + key + ": " + e.what());
    }
  }
}

std::map<std::string, std::string> read_config_echo(const fs::path& dir) {
  std::map<std::string, std::string> kv;
  std::ifstream in(dir / "config.txt");
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string fmt_stat(const maibl::MetricStats& s) {
  if (s.count == 0) return "n/a";
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << s.mean << " (" << s.stddev << ")";
  return os.str();
}

void print_summary(std::ostream& os, const maibl::AggregateSummary& s) {
  os << "runs: " << s.runs;
  if (s.runs_without_optimal > 0)
    os << "  (" << s.runs_without_optimal
       << " without optimal deliveries, excluded from step metrics)";
  os << '\n';
  os << "  pmax         " << fmt_stat(s.pmax) << '\n';
  os << "  pcoordinate  " << fmt_stat(s.pcoordinate) << '\n';
  os << "  efficiency   " << fmt_stat(s.efficiency) << '\n';
  os << "  step         " << fmt_stat(s.step) << '\n';
  os << "  mstep        " << fmt_stat(s.mstep) << '\n';
  os << "  dstep        " << fmt_stat(s.dstep) << '\n';
}

int cmd_run(maibl::ExperimentConfig& cfg, const std::string& config_path,
            const ConfigBindings& bindings) {
  try {
    if (!config_path.empty()) apply_config_file(config_path, bindings);
    if (const char* env_dir = std::getenv("MAIBL_OUTPUT_DIR"); env_dir && *env_dir)
      cfg.output_dir = env_dir;
    cfg.validate();
    if (!cfg.map_path.empty()) (void)maibl::GridMap::load(cfg.map_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const maibl::ExperimentResult result = maibl::run_experiment(cfg, std::cerr);
    std::cout << "wrote " << cfg.output_dir << '\n';
    print_summary(std::cout, result.summary);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_metrics(const std::string& input, int scenario_flag, double gamma_flag,
                bool have_scenario, bool have_gamma) {
  try {
    const fs::path dir(input);
    int scenario = 1;
    double gamma = 0.99;
    const auto echo = read_config_echo(dir);
    if (const auto it = echo.find("scenario"); it != echo.end())
      scenario = std::stoi(it->second);
    if (const auto it = echo.find("gamma"); it != echo.end())
      gamma = std::stod(it->second);
    if (have_scenario) scenario = scenario_flag;
    if (have_gamma) gamma = gamma_flag;
    const maibl::Scenario& sc = maibl::Scenario::builtin(scenario);

    std::vector<fs::path> files;
    const fs::path traces_dir = dir / "traces";
    if (!fs::is_directory(traces_dir)) {
      std::cerr << "config error: no traces directory under " << dir << '\n';
      return kExitConfig;
    }
    for (const auto& entry : fs::directory_iterator(traces_dir))
      if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "config error: no trace files in " << traces_dir << '\n';
      return kExitConfig;
    }

    std::vector<maibl::RunMetrics> metrics;
    std::cout << "file,episodes,optimal_episodes,pmax,pcoordinate,efficiency,step,mstep,"
                 "dstep\n";
    for (const fs::path& f : files) {
      const std::vector<maibl::EpisodeTrace> traces =
          maibl::read_trace_file(f.string());
      const maibl::RunMetrics m =
          maibl::summarize_run(traces, sc.optimal_zone(), gamma, sc.expected_optimal());
      metrics.push_back(m);
      std::cout << f.filename().string() << ',' << m.episodes << ','
                << m.optimal_episodes << ',' << m.pmax << ',' << m.pcoordinate << ','
                << m.efficiency << ',';
      if (m.has_step_metrics)
        std::cout << m.step << ',' << m.mstep << ',' << m.dstep;
      else
        std::cout << ",,";
      std::cout << '\n';
    }
    std::cout << '\n';
    print_summary(std::cout, maibl::aggregate(metrics));
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_table(const std::vector<std::string>& inputs) {
  struct Row {
    std::string model, scenario;
    std::map<std::string, std::string> cells;
  };
  std::vector<Row> rows;
  try {
    for (const std::string& input : inputs) {
      const fs::path dir(input);
      Row row;
      const auto echo = read_config_echo(dir);
      row.model = echo.count("model") ? echo.at("model") : dir.filename().string();
      row.scenario = echo.count("scenario") ? echo.at("scenario") : "?";
      std::ifstream in(dir / "summary.csv");
      if (!in) {
        std::cerr << "config error: no summary.csv under " << dir << '\n';
        return kExitConfig;
      }
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string metric, mean, stddev;
        std::getline(ls, metric, ',');
        std::getline(ls, mean, ',');
        std::getline(ls, stddev, ',');
        row.cells[metric] = mean.empty() ? "n/a" : mean + " (" + stddev + ")";
      }
      rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  const std::vector<std::string> metrics = {"pmax", "pcoordinate", "efficiency",
                                            "step", "mstep", "dstep"};
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"model", "scenario"};
  header.insert(header.end(), metrics.begin(), metrics.end());
  grid.push_back(header);
  for (const Row& r : rows) {
    std::vector<std::string> line = {r.model, r.scenario};
    for (const std::string& m : metrics)
      line.push_back(r.cells.count(m) ? r.cells.at(m) : "n/a");
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i)
      widths[i] = std::max(widths[i], line[i].size());
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      std::cout << line[i];
      if (i + 1 < line.size())
        std::cout << std::string(widths[i] - line[i].size() + 2, ' ');
    }
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_validate_map(const std::string& path) {
  try {
    const maibl::GridMap map = maibl::GridMap::load(path);
    int z1 = 0, z2 = 0;
    for (int y = 0; y < map.height(); ++y)
      for (int x = 0; x < map.width(); ++x) {
        const int z = map.zone_at({x, y});
        z1 += z == 1;
        z2 += z == 2;
      }
    std::cout << "OK: " << map.width() << "x" << map.height() << ", item ("
              << map.item_start().x << "," << map.item_start().y << "), agents ("
              << map.agent_start(0).x << "," << map.agent_start(0).y << ") ("
              << map.agent_start(1).x << "," << map.agent_start(1).y
              << "), dropzone cells: zone1=" << z1 << " zone2=" << z2 << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "map error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative transport learning laboratory"};
  app.require_subcommand(1);

  maibl::ExperimentConfig cfg;
  CLI::App* run = app.add_subcommand("run", "Execute an experiment");
  const ConfigBindings bindings = add_config_flags(*run, cfg);
  std::string run_config_path;
  run->add_option("--config", run_config_path,
                  "Config file with key=value lines (flags override)");

  CLI::App* metrics =
      app.add_subcommand("metrics", "Recompute metrics from persisted traces");
  std::string metrics_input;
  int metrics_scenario = 0;
  double metrics_gamma = 0.0;
  metrics->add_option("input", metrics_input, "Experiment output directory")
      ->required();
  CLI::Option* opt_scenario =
      metrics->add_option("--scenario", metrics_scenario, "Override scenario id");
  CLI::Option* opt_gamma =
      metrics->add_option("--gamma", metrics_gamma, "Override discount factor");

  CLI::App* table = app.add_subcommand("table", "Render aggregate summaries as a table");
  std::vector<std::string> table_inputs;
  table->add_option("inputs", table_inputs, "Experiment output directories")
      ->required();

  CLI::App* validate = app.add_subcommand("validate-map", "Parse and check a map file");
  std::string map_path;
  validate->add_option("map", map_path, "Map file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return cmd_run(cfg, run_config_path, bindings);
  if (metrics->parsed())
    return cmd_metrics(metrics_input, metrics_scenario, metrics_gamma,
                       opt_scenario->count() > 0, opt_gamma->count() > 0);
  if (table->parsed()) return cmd_table(table_inputs);
  if (validate->parsed()) return cmd_validate_map(map_path);
  return kExitConfig;
}
