#include "maibl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "maibl/maibl_agent.hpp"
#include "maibl/tabular.hpp"

namespace fs = std::filesystem;

namespace maibl {
namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form; keeps every persisted file deterministic
// and re-parsable without loss.
std::string fmt(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

bool is_known_model(const std::string& model) {
  for (const char* id : kModelIds)
    if (model == id) return true;
  return false;
}

bool is_maibl_model(const std::string& model) { return model.ends_with("-maibl"); }

MemoryParams memory_params(const ExperimentConfig& c) {
  MemoryParams p = MemoryParams::make(c.decay, c.noise, c.default_utility);
  if (c.tau > 0.0) p.tau = c.tau;
  return p;
}

struct EpisodePoint {
  double optimal = 0.0;  // 1 when delivered to the optimal zone
  double coordination = 0.0;
  double efficiency = 0.0;
  long steps = 0;
  double reward = 0.0;
};

struct WorkerResult {
  bool failed = false;
  std::string error;
  RunMetrics metrics;
  std::vector<EpisodePoint> points;
};

void require(std::ostream& os, const std::string& path) {
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_trace_file(const std::string& path, const std::vector<EpisodeTrace>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const EpisodeTrace& t : traces) out << trace_to_json(t) << '\n';
  out.flush();
  require(out, path);
}

// Trailing-window mean over the last up-to-50 entries, via prefix sums.
double window50(const std::vector<double>& prefix, std::size_t e) {
  const std::size_t lo = e >= 50 ? e - 50 : 0;
  return (prefix[e] - prefix[lo]) / static_cast<double>(e - lo);
}

void write_run_curve(const std::string& path, const std::vector<EpisodePoint>& pts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "episode,optimal,steps,reward,pmax_running,pmax_window50,"
         "pcoordinate_running,pcoordinate_window50,efficiency_running,"
         "efficiency_window50\n";
  const std::size_t n = pts.size();
  std::vector<double> p_opt(n + 1, 0.0), p_coord(n + 1, 0.0), p_eff(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    p_opt[i + 1] = p_opt[i] + pts[i].optimal;
    p_coord[i + 1] = p_coord[i] + pts[i].coordination;
    p_eff[i + 1] = p_eff[i] + pts[i].efficiency;
  }
  for (std::size_t e = 1; e <= n; ++e) {
    const double inv = 1.0 / static_cast<double>(e);
    out << e << ',' << fmt(pts[e - 1].optimal) << ',' << pts[e - 1].steps << ','
        << fmt(pts[e - 1].reward) << ',' << fmt(p_opt[e] * inv) << ','
        << fmt(window50(p_opt, e)) << ',' << fmt(p_coord[e] * inv) << ','
        << fmt(window50(p_coord, e)) << ',' << fmt(p_eff[e] * inv) << ','
        << fmt(window50(p_eff, e)) << '\n';
  }
  out.flush();
  require(out, path);
}

std::string run_file_stem(int run) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "run_%03d", run);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!is_known_model(model))
    throw std::invalid_argument("config: unknown model '" + model + "'");
  if (scenario < 1 || scenario > 4)
    throw std::invalid_argument("config: scenario must be 1..4");
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (step_limit < 0) throw std::invalid_argument("config: step_limit must be >= 0");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (tau < 0.0) throw std::invalid_argument("config: tau must be >= 0");
  memory_params(*this).validate();
  (void)ExplorationSchedule::make(epsilon0, eta, boltzmann_t);
  TDParams td{gamma, alpha, beta};
  if (model == "hysteretic-maibl" || model == "hysteretic-q")
    td.validate_hysteretic();
  else
    td.validate_greedy();
  LeniencyParams{t_max, k, theta, nu}.validate();
  LeniencyParams{t_max, k, temp_decay, nu}.validate();
}

std::uint64_t env_seed(const ExperimentConfig& config, int run_index) {
  return derive_seed(config.seed, "env", static_cast<std::uint64_t>(run_index));
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, int agent_index,
                                  int run_index) {
  const std::uint64_t seed =
      derive_seed(config.seed, agent_index == 0 ? "agent0" : "agent1",
                  static_cast<std::uint64_t>(run_index));
  ExplorationSchedule sched;
  sched.epsilon0 = config.epsilon0;
  sched.eta = config.eta;
  sched.temperature = config.boltzmann_t;
  const TDParams td{config.gamma, config.alpha, config.beta};

  if (is_maibl_model(config.model)) {
    MaiblConfig mc;
    mc.memory = memory_params(config);
    mc.exploration = sched;
    mc.td = td;
    mc.leniency = LeniencyParams{config.t_max, config.k, config.theta, config.nu};
    const MaiblVariant v = config.model == "greedy-maibl" ? MaiblVariant::greedy
                           : config.model == "hysteretic-maibl"
                               ? MaiblVariant::hysteretic
                               : MaiblVariant::lenient;
    return std::make_unique<MaiblAgent>(v, mc, seed);
  }
  TabularConfig tc;
  tc.exploration = sched;
  tc.td = td;
  tc.leniency = LeniencyParams{config.t_max, config.k, config.temp_decay, config.nu};
  const TabularVariant v = config.model == "q" ? TabularVariant::q
                           : config.model == "hysteretic-q" ? TabularVariant::hysteretic_q
                                                            : TabularVariant::lenient_q;
  return std::make_unique<TabularAgent>(v, tc, seed);
}

RunOutcome execute_run(const ExperimentConfig& config, int run_index) {
  RunOutcome out;
  out.run = run_index;
  const GridMap map =
      config.map_path.empty() ? GridMap::default_map() : GridMap::load(config.map_path);
  const Scenario& scenario = Scenario::builtin(config.scenario);
  CmotpEnv env(map, scenario, env_seed(config, run_index));
  std::unique_ptr<Agent> a0 = make_agent(config, 0, run_index);
  std::unique_ptr<Agent> a1 = make_agent(config, 1, run_index);
  out.traces.reserve(static_cast<std::size_t>(config.episodes));
  for (int e = 1; e <= config.episodes; ++e)
    out.traces.push_back(
        run_episode(env, *a0, *a1, config.step_limit, e, config.full_trace));
  out.metrics = summarize_run(out.traces, scenario.optimal_zone(), config.gamma,
                              scenario.expected_optimal());
  return out;
}

namespace {

void write_config_echo(const std::string& path, const ExperimentConfig& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "model=" << c.model << '\n'
      << "scenario=" << c.scenario << '\n'
      << "runs=" << c.runs << '\n'
      << "episodes=" << c.episodes << '\n'
      << "step_limit=" << c.step_limit << '\n'
      << "seed=" << c.seed << '\n'
      << "map_path=" << c.map_path << '\n'
      << "decay=" << fmt(c.decay) << '\n'
      << "noise=" << fmt(c.noise) << '\n'
      << "default_utility=" << fmt(c.default_utility) << '\n'
      << "tau=" << fmt(c.tau) << '\n'
      << "epsilon0=" << fmt(c.epsilon0) << '\n'
      << "eta=" << fmt(c.eta) << '\n'
      << "boltzmann_t=" << fmt(c.boltzmann_t) << '\n'
      << "gamma=" << fmt(c.gamma) << '\n'
      << "alpha=" << fmt(c.alpha) << '\n'
      << "beta=" << fmt(c.beta) << '\n'
      << "t_max=" << fmt(c.t_max) << '\n'
      << "k=" << fmt(c.k) << '\n'
      << "theta=" << fmt(c.theta) << '\n'
      << "nu=" << fmt(c.nu) << '\n'
      << "temp_decay=" << fmt(c.temp_decay) << '\n'
      << "full_trace=" << (c.full_trace ? 1 : 0) << '\n';
  out.flush();
  require(out, path);
}

void append_metric_cell(std::string& row, const RunMetrics& m) {
  row += fmt(m.pmax);
  row += ',';
  row += fmt(m.pcoordinate);
  row += ',';
  row += fmt(m.efficiency);
  row += ',';
  if (m.has_step_metrics) {
    row += fmt(m.step);
    row += ',';
    row += fmt(m.mstep);
    row += ',';
    row += fmt(m.dstep);
  } else {
    row += ",,";
  }
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  // Fail fast on bad inputs before any worker starts.
  if (!config.map_path.empty())
    (void)GridMap::load(config.map_path);
  else
    (void)GridMap::default_map();
  (void)Scenario::builtin(config.scenario);

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir / "traces");
  fs::create_directories(out_dir / "curves");
  write_config_echo((out_dir / "config.txt").string(), config);

  const int runs = config.runs;
  std::vector<WorkerResult> results(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};

  auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= runs) return;
      WorkerResult& slot = results[static_cast<std::size_t>(r)];
      try {
        RunOutcome run = execute_run(config, r);
        slot.metrics = run.metrics;
        const Scenario& scenario = Scenario::builtin(config.scenario);
        slot.points.reserve(run.traces.size());
        for (const EpisodeTrace& t : run.traces) {
          EpisodePoint p;
          p.steps = t.steps;
          p.reward = t.reward;
          if (t.delivered && t.zone == scenario.optimal_zone()) {
            p.optimal = 1.0;
            p.coordination = static_cast<double>(t.joint_move_steps) /
                             static_cast<double>(t.carrying_steps);
            p.efficiency = efficiency_contribution(config.gamma, t.steps, t.reward,
                                                   scenario.expected_optimal());
          }
          slot.points.push_back(p);
        }
        const std::string stem = run_file_stem(r);
        write_trace_file((out_dir / "traces" / (stem + ".jsonl")).string(), run.traces);
        write_run_curve((out_dir / "curves" / (stem + ".csv")).string(), slot.points);
      } catch (const std::exception& e) {
        slot.failed = true;
        slot.error = e.what();
      }
    }
  };

  unsigned pool = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                     : std::thread::hardware_concurrency();
  if (pool == 0) pool = 1;
  pool = std::min<unsigned>(pool, static_cast<unsigned>(runs));
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned i = 0; i < pool; ++i) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }

  ExperimentResult result;
  std::vector<RunMetrics> ok_metrics;
  for (int r = 0; r < runs; ++r) {
    const WorkerResult& w = results[static_cast<std::size_t>(r)];
    RunOutcome o;
    o.run = r;
    o.failed = w.failed;
    o.error = w.error;
    o.metrics = w.metrics;
    result.runs.push_back(std::move(o));
    if (w.failed) {
      ++result.failed_runs;
      log << "warning: run " << r << " failed and is excluded: " << w.error << '\n';
    } else {
      ok_metrics.push_back(w.metrics);
    }
  }
  if (ok_metrics.empty()) throw std::runtime_error("all runs failed");

  {
    std::ofstream out(out_dir / "summary_runs.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: summary_runs.csv");
    out << "run,status,episodes,optimal_episodes,pmax,pcoordinate,efficiency,step,"
           "mstep,dstep,error\n";
    for (int r = 0; r < runs; ++r) {
      const WorkerResult& w = results[static_cast<std::size_t>(r)];
      std::string row = std::to_string(r);
      row += w.failed ? ",failed," : ",ok,";
      if (w.failed) {
        row += ",,,,,,,";
        row += sanitize(w.error);
      } else {
        row += std::to_string(w.metrics.episodes);
        row += ',';
        row += std::to_string(w.metrics.optimal_episodes);
        row += ',';
        append_metric_cell(row, w.metrics);
        row += ',';
      }
      out << row << '\n';
    }
    out.flush();
    require(out, "summary_runs.csv");
  }

  result.summary = aggregate(ok_metrics);
  {
    std::ofstream out(out_dir / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: summary.csv");
    out << "metric,mean,stddev,stderr,runs,excluded_runs\n";
    const auto row = [&](const char* name, const MetricStats& s, long excluded) {
      out << name << ',' << fmt(s.mean) << ',' << fmt(s.stddev) << ',' << fmt(s.stderror)
          << ',' << s.count << ',' << excluded << '\n';
    };
    row("pmax", result.summary.pmax, 0);
    row("pcoordinate", result.summary.pcoordinate, 0);
    row("efficiency", result.summary.efficiency, 0);
    row("step", result.summary.step, result.summary.runs_without_optimal);
    row("mstep", result.summary.mstep, result.summary.runs_without_optimal);
    row("dstep", result.summary.dstep, result.summary.runs_without_optimal);
    out.flush();
    require(out, "summary.csv");
  }

  {
    std::ofstream out(out_dir / "curves_mean.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: curves_mean.csv");
    out << "episode,pmax_mean,pmax_window50,pcoordinate_mean,pcoordinate_window50,"
           "efficiency_mean,efficiency_window50\n";
    const std::size_t episodes = static_cast<std::size_t>(config.episodes);
    std::vector<double> p_opt(episodes + 1, 0.0), p_coord(episodes + 1, 0.0),
        p_eff(episodes + 1, 0.0);
    const double inv_runs = 1.0 / static_cast<double>(ok_metrics.size());
    for (std::size_t e = 0; e < episodes; ++e) {
      double opt = 0.0, coord = 0.0, eff = 0.0;
      for (int r = 0; r < runs; ++r) {
        const WorkerResult& w = results[static_cast<std::size_t>(r)];
        if (w.failed) continue;
        opt += w.points[e].optimal;
        coord += w.points[e].coordination;
        eff += w.points[e].efficiency;
      }
      opt *= inv_runs;
      coord *= inv_runs;
      eff *= inv_runs;
      p_opt[e + 1] = p_opt[e] + opt;
      p_coord[e + 1] = p_coord[e] + coord;
      p_eff[e + 1] = p_eff[e] + eff;
      out << (e + 1) << ',' << fmt(opt) << ',' << fmt(window50(p_opt, e + 1)) << ','
          << fmt(coord) << ',' << fmt(window50(p_coord, e + 1)) << ',' << fmt(eff) << ','
          << fmt(window50(p_eff, e + 1)) << '\n';
    }
    out.flush();
    require(out, "curves_mean.csv");
  }

  return result;
}

std::string trace_to_json(const EpisodeTrace& t) {
  ordered_json j;
  j["episode"] = t.episode;
  j["delivered"] = t.delivered;
  j["zone"] = t.zone;
  j["steps"] = t.steps;
  j["grasp"] = {t.grasp_step[0], t.grasp_step[1]};
  j["joint_moves"] = t.joint_move_steps;
  j["carrying_steps"] = t.carrying_steps;
  j["reward"] = t.reward;
  if (!t.step_records.empty()) {
    ordered_json events = ordered_json::array();
    for (const StepRecord& s : t.step_records) {
      ordered_json e;
      e["a"] = {s.actions[0], s.actions[1]};
      e["p0"] = {s.agents[0].x, s.agents[0].y};
      e["p1"] = {s.agents[1].x, s.agents[1].y};
      e["item"] = {s.item.x, s.item.y};
      e["phase"] = s.phase;
      e["pen"] = {s.penalty[0], s.penalty[1]};
      e["team"] = s.team_reward;
      e["jm"] = s.joint_move;
      e["mc"] = s.miscoordination;
      e["pu"] = s.picked_up;
      e["dv"] = s.delivered;
      e["z"] = s.zone;
      events.push_back(std::move(e));
    }
    j["events"] = std::move(events);
  }
  return j.dump();
}

EpisodeTrace trace_from_json(const std::string& line) {
  const ordered_json j = ordered_json::parse(line);
  EpisodeTrace t;
  t.episode = j.at("episode").get<int>();
  t.delivered = j.at("delivered").get<bool>();
  t.zone = j.at("zone").get<int>();
  t.steps = j.at("steps").get<long>();
  t.grasp_step[0] = j.at("grasp").at(0).get<long>();
  t.grasp_step[1] = j.at("grasp").at(1).get<long>();
  t.joint_move_steps = j.at("joint_moves").get<long>();
  t.carrying_steps = j.at("carrying_steps").get<long>();
  t.reward = j.at("reward").get<double>();
  if (j.contains("events")) {
    for (const auto& e : j.at("events")) {
      StepRecord s;
      s.actions[0] = e.at("a").at(0).get<int>();
      s.actions[1] = e.at("a").at(1).get<int>();
      s.agents[0] = {e.at("p0").at(0).get<int>(), e.at("p0").at(1).get<int>()};
      s.agents[1] = {e.at("p1").at(0).get<int>(), e.at("p1").at(1).get<int>()};
      s.item = {e.at("item").at(0).get<int>(), e.at("item").at(1).get<int>()};
      s.phase = e.at("phase").get<int>();
      s.penalty[0] = e.at("pen").at(0).get<double>();
      s.penalty[1] = e.at("pen").at(1).get<double>();
      s.team_reward = e.at("team").get<double>();
      s.joint_move = e.at("jm").get<bool>();
      s.miscoordination = e.at("mc").get<bool>();
      s.picked_up = e.at("pu").get<bool>();
      s.delivered = e.at("dv").get<bool>();
      s.zone = e.at("z").get<int>();
      t.step_records.push_back(s);
    }
  }
  return t;
}

std::vector<EpisodeTrace> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::vector<EpisodeTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    traces.push_back(trace_from_json(line));
  }
  return traces;
}

}  // namespace maibl
