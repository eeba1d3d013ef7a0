#include "bsmg/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bsmg/env.hpp"
#include "bsmg/spec_io.hpp"

namespace bsmg {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad_config(const std::string& msg) {
  throw std::invalid_argument("experiment config: " + msg);
}

AgentOverrides parse_overrides(const Json& j) {
  AgentOverrides o;
  for (const auto& [key, value] : j.items()) {
    if (key == "episodes") o.episodes = value.get<int>();
    else if (key == "max_episode_len") o.max_episode_len = value.get<int>();
    else if (key == "alpha") o.alpha = value.get<double>();
    else if (key == "alpha_schedule") o.alpha_schedule = value.get<std::string>();
    else if (key == "gamma") o.gamma = value.get<double>();
    else if (key == "epsilon_start") o.epsilon_start = value.get<double>();
    else if (key == "epsilon_end") o.epsilon_end = value.get<double>();
    else if (key == "record_every") o.record_every = value.get<int>();
    else if (key == "start_override")
      o.start_override = value.get<std::vector<std::string>>();
    else bad_config("unknown override field '" + key + "'");
  }
  return o;
}

AlphaSchedule schedule_from_name(const std::string& name) {
  if (name == "constant") return AlphaSchedule::constant;
  if (name == "visit_decay") return AlphaSchedule::visit_decay;
  bad_config("unknown alpha_schedule '" + name + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    bad_config(path + " is not valid JSON: " + e.what());
  }
  ExperimentConfig cfg;
  bool saw_instance = false, saw_agents = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "instance") {
      cfg.instance = value.get<std::string>();
      saw_instance = true;
    } else if (key == "agents") {
      for (const auto& name : value)
        cfg.agents.push_back(agent_from_name(name.get<std::string>()));
      saw_agents = true;
    } else if (key == "trials") cfg.trials = value.get<int>();
    else if (key == "base_seed") cfg.base_seed = value.get<std::uint64_t>();
    else if (key == "episodes") cfg.episodes = value.get<int>();
    else if (key == "max_episode_len") cfg.max_episode_len = value.get<int>();
    else if (key == "alpha") cfg.alpha = value.get<double>();
    else if (key == "alpha_schedule")
      cfg.alpha_schedule = value.get<std::string>();
    else if (key == "gamma") cfg.gamma = value.get<double>();
    else if (key == "epsilon_start") cfg.epsilon_start = value.get<double>();
    else if (key == "epsilon_end") cfg.epsilon_end = value.get<double>();
    else if (key == "record_every") cfg.record_every = value.get<int>();
    else if (key == "overrides") {
      for (const auto& [agent, inner] : value.items()) {
        agent_from_name(agent);  // reject unknown agents
        cfg.overrides[agent] = parse_overrides(inner);
      }
    } else bad_config("unknown field '" + key + "'");
  }
  if (!saw_instance) bad_config("missing field 'instance'");
  if (!saw_agents || cfg.agents.empty()) bad_config("no agents requested");
  return cfg;
}

namespace {

struct Row {
  int agent_idx, trial, episode, state;
  double v, wall;
};

LearnerConfig cell_config(const ExperimentConfig& cfg, AgentKind agent,
                          int trial, double instance_discount) {
  LearnerConfig lc;
  lc.agent = agent;
  lc.episodes = cfg.episodes;
  lc.max_episode_len = cfg.max_episode_len;
  lc.alpha = cfg.alpha;
  lc.alpha_schedule = schedule_from_name(cfg.alpha_schedule);
  lc.gamma = cfg.gamma < 0.0 ? instance_discount : cfg.gamma;
  lc.epsilon_start = cfg.epsilon_start;
  lc.epsilon_end = cfg.epsilon_end;
  lc.record_every = cfg.record_every;
  auto it = cfg.overrides.find(agent_name(agent));
  if (it != cfg.overrides.end()) {
    const AgentOverrides& o = it->second;
    if (o.episodes) lc.episodes = *o.episodes;
    if (o.max_episode_len) lc.max_episode_len = *o.max_episode_len;
    if (o.alpha) lc.alpha = *o.alpha;
    if (o.alpha_schedule) lc.alpha_schedule = schedule_from_name(*o.alpha_schedule);
    if (o.gamma) lc.gamma = *o.gamma;
    if (o.epsilon_start) lc.epsilon_start = *o.epsilon_start;
    if (o.epsilon_end) lc.epsilon_end = *o.epsilon_end;
    if (o.record_every) lc.record_every = *o.record_every;
  }
  lc.seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
  return lc;
}

std::vector<Row> run_cell(const ExperimentConfig& cfg, const GameSpec& spec,
                          int agent_idx, int trial) {
  const AgentKind agent = cfg.agents[agent_idx];
  const LearnerConfig lc = cell_config(cfg, agent, trial, spec.discount);
  const std::uint64_t env_seed =
      cfg.base_seed + 1000003ull * (agent_idx + 1) + trial;
  Environment env = load_env(cfg.instance, Exposure::public_api, env_seed);
  auto it = cfg.overrides.find(agent_name(agent));
  if (it != cfg.overrides.end() && !it->second.start_override.empty()) {
    std::vector<int> states;
    for (const auto& name : it->second.start_override) {
      int s = spec.state_index(name);
      if (s < 0) bad_config("start_override names unknown state " + name);
      states.push_back(s);
    }
    env.override_start_states(states);
  }
  const auto t0 = std::chrono::steady_clock::now();
  LearnResult res = run_agent(env, lc, &spec);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::vector<Row> rows;
  for (std::size_t r = 0; r < res.curve.episodes.size(); ++r) {
    for (int s = 0; s < spec.num_states(); ++s) {
      rows.push_back({agent_idx, trial, res.curve.episodes[r], s,
                      res.curve.v_defender[r][s], wall});
    }
  }
  return rows;
}

double mean_of(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  return xs.empty() ? 0.0 : m / xs.size();
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / (xs.size() - 1));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  if (cfg.trials <= 0) bad_config("trials must be positive");
  if (cfg.episodes <= 0) bad_config("episodes must be positive");
  if (cfg.max_episode_len <= 0) bad_config("max_episode_len positive");
  schedule_from_name(cfg.alpha_schedule);
  for (const auto& entry : cfg.overrides) {
    if (entry.second.alpha_schedule)
      schedule_from_name(*entry.second.alpha_schedule);
  }
  EnvExtensions ext;
  GameSpec spec = load_spec(cfg.instance, &ext);
  {
    // Surface wrapper-level problems (domain shape, start overrides, agent
    // compatibility) before any cell runs.
    Environment probe = load_env(cfg.instance, Exposure::public_api, 0);
    (void)probe;
    for (AgentKind agent : cfg.agents) {
      if (agent == AgentKind::nashq && spec.num_types() != 1)
        bad_config("nashq needs a single attacker type");
      if (agent == AgentKind::sopt) (void)sopt_policy(spec);
      auto it = cfg.overrides.find(agent_name(agent));
      if (it != cfg.overrides.end())
        for (const auto& name : it->second.start_override)
          if (spec.state_index(name) < 0)
            bad_config("start_override names unknown state " + name);
    }
  }

  const int cells = static_cast<int>(cfg.agents.size()) * cfg.trials;
  std::vector<std::vector<Row>> per_cell(cells);
  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
    for (int c = 0; c < cells; ++c)
      per_cell[c] = run_cell(cfg, spec, c / cfg.trials, c % cfg.trials);
#else
    jobs = 1;
#endif
  }
  if (jobs <= 1) {
    for (int c = 0; c < cells; ++c)
      per_cell[c] = run_cell(cfg, spec, c / cfg.trials, c % cfg.trials);
  }

  std::vector<Row> rows;
  for (auto& part : per_cell)
    rows.insert(rows.end(), part.begin(), part.end());
  std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    const std::string& an = agent_name(cfg.agents[a.agent_idx]);
    const std::string& bn = agent_name(cfg.agents[b.agent_idx]);
    if (an != bn) return an < bn;
    if (a.trial != b.trial) return a.trial < b.trial;
    if (a.episode != b.episode) return a.episode < b.episode;
    return a.state < b.state;
  });

  ExperimentResult out;
  out.states = spec.states;
  // Records promise byte-identical emission for a fixed (config, seed), so
  // the per-row wall_time_s column is pinned to zero; measured timing is
  // per-trial and lives in the summary instead.
  for (const Row& r : rows) {
    out.records.push_back({r.trial, r.episode, spec.states[r.state],
                           agent_name(cfg.agents[r.agent_idx]), r.v, 0.0});
  }

  for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai) {
    AgentSummary sum;
    sum.agent = agent_name(cfg.agents[ai]);
    std::vector<double> walls;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto& cell = per_cell[ai * cfg.trials + trial];
      if (!cell.empty()) walls.push_back(cell.front().wall);
    }
    const int last_ep = [&] {
      int ep = 0;
      for (const auto& cell : per_cell)
        for (const Row& r : cell)
          if (agent_name(cfg.agents[r.agent_idx]) == sum.agent)
            ep = std::max(ep, r.episode);
      return ep;
    }();
    for (int s = 0; s < spec.num_states(); ++s) {
      std::vector<double> finals;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        for (const Row& r : per_cell[ai * cfg.trials + trial]) {
          if (r.episode == last_ep && r.state == s) finals.push_back(r.v);
        }
      }
      sum.mean_final.push_back(mean_of(finals));
      sum.std_final.push_back(std_of(finals));
    }
    sum.wall_mean = mean_of(walls);
    sum.wall_std = std_of(walls);
    out.summary.push_back(std::move(sum));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "trial,episode,state,agent,v_defender,wall_time_s\n";
  for (const RunRecord& r : records) {
    out << r.trial << ',' << r.episode << ',' << csv_field(r.state) << ','
        << csv_field(r.agent) << ',' << format_double(r.v_defender, "%.17g")
        << ',' << format_double(r.wall_time_s, "%.6f") << '\n';
  }
}

namespace {

const char* agent_color(const std::string& agent) {
  if (agent == "bssq") return "#1f77b4";
  if (agent == "urs") return "#ff7f0e";
  if (agent == "bexpq") return "#2ca02c";
  if (agent == "sopt") return "#d62728";
  if (agent == "nashq") return "#9467bd";
  return "#7f7f7f";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string file_token(const std::string& s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (gap && !out.empty()) out += '_';
      gap = false;
      out += c;
    } else {
      gap = true;
    }
  }
  return out.empty() ? "state" : out;
}

struct Series {
  std::string agent;
  std::vector<int> episodes;
  std::vector<double> mean, dev;
};

}  // namespace

void emit_plots(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const std::string& state : result.states) {
    // Collapse trials into mean and std per (agent, episode).
    std::vector<Series> series;
    {
      std::map<std::string, std::map<int, std::vector<double>>> acc;
      for (const RunRecord& r : result.records)
        if (r.state == state) acc[r.agent][r.episode].push_back(r.v_defender);
      for (const auto& [agent, by_ep] : acc) {
        Series s;
        s.agent = agent;
        for (const auto& [ep, vals] : by_ep) {
          s.episodes.push_back(ep);
          s.mean.push_back(mean_of(vals));
          s.dev.push_back(std_of(vals));
        }
        series.push_back(std::move(s));
      }
    }
    if (series.empty()) continue;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
      for (std::size_t k = 0; k < s.episodes.size(); ++k) {
        xmin = std::min(xmin, double(s.episodes[k]));
        xmax = std::max(xmax, double(s.episodes[k]));
        ymin = std::min(ymin, s.mean[k] - s.dev[k]);
        ymax = std::max(ymax, s.mean[k] + s.dev[k]);
      }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) {
      ymin -= 1;
      ymax += 1;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double W = 760, H = 440, L = 70, R = 600, T = 40, B = 390;
    auto px = [&](double ep) { return L + (ep - xmin) / (xmax - xmin) * (R - L); };
    auto py = [&](double v) { return B - (v - ymin) / (ymax - ymin) * (B - T); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
        << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << (L + R) / 2 << "\" y=\"22\" font-family=\"sans-serif\""
        << " font-size=\"15\" text-anchor=\"middle\">" << xml_escape(state)
        << "</text>\n";

    for (int k = 0; k <= 4; ++k) {
      const double v = ymin + k * (ymax - ymin) / 4;
      const double y = py(v);
      svg << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << R
          << "\" y2=\"" << y << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      svg << "<text x=\"" << L - 8 << "\" y=\"" << y + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\""
          << " text-anchor=\"end\">" << format_double(v, "%.4g")
          << "</text>\n";
      const double ep = xmin + k * (xmax - xmin) / 4;
      const double x = px(ep);
      svg << "<text x=\"" << x << "\" y=\"" << B + 18
          << "\" font-family=\"sans-serif\" font-size=\"11\""
          << " text-anchor=\"middle\">" << format_double(ep, "%.4g")
          << "</text>\n";
    }
    svg << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R
        << "\" y2=\"" << B << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L
        << "\" y2=\"" << B << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << (L + R) / 2 << "\" y=\"" << H - 12
        << "\" font-family=\"sans-serif\" font-size=\"12\""
        << " text-anchor=\"middle\">episode</text>\n";
    svg << "<text x=\"18\" y=\"" << (T + B) / 2
        << "\" font-family=\"sans-serif\" font-size=\"12\""
        << " text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (T + B) / 2 << ")\">defender value</text>\n";

    int legend = 0;
    for (const Series& s : series) {
      const char* color = agent_color(s.agent);
      std::ostringstream band, line;
      for (std::size_t k = 0; k < s.episodes.size(); ++k) {
        band << px(s.episodes[k]) << ',' << py(s.mean[k] + s.dev[k]) << ' ';
        line << px(s.episodes[k]) << ',' << py(s.mean[k]) << ' ';
      }
      for (std::size_t k = s.episodes.size(); k-- > 0;)
        band << px(s.episodes[k]) << ',' << py(s.mean[k] - s.dev[k]) << ' ';
      svg << "<polygon points=\"" << band.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
      svg << "<polyline points=\"" << line.str() << "\" fill=\"none\""
          << " stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
      const double ly = T + 14 + 20 * legend++;
      svg << "<rect x=\"" << R + 14 << "\" y=\"" << ly - 9
          << "\" width=\"14\" height=\"14\" fill=\"" << color << "\"/>\n";
      svg << "<text x=\"" << R + 34 << "\" y=\"" << ly + 2
          << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << xml_escape(s.agent) << "</text>\n";
    }
    svg << "</svg>\n";

    const fs::path path = fs::path(dir) / ("state_" + file_token(state) + ".svg");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << svg.str();
  }
}

std::string summary_text(const ExperimentResult& result) {
  std::ostringstream out;
  out << "final defender value per state (mean +- std across trials)\n";
  for (const AgentSummary& sum : result.summary) {
    for (std::size_t s = 0; s < result.states.size(); ++s) {
      char line[256];
      std::snprintf(line, sizeof(line), "%-6s %-20s %12.6f +- %.6f\n",
                    sum.agent.c_str(), result.states[s].c_str(),
                    sum.mean_final[s], sum.std_final[s]);
      out << line;
    }
  }
  out << "wall time per trial (mean +- std)\n";
  for (const AgentSummary& sum : result.summary) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-6s %10.3fs +- %.3fs\n",
                  sum.agent.c_str(), sum.wall_mean, sum.wall_std);
    out << line;
  }
  return out.str();
}

}  // namespace bsmg
