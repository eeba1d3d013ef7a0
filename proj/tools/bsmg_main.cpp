#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsmg/env.hpp"
#include "bsmg/game.hpp"
#include "bsmg/generator.hpp"
#include "bsmg/harness.hpp"
#include "bsmg/instances.hpp"
#include "bsmg/learners.hpp"
#include "bsmg/oracle.hpp"
#include "bsmg/spec_io.hpp"
#include "bsmg/stage_solver.hpp"

namespace {

using Json = nlohmann::ordered_json;

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

int cmd_validate(const std::string& path) {
  bsmg::GameSpec spec = bsmg::load_spec_unchecked(path);
  bsmg::ValidationReport report = bsmg::validate(spec);
  if (!report.ok()) {
    for (const auto& v : report.violations)
      std::cout << "violation: " << v << "\n";
    return 1;
  }
  std::printf("OK: %d states, %d attacker types, %zu start states, discount %g\n",
              spec.num_states(), spec.num_types(), spec.start_states.size(),
              spec.discount);
  return 0;
}

int cmd_solve(const std::string& path, const std::string& state,
              const std::string& out_path) {
  bsmg::GameSpec spec = bsmg::load_spec(path);
  const int s = spec.state_index(state);
  if (s < 0) throw std::runtime_error("unknown state '" + state + "'");
  bsmg::SseSolution sol = bsmg::solve_bsse(bsmg::immediate_stage_game(spec, s));

  std::printf("state: %s\n", state.c_str());
  for (int d = 0; d < spec.num_defender_actions(s); ++d) {
    if (sol.x[d] > 1e-12)
      std::printf("x(%s) = %.6f\n", spec.defender_actions[s][d].c_str(),
                  sol.x[d]);
  }
  for (int i = 0; i < spec.num_types(); ++i) {
    std::printf("response(%s) = %s   v_follower = %.6f\n",
                spec.attacker_types[i].c_str(),
                spec.attacker_actions[s][i][sol.responses[i]].c_str(),
                sol.v_followers[i]);
  }
  std::printf("v_leader = %.6f\n", sol.v_leader);

  Json j;
  j["state"] = state;
  Json x = Json::object();
  for (int d = 0; d < spec.num_defender_actions(s); ++d)
    x[spec.defender_actions[s][d]] = sol.x[d];
  j["x"] = std::move(x);
  Json resp = Json::object(), vf = Json::object();
  for (int i = 0; i < spec.num_types(); ++i) {
    resp[spec.attacker_types[i]] = spec.attacker_actions[s][i][sol.responses[i]];
    vf[spec.attacker_types[i]] = sol.v_followers[i];
  }
  j["responses"] = std::move(resp);
  j["v_leader"] = sol.v_leader;
  j["v_followers"] = std::move(vf);
  write_json(j, out_path);
  return 0;
}

int cmd_oracle(const std::string& path, double tol, int max_iter,
               const std::string& out_path, bool serial) {
  bsmg::GameSpec spec = bsmg::load_spec(path);
  bsmg::PlanResult res = bsmg::value_iteration(
      spec, tol, max_iter, serial ? bsmg::Exec::serial : bsmg::Exec::parallel);
  for (int s = 0; s < spec.num_states(); ++s)
    std::printf("V^D(%s) = %.6f\n", spec.states[s].c_str(),
                res.values.v_defender[s]);
  std::printf("iterations = %d (%s)\n", res.iterations,
              res.converged ? "converged" : "not converged");

  Json j;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  Json vd = Json::object(), va = Json::object(), leader = Json::object(),
       responses = Json::object();
  for (int s = 0; s < spec.num_states(); ++s) {
    const std::string& name = spec.states[s];
    vd[name] = res.values.v_defender[s];
    Json per_type = Json::object();
    for (int i = 0; i < spec.num_types(); ++i)
      per_type[spec.attacker_types[i]] = res.values.v_attacker[s][i];
    va[name] = std::move(per_type);
    Json mix = Json::object();
    for (int d = 0; d < spec.num_defender_actions(s); ++d)
      mix[spec.defender_actions[s][d]] = res.profile.leader[s][d];
    leader[name] = std::move(mix);
    Json resp = Json::object();
    if (!spec.is_terminal(s)) {
      for (int i = 0; i < spec.num_types(); ++i)
        resp[spec.attacker_types[i]] =
            spec.attacker_actions[s][i][res.profile.followers[s][i]];
    }
    responses[name] = std::move(resp);
  }
  j["v_defender"] = std::move(vd);
  j["v_attacker"] = std::move(va);
  j["leader"] = std::move(leader);
  j["responses"] = std::move(responses);
  write_json(j, out_path);
  if (!res.converged) {
    std::fprintf(stderr, "warning: no fixed point within %d sweeps\n",
                 max_iter);
    return 1;
  }
  return 0;
}

int cmd_learn(const std::string& path, const bsmg::LearnerConfig& cfg,
              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  bsmg::Environment env = bsmg::load_env(path, bsmg::Exposure::public_api,
                                         cfg.seed ^ 0x5EEDBA5Eull);
  bsmg::GameSpec spec = bsmg::load_spec(path);
  bsmg::LearnResult res = bsmg::run_agent(env, cfg, &spec);

  const std::string agent = bsmg::agent_name(cfg.agent);
  std::vector<bsmg::RunRecord> records;
  for (std::size_t r = 0; r < res.curve.episodes.size(); ++r) {
    for (std::size_t s = 0; s < env.get_states().size(); ++s) {
      records.push_back({0, res.curve.episodes[r], env.get_states()[s], agent,
                         res.curve.v_defender[r][s], 0.0});
    }
  }
  bsmg::emit_csv(records, (fs::path(out_dir) / "records.csv").string());

  Json j;
  Json leader = Json::object(), followers = Json::object(), vd = Json::object();
  const bsmg::ActionSets& acts = env.get_actions();
  for (std::size_t s = 0; s < env.get_states().size(); ++s) {
    const std::string& name = env.get_states()[s];
    Json mix = Json::object();
    for (std::size_t d = 0; d < acts.defender.size(); ++d)
      mix[acts.defender[d]] = res.profile.leader[s][d];
    leader[name] = std::move(mix);
    Json resp = Json::object();
    if (!env.is_end(static_cast<int>(s))) {
      for (int i = 0; i < env.num_types(); ++i)
        resp[env.type_names()[i]] =
            acts.attacker[i][res.profile.followers[s][i]];
    }
    followers[name] = std::move(resp);
    vd[name] = res.values.v_defender[s];
    std::printf("V^D(%s) = %.6f\n", name.c_str(), res.values.v_defender[s]);
  }
  j["agent"] = agent;
  j["leader"] = std::move(leader);
  j["followers"] = std::move(followers);
  j["v_defender"] = std::move(vd);
  write_json(j, (fs::path(out_dir) / "profile.json").string());
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir,
                int jobs) {
  namespace fs = std::filesystem;
  bsmg::ExperimentConfig cfg = bsmg::load_experiment_config(config_path);
  bsmg::ExperimentResult result = bsmg::run_experiment(cfg, jobs);
  fs::create_directories(out_dir);
  bsmg::emit_csv(result.records, (fs::path(out_dir) / "records.csv").string());
  bsmg::emit_plots(result, (fs::path(out_dir) / "plots").string());
  const std::string text = bsmg::summary_text(result);
  std::ofstream summary(fs::path(out_dir) / "summary.txt");
  summary << text;
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Stackelberg Markov game toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  std::string validate_path;
  validate->add_option("instance", validate_path, "instance JSON file")
      ->required();
  validate->callback([&] { rc = cmd_validate(validate_path); });

  auto* solve = app.add_subcommand(
      "solve", "Stage commitment from immediate utilities at one state");
  std::string solve_path, solve_state, solve_out = "bsse_solution.json";
  solve->add_option("instance", solve_path, "instance JSON file")->required();
  solve->add_option("--state", solve_state, "state name")->required();
  solve->add_option("--out", solve_out, "result JSON path");
  solve->callback([&] { rc = cmd_solve(solve_path, solve_state, solve_out); });

  auto* oracle = app.add_subcommand("oracle", "Exact planning fixed point");
  std::string oracle_path, oracle_out = "oracle_result.json";
  double oracle_tol = 1e-6;
  int oracle_iters = 1000;
  bool oracle_serial = false;
  oracle->add_option("instance", oracle_path, "instance JSON file")->required();
  oracle->add_option("--tol", oracle_tol, "sup-norm stop tolerance");
  oracle->add_option("--max-iter", oracle_iters, "sweep limit");
  oracle->add_option("--out", oracle_out, "result JSON path");
  oracle->add_flag("--serial", oracle_serial, "disable the parallel backup");
  oracle->callback([&] {
    rc = cmd_oracle(oracle_path, oracle_tol, oracle_iters, oracle_out,
                    oracle_serial);
  });

  auto* learn = app.add_subcommand("learn", "Run one agent on an instance");
  std::string learn_path, learn_agent = "bssq", learn_out;
  std::string learn_schedule = "constant";
  bsmg::LearnerConfig lc;
  double learn_gamma = -1.0;
  learn->add_option("instance", learn_path, "instance JSON file")->required();
  learn->add_option("--agent", learn_agent,
                    "bssq, urs, bexpq, nashq or sopt");
  learn->add_option("--episodes", lc.episodes, "episode count");
  learn->add_option("--seed", lc.seed, "learner seed");
  learn->add_option("--out", learn_out, "output directory")->required();
  learn->add_option("--alpha", lc.alpha, "learning rate");
  learn->add_option("--alpha-schedule", learn_schedule,
                    "constant or visit_decay");
  learn->add_option("--gamma", learn_gamma,
                    "discount (defaults to the instance's)");
  learn->add_option("--eps-start", lc.epsilon_start, "initial exploration");
  learn->add_option("--eps-end", lc.epsilon_end, "final exploration");
  learn->add_option("--max-episode-len", lc.max_episode_len, "step cap");
  learn->add_option("--record-every", lc.record_every, "curve stride");
  learn->callback([&] {
    lc.agent = bsmg::agent_from_name(learn_agent);
    lc.alpha_schedule = learn_schedule == "visit_decay"
                            ? bsmg::AlphaSchedule::visit_decay
                            : bsmg::AlphaSchedule::constant;
    if (learn_schedule != "constant" && learn_schedule != "visit_decay")
      throw CLI::ValidationError("--alpha-schedule",
                                 "must be constant or visit_decay");
    lc.gamma = learn_gamma < 0.0 ? bsmg::load_spec(learn_path).discount
                                 : learn_gamma;
    rc = cmd_learn(learn_path, lc, learn_out);
  });

  auto* compare = app.add_subcommand("compare", "Batch agent comparison");
  std::string compare_config, compare_out;
  int compare_jobs = 1;
  compare->add_option("config", compare_config, "experiment JSON file")
      ->required();
  compare->add_option("--out", compare_out, "output directory")->required();
  compare->add_option("--jobs", compare_jobs, "parallel cells");
  compare->callback(
      [&] { rc = cmd_compare(compare_config, compare_out, compare_jobs); });

  auto* gen = app.add_subcommand("gen", "Write a synthetic instance");
  std::string gen_domain, gen_out, gen_variant = "plain";
  bool gen_full = false;
  std::uint64_t gen_seed = 1;
  int gen_states = 4, gen_types = 2, gen_defender = 3, gen_terminal = 0;
  std::vector<int> gen_attacker = {3};
  double gen_lo = -10.0, gen_hi = 10.0;
  gen->add_option("domain", gen_domain, "webapp, ids or random")->required();
  gen->add_option("--out", gen_out, "output instance path")->required();
  gen->add_option("--variant", gen_variant, "webapp: plain or threshold");
  gen->add_flag("--full-scale", gen_full, "webapp: full CVE-scale actions");
  gen->add_option("--seed", gen_seed, "random domain seed");
  gen->add_option("--states", gen_states, "random domain state count");
  gen->add_option("--types", gen_types, "random domain type count");
  gen->add_option("--defender-actions", gen_defender,
                  "random domain defender action count");
  gen->add_option("--attacker-actions", gen_attacker,
                  "random domain per-type action counts");
  gen->add_option("--reward-lo", gen_lo, "random domain reward lower bound");
  gen->add_option("--reward-hi", gen_hi, "random domain reward upper bound");
  gen->add_option("--terminal", gen_terminal,
                  "random domain terminal state count");
  gen->callback([&] {
    if (gen_domain == "webapp") {
      bsmg::BuiltInstance b = bsmg::build_webapp_instance(gen_variant, gen_full);
      bsmg::save_spec(b.spec, b.env, gen_out);
    } else if (gen_domain == "ids") {
      bsmg::BuiltInstance b = bsmg::build_ids_instance();
      bsmg::save_spec(b.spec, b.env, gen_out);
    } else if (gen_domain == "random") {
      bsmg::GameSpec spec = bsmg::generate_random_bsmg(
          gen_states, gen_types, gen_defender, gen_attacker, gen_lo, gen_hi,
          gen_seed, gen_terminal);
      bsmg::save_spec(spec, gen_out);
    } else {
      throw CLI::ValidationError("domain", "must be webapp, ids or random");
    }
    std::printf("wrote %s\n", gen_out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
