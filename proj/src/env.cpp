#include "bsmg/env.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bsmg {
namespace {

std::vector<std::string> union_names(
    const std::vector<std::vector<std::string>>& per_state) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& names : per_state) {
    for (const auto& name : names) {
      if (seen.insert(name).second) out.push_back(name);
    }
  }
  return out;
}

std::vector<int> local_of_union(const std::vector<std::string>& unioned,
                                const std::vector<std::string>& local) {
  std::vector<int> map(unioned.size(), -1);
  for (std::size_t u = 0; u < unioned.size(); ++u) {
    auto it = std::find(local.begin(), local.end(), unioned[u]);
    if (it != local.end()) map[u] = static_cast<int>(it - local.begin());
  }
  return map;
}

}  // namespace

Environment::Environment(GameSpec spec, Exposure exposure, std::uint64_t seed)
    : spec_(std::move(spec)), exposure_(exposure), rng_(seed) {
  ValidationReport report = validate(spec_);
  if (!report.ok())
    throw EnvError("environment rejects inconsistent game: " +
                   report.violations.front());
  actions_.defender = union_names(spec_.defender_actions);
  actions_.attacker.resize(spec_.num_types());
  for (int i = 0; i < spec_.num_types(); ++i) {
    std::vector<std::vector<std::string>> per_state;
    for (int s = 0; s < spec_.num_states(); ++s)
      per_state.push_back(spec_.attacker_actions[s][i]);
    actions_.attacker[i] = union_names(per_state);
  }
  for (int s = 0; s < spec_.num_states(); ++s) {
    defender_local_.push_back(
        local_of_union(actions_.defender, spec_.defender_actions[s]));
    attacker_local_.emplace_back();
    for (int i = 0; i < spec_.num_types(); ++i)
      attacker_local_[s].push_back(
          local_of_union(actions_.attacker[i], spec_.attacker_actions[s][i]));
  }
  start_set_ = spec_.start_states;
}

int Environment::get_start_state() {
  std::uniform_int_distribution<std::size_t> pick(0, start_set_.size() - 1);
  return start_set_[pick(rng_)];
}

bool Environment::is_end(int s) const {
  if (s < 0 || s >= spec_.num_states())
    throw EnvError("is_end: unknown state index " + std::to_string(s));
  return spec_.is_terminal(s);
}

bool Environment::defender_available(int s, int d_action) const {
  if (s < 0 || s >= spec_.num_states())
    throw EnvError("unknown state index " + std::to_string(s));
  return d_action >= 0 &&
         d_action < static_cast<int>(actions_.defender.size()) &&
         defender_local_[s][d_action] >= 0;
}

bool Environment::attacker_available(int s, int type, int a_action) const {
  if (s < 0 || s >= spec_.num_states())
    throw EnvError("unknown state index " + std::to_string(s));
  if (type < 0 || type >= spec_.num_types())
    throw EnvError("unknown attacker type index " + std::to_string(type));
  return a_action >= 0 &&
         a_action < static_cast<int>(actions_.attacker[type].size()) &&
         attacker_local_[s][type][a_action] >= 0;
}

const std::vector<double>& Environment::type_distribution(int s) const {
  if (s < 0 || s >= spec_.num_states())
    throw EnvError("type_distribution: unknown state index " +
                   std::to_string(s));
  return spec_.theta[s];
}

StepOutcome Environment::act(int s, int d_action, int a_action, int type) {
  if (s < 0 || s >= spec_.num_states())
    throw EnvError("act: unknown state index " + std::to_string(s));
  if (spec_.is_terminal(s))
    throw EnvError("act: episode already ended at " + spec_.states[s]);
  if (type < 0 || type >= spec_.num_types())
    throw EnvError("act: unknown attacker type index " + std::to_string(type));
  if (d_action < 0 ||
      d_action >= static_cast<int>(actions_.defender.size()) ||
      defender_local_[s][d_action] < 0)
    throw EnvError("act: defender action unavailable at " + spec_.states[s]);
  if (a_action < 0 ||
      a_action >= static_cast<int>(actions_.attacker[type].size()) ||
      attacker_local_[s][type][a_action] < 0)
    throw EnvError("act: attacker action unavailable at " + spec_.states[s]);

  const int d = defender_local_[s][d_action];
  const int a = attacker_local_[s][type][a_action];
  const auto& dist = spec_.transitions[s][type][d][a];
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  int next = spec_.num_states() - 1;
  double acc = 0.0;
  for (int sp = 0; sp < spec_.num_states(); ++sp) {
    acc += dist[sp];
    if (u < acc) {
      next = sp;
      break;
    }
  }
  return {spec_.u_defender[s][type](d, a), spec_.u_attacker[s][type](d, a),
          next};
}

void Environment::override_start_states(const std::vector<int>& states) {
  if (states.empty())
    throw EnvError("start state override must be nonempty");
  for (int s : states) {
    if (s < 0 || s >= spec_.num_states())
      throw EnvError("start state override has unknown index " +
                     std::to_string(s));
    if (spec_.is_terminal(s))
      throw EnvError("start state override includes terminal state " +
                     spec_.states[s]);
  }
  start_set_ = states;
}

const GameSpec& Environment::spec_of() const {
  if (exposure_ != Exposure::oracle_privileged)
    throw EnvError("spec_of requires an oracle-privileged handle");
  return spec_;
}

Environment make_env(GameSpec spec, Exposure exposure, std::uint64_t seed) {
  return Environment(std::move(spec), exposure, seed);
}

namespace {

void check_webapp_shape(const GameSpec& spec) {
  if (!spec.terminal_states.empty())
    throw EnvError("web-app game must not have terminal states");
  for (int s = 0; s < spec.num_states(); ++s) {
    if (spec.defender_actions[s] != spec.states)
      throw EnvError("web-app defender actions at " + spec.states[s] +
                     " must list the configurations in order");
  }
}

void check_webapp_plain_moves(const GameSpec& spec) {
  for (int s = 0; s < spec.num_states(); ++s) {
    for (int i = 0; i < spec.num_types(); ++i) {
      for (int d = 0; d < spec.num_defender_actions(s); ++d) {
        for (int a = 0; a < spec.num_attacker_actions(s, i); ++a) {
          if (std::fabs(spec.transitions[s][i][d][a][d] - 1.0) > 1e-12)
            throw EnvError("web-app moves must deterministically reach the "
                           "chosen configuration");
        }
      }
    }
  }
}

void apply_threshold_kernel(GameSpec& spec, const EnvExtensions& env) {
  if (!env.has_switch_costs || env.cost_max <= 0.0)
    throw EnvError(
        "threshold variant needs switch_costs and a positive cost_max");
  for (int s = 0; s < spec.num_states(); ++s) {
    for (int i = 0; i < spec.num_types(); ++i) {
      for (int d = 0; d < spec.num_defender_actions(s); ++d) {
        const double cost = env.switch_costs[s][d];
        const double p = 1.0 - std::min(1.0, cost / env.cost_max);
        std::vector<double> dist(spec.num_states(), 0.0);
        dist[d] += p;
        dist[s] += 1.0 - p;
        for (int a = 0; a < spec.num_attacker_actions(s, i); ++a)
          spec.transitions[s][i][d][a] = dist;
      }
    }
  }
}

void check_ids_shape(const GameSpec& spec) {
  if (spec.num_types() != 1)
    throw EnvError("intrusion game expects a single attacker type");
  if (spec.terminal_states.size() != 1)
    throw EnvError("intrusion game expects exactly one terminal state");
  for (int s = 0; s < spec.num_states(); ++s) {
    const auto& names = spec.defender_actions[s];
    if (std::find(names.begin(), names.end(), "no-op") == names.end())
      throw EnvError("intrusion game needs a no-op defender action at " +
                     spec.states[s]);
  }
  // Terminal must be reachable from every start along positive-probability
  // edges (over any action pair).
  const int goal = spec.terminal_states[0];
  std::vector<char> can_reach(spec.num_states(), 0);
  can_reach[goal] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < spec.num_states(); ++s) {
      if (can_reach[s]) continue;
      for (int i = 0; i < spec.num_types() && !can_reach[s]; ++i)
        for (int d = 0; d < spec.num_defender_actions(s) && !can_reach[s]; ++d)
          for (int a = 0; a < spec.num_attacker_actions(s, i) && !can_reach[s];
               ++a)
            for (int sp = 0; sp < spec.num_states(); ++sp)
              if (spec.transitions[s][i][d][a][sp] > 0.0 && can_reach[sp]) {
                can_reach[s] = 1;
                changed = true;
                break;
              }
    }
  }
  for (int s : spec.start_states) {
    if (!can_reach[s])
      throw EnvError("terminal state unreachable from start state " +
                     spec.states[s]);
  }
}

std::vector<int> resolve_override(const GameSpec& spec,
                                  const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& name : names) {
    int s = spec.state_index(name);
    if (s < 0) throw EnvError("start override names unknown state " + name);
    out.push_back(s);
  }
  return out;
}

Environment finish_env(GameSpec spec, const EnvExtensions& env,
                       Exposure exposure, std::uint64_t seed) {
  std::vector<int> override_set;
  if (!env.start_override.empty())
    override_set = resolve_override(spec, env.start_override);
  Environment out(std::move(spec), exposure, seed);
  if (!override_set.empty()) out.override_start_states(override_set);
  return out;
}

}  // namespace

Environment make_webapp_env(const std::string& path, const std::string& variant,
                            Exposure exposure, std::uint64_t seed) {
  EnvExtensions env;
  GameSpec spec = load_spec(path, &env);
  std::string v = variant.empty() ? env.variant : variant;
  check_webapp_shape(spec);
  if (v == "plain") {
    check_webapp_plain_moves(spec);
  } else if (v == "threshold") {
    apply_threshold_kernel(spec, env);
  } else {
    throw EnvError("unknown web-app variant '" + v + "'");
  }
  return finish_env(std::move(spec), env, exposure, seed);
}

Environment make_ids_env(const std::string& path, Exposure exposure,
                         std::uint64_t seed) {
  EnvExtensions env;
  GameSpec spec = load_spec(path, &env);
  check_ids_shape(spec);
  return finish_env(std::move(spec), env, exposure, seed);
}

Environment load_env(const std::string& path, Exposure exposure,
                     std::uint64_t seed) {
  EnvExtensions env;
  GameSpec spec = load_spec(path, &env);
  if (env.domain == "webapp")
    return make_webapp_env(path, "", exposure, seed);
  if (env.domain == "ids") return make_ids_env(path, exposure, seed);
  return finish_env(std::move(spec), env, exposure, seed);
}

}  // namespace bsmg
