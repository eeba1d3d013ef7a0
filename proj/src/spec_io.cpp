#include "bsmg/spec_io.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace bsmg {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw SpecError(msg); }

const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

std::vector<std::string> name_list(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(what + " must be a list");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : j) {
    if (!e.is_string()) fail(what + " must contain strings");
    std::string name = e.get<std::string>();
    if (!seen.insert(name).second) fail(what + " has duplicate '" + name + "'");
    out.push_back(std::move(name));
  }
  return out;
}

int index_of(const std::vector<std::string>& names, const std::string& name,
             const std::string& what) {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<int>(k);
  }
  fail("unknown " + what + " '" + name + "'");
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

std::string record_key(const Json& rec, const char* key) {
  const Json& v = field(rec, key);
  if (!v.is_string()) fail(std::string("record field '") + key +
                           "' must be a string");
  return v.get<std::string>();
}

}  // namespace

GameSpec load_spec(const std::string& path) { return load_spec(path, nullptr); }

GameSpec load_spec(const std::string& path, EnvExtensions* env) {
  GameSpec spec = load_spec_unchecked(path, env);
  ValidationReport report = validate(spec);
  if (!report.ok())
    fail("instance file " + path + " is inconsistent: " +
         report.violations.front());
  return spec;
}

GameSpec load_spec_unchecked(const std::string& path, EnvExtensions* env) {
  std::ifstream in(path);
  if (!in) fail("cannot open instance file " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("instance file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) fail("instance file must hold a JSON object");

  static const std::set<std::string> known = {
      "states",          "attacker_types", "theta",
      "defender_actions", "attacker_actions", "transitions",
      "utilities",       "discount",       "start_states",
      "terminal_states", "env"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) fail("unknown top-level field '" + key + "'");
  }

  GameSpec spec;
  spec.states = name_list(field(j, "states"), "states");
  spec.attacker_types = name_list(field(j, "attacker_types"), "attacker_types");
  const int ns = spec.num_states();
  const int nt = spec.num_types();

  const Json& theta = field(j, "theta");
  if (!theta.is_object()) fail("theta must map states to distributions");
  spec.theta.assign(ns, {});
  for (int s = 0; s < ns; ++s) {
    auto it = theta.find(spec.states[s]);
    if (it == theta.end()) fail("theta missing state '" + spec.states[s] + "'");
    if (!it->is_array() || it->size() != static_cast<std::size_t>(nt))
      fail("theta at '" + spec.states[s] + "' must list one weight per type");
    for (const auto& w : *it)
      spec.theta[s].push_back(number(w, "theta weight"));
  }

  const Json& dact = field(j, "defender_actions");
  if (!dact.is_object()) fail("defender_actions must map states to lists");
  spec.defender_actions.assign(ns, {});
  for (int s = 0; s < ns; ++s) {
    auto it = dact.find(spec.states[s]);
    if (it == dact.end())
      fail("defender_actions missing state '" + spec.states[s] + "'");
    spec.defender_actions[s] =
        name_list(*it, "defender_actions at '" + spec.states[s] + "'");
  }

  const Json& aact = field(j, "attacker_actions");
  if (!aact.is_object()) fail("attacker_actions must map states to type maps");
  spec.attacker_actions.assign(ns, {});
  for (int s = 0; s < ns; ++s) {
    auto it = aact.find(spec.states[s]);
    if (it == aact.end())
      fail("attacker_actions missing state '" + spec.states[s] + "'");
    if (!it->is_object())
      fail("attacker_actions at '" + spec.states[s] + "' must map types");
    for (int i = 0; i < nt; ++i) {
      auto ti = it->find(spec.attacker_types[i]);
      if (ti == it->end())
        fail("attacker_actions at '" + spec.states[s] + "' missing type '" +
             spec.attacker_types[i] + "'");
      spec.attacker_actions[s].push_back(
          name_list(*ti, "attacker_actions at '" + spec.states[s] + "'"));
    }
  }

  // Default tensors: self-loop transitions, zero utilities.
  spec.transitions.assign(ns, {});
  spec.u_defender.assign(ns, {});
  spec.u_attacker.assign(ns, {});
  for (int s = 0; s < ns; ++s) {
    const int nd = spec.num_defender_actions(s);
    for (int i = 0; i < nt; ++i) {
      const int na = spec.num_attacker_actions(s, i);
      std::vector<double> self_loop(ns, 0.0);
      self_loop[s] = 1.0;
      std::vector<std::vector<double>> per_attacker(na, self_loop);
      spec.transitions[s].emplace_back(nd, per_attacker);
      spec.u_defender[s].emplace_back(nd, na, 0.0);
      spec.u_attacker[s].emplace_back(nd, na, 0.0);
    }
  }

  auto locate = [&](const Json& rec, int& s, int& i, int& d, int& a) {
    s = index_of(spec.states, record_key(rec, "s"), "state");
    i = index_of(spec.attacker_types, record_key(rec, "type"), "type");
    d = index_of(spec.defender_actions[s], record_key(rec, "d_action"),
                 "defender action");
    a = index_of(spec.attacker_actions[s][i], record_key(rec, "a_action"),
                 "attacker action");
  };

  const Json& trans = field(j, "transitions");
  if (!trans.is_array()) fail("transitions must be a list of records");
  for (const auto& rec : trans) {
    int s, i, d, a;
    locate(rec, s, i, d, a);
    const Json& next = field(rec, "next");
    if (!next.is_object()) fail("transition 'next' must map states to probs");
    std::vector<double> dist(ns, 0.0);
    for (const auto& [name, p] : next.items()) {
      dist[index_of(spec.states, name, "state")] =
          number(p, "transition probability");
    }
    spec.transitions[s][i][d][a] = std::move(dist);
  }

  const Json& utils = field(j, "utilities");
  if (!utils.is_array()) fail("utilities must be a list of records");
  for (const auto& rec : utils) {
    int s, i, d, a;
    locate(rec, s, i, d, a);
    spec.u_defender[s][i](d, a) = number(field(rec, "u_defender"), "u_defender");
    spec.u_attacker[s][i](d, a) = number(field(rec, "u_attacker"), "u_attacker");
  }

  spec.discount = number(field(j, "discount"), "discount");

  for (const auto& name : name_list(field(j, "start_states"), "start_states"))
    spec.start_states.push_back(index_of(spec.states, name, "state"));
  for (const auto& name :
       name_list(field(j, "terminal_states"), "terminal_states"))
    spec.terminal_states.push_back(index_of(spec.states, name, "state"));

  if (env) *env = EnvExtensions{};
  if (env && j.contains("env")) {
    const Json& e = j["env"];
    if (!e.is_object()) fail("env must be an object");
    static const std::set<std::string> env_known = {
        "domain", "variant", "cost_max", "switch_costs", "start_override"};
    for (const auto& [key, value] : e.items()) {
      (void)value;
      if (!env_known.count(key)) fail("unknown env field '" + key + "'");
    }
    if (e.contains("domain")) env->domain = record_key(e, "domain");
    if (e.contains("variant")) env->variant = record_key(e, "variant");
    if (e.contains("cost_max"))
      env->cost_max = number(e["cost_max"], "cost_max");
    if (e.contains("switch_costs")) {
      const Json& costs = e["switch_costs"];
      if (!costs.is_object()) fail("switch_costs must map states to maps");
      env->switch_costs.assign(ns, std::vector<double>(ns, 0.0));
      for (const auto& [from, row] : costs.items()) {
        int s = index_of(spec.states, from, "state");
        if (!row.is_object()) fail("switch_costs rows must map states");
        for (const auto& [to, c] : row.items()) {
          env->switch_costs[s][index_of(spec.states, to, "state")] =
              number(c, "switch cost");
        }
      }
      env->has_switch_costs = true;
    }
    if (e.contains("start_override"))
      env->start_override = name_list(e["start_override"], "start_override");
  }
  return spec;
}

namespace {

Json spec_to_json(const GameSpec& spec) {
  Json j;
  j["states"] = spec.states;
  j["attacker_types"] = spec.attacker_types;

  Json theta = Json::object();
  for (int s = 0; s < spec.num_states(); ++s)
    theta[spec.states[s]] = spec.theta[s];
  j["theta"] = std::move(theta);

  Json dact = Json::object();
  for (int s = 0; s < spec.num_states(); ++s)
    dact[spec.states[s]] = spec.defender_actions[s];
  j["defender_actions"] = std::move(dact);

  Json aact = Json::object();
  for (int s = 0; s < spec.num_states(); ++s) {
    Json per_type = Json::object();
    for (int i = 0; i < spec.num_types(); ++i)
      per_type[spec.attacker_types[i]] = spec.attacker_actions[s][i];
    aact[spec.states[s]] = std::move(per_type);
  }
  j["attacker_actions"] = std::move(aact);

  Json trans = Json::array();
  Json utils = Json::array();
  for (int s = 0; s < spec.num_states(); ++s) {
    for (int d = 0; d < spec.num_defender_actions(s); ++d) {
      for (int i = 0; i < spec.num_types(); ++i) {
        for (int a = 0; a < spec.num_attacker_actions(s, i); ++a) {
          Json next = Json::object();
          const auto& dist = spec.transitions[s][i][d][a];
          for (int sp = 0; sp < spec.num_states(); ++sp) {
            if (dist[sp] != 0.0) next[spec.states[sp]] = dist[sp];
          }
          trans.push_back({{"s", spec.states[s]},
                           {"d_action", spec.defender_actions[s][d]},
                           {"type", spec.attacker_types[i]},
                           {"a_action", spec.attacker_actions[s][i][a]},
                           {"next", std::move(next)}});
          utils.push_back({{"s", spec.states[s]},
                           {"d_action", spec.defender_actions[s][d]},
                           {"type", spec.attacker_types[i]},
                           {"a_action", spec.attacker_actions[s][i][a]},
                           {"u_defender", spec.u_defender[s][i](d, a)},
                           {"u_attacker", spec.u_attacker[s][i](d, a)}});
        }
      }
    }
  }
  j["transitions"] = std::move(trans);
  j["utilities"] = std::move(utils);
  j["discount"] = spec.discount;

  std::vector<std::string> starts, terminals;
  for (int s : spec.start_states) starts.push_back(spec.states[s]);
  for (int s : spec.terminal_states) terminals.push_back(spec.states[s]);
  j["start_states"] = starts;
  j["terminal_states"] = terminals;
  return j;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write instance file " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void save_spec(const GameSpec& spec, const std::string& path) {
  write_json(spec_to_json(spec), path);
}

void save_spec(const GameSpec& spec, const EnvExtensions& env,
               const std::string& path) {
  Json j = spec_to_json(spec);
  Json e = Json::object();
  e["domain"] = env.domain;
  e["variant"] = env.variant;
  if (env.cost_max != 0.0) e["cost_max"] = env.cost_max;
  if (env.has_switch_costs) {
    Json costs = Json::object();
    for (int s = 0; s < spec.num_states(); ++s) {
      Json row = Json::object();
      for (int t = 0; t < spec.num_states(); ++t)
        row[spec.states[t]] = env.switch_costs[s][t];
      costs[spec.states[s]] = std::move(row);
    }
    e["switch_costs"] = std::move(costs);
  }
  if (!env.start_override.empty()) e["start_override"] = env.start_override;
  j["env"] = std::move(e);
  write_json(j, path);
}

}  // namespace bsmg
