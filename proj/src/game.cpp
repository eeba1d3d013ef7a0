#include "bsmg/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bsmg {
namespace {

std::string cell_name(const GameSpec& spec, int s, int i, int d, int a) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "(s=%s, type=%s, d=%s, a=%s)",
                spec.states[s].c_str(), spec.attacker_types[i].c_str(),
                spec.defender_actions[s][d].c_str(),
                spec.attacker_actions[s][i][a].c_str());
  return buf;
}

}  // namespace

int GameSpec::state_index(const std::string& name) const {
  for (int s = 0; s < num_states(); ++s) {
    if (states[s] == name) return s;
  }
  return -1;
}

bool GameSpec::is_terminal(int s) const {
  return std::find(terminal_states.begin(), terminal_states.end(), s) !=
         terminal_states.end();
}

bool GameSpec::is_start(int s) const {
  return std::find(start_states.begin(), start_states.end(), s) !=
         start_states.end();
}

QTables QTables::zeros(const GameSpec& spec) {
  QTables q;
  q.q_defender.resize(spec.num_states());
  q.q_attacker.resize(spec.num_states());
  for (int s = 0; s < spec.num_states(); ++s) {
    for (int i = 0; i < spec.num_types(); ++i) {
      int d = spec.num_defender_actions(s);
      int a = spec.num_attacker_actions(s, i);
      q.q_defender[s].emplace_back(d, a, 0.0);
      q.q_attacker[s].emplace_back(d, a, 0.0);
    }
  }
  return q;
}

ValueFunctions ValueFunctions::zeros(const GameSpec& spec) {
  ValueFunctions v;
  v.v_defender.assign(spec.num_states(), 0.0);
  v.v_attacker.assign(spec.num_states(),
                      std::vector<double>(spec.num_types(), 0.0));
  return v;
}

StrategyProfile StrategyProfile::uniform(const GameSpec& spec) {
  StrategyProfile p;
  for (int s = 0; s < spec.num_states(); ++s) {
    int d = spec.num_defender_actions(s);
    p.leader.emplace_back(d, d > 0 ? 1.0 / d : 0.0);
    p.followers.emplace_back(spec.num_types(), 0);
  }
  return p;
}

ValidationReport validate(const GameSpec& spec) {
  ValidationReport report;
  auto add = [&report](const std::string& msg) {
    report.violations.push_back(msg);
  };

  const int ns = spec.num_states();
  const int nt = spec.num_types();
  if (ns == 0) add("empty state list");
  if (nt == 0) add("empty attacker type list");
  if (!(spec.discount >= 0.0 && spec.discount < 1.0))
    add("discount " + std::to_string(spec.discount) + " outside [0, 1)");

  auto shape_ok = [&](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      add(std::string(what) + " has " + std::to_string(got) +
          " entries, expected " + std::to_string(want));
      return false;
    }
    return true;
  };
  if (!shape_ok(spec.theta.size(), ns, "theta")) return report;
  if (!shape_ok(spec.defender_actions.size(), ns, "defender_actions"))
    return report;
  if (!shape_ok(spec.attacker_actions.size(), ns, "attacker_actions"))
    return report;
  if (!shape_ok(spec.transitions.size(), ns, "transitions")) return report;
  if (!shape_ok(spec.u_defender.size(), ns, "u_defender")) return report;
  if (!shape_ok(spec.u_attacker.size(), ns, "u_attacker")) return report;

  for (int s = 0; s < ns; ++s) {
    const std::string& sn = spec.states[s];
    if (spec.theta[s].size() != static_cast<std::size_t>(nt)) {
      add("theta at " + sn + " has wrong length");
      continue;
    }
    double mass = 0.0;
    for (int i = 0; i < nt; ++i) {
      if (spec.theta[s][i] < -1e-12)
        add("theta at " + sn + " has negative entry");
      mass += spec.theta[s][i];
    }
    if (std::fabs(mass - 1.0) > 1e-9)
      add("theta at " + sn + " sums to " + std::to_string(mass));

    if (spec.defender_actions[s].empty())
      add("empty defender action set at " + sn);
    if (spec.attacker_actions[s].size() != static_cast<std::size_t>(nt) ||
        spec.transitions[s].size() != static_cast<std::size_t>(nt) ||
        spec.u_defender[s].size() != static_cast<std::size_t>(nt) ||
        spec.u_attacker[s].size() != static_cast<std::size_t>(nt)) {
      add("per-type tensors at " + sn + " have wrong type count");
      continue;
    }
    const int nd = spec.num_defender_actions(s);
    for (int i = 0; i < nt; ++i) {
      const int na = spec.num_attacker_actions(s, i);
      if (na == 0)
        add("empty attacker action set at " + sn + " for type " +
            spec.attacker_types[i]);
      const Matrix& ud = spec.u_defender[s][i];
      const Matrix& ua = spec.u_attacker[s][i];
      if (ud.rows != nd || ud.cols != na || ua.rows != nd || ua.cols != na) {
        add("utility matrices at " + sn + " for type " +
            spec.attacker_types[i] + " have wrong shape");
        continue;
      }
      if (spec.transitions[s][i].size() != static_cast<std::size_t>(nd)) {
        add("transition tensor at " + sn + " has wrong defender extent");
        continue;
      }
      for (int d = 0; d < nd; ++d) {
        if (spec.transitions[s][i][d].size() != static_cast<std::size_t>(na)) {
          add("transition tensor at " + sn + " has wrong attacker extent");
          continue;
        }
        for (int a = 0; a < na; ++a) {
          const auto& dist = spec.transitions[s][i][d][a];
          if (dist.size() != static_cast<std::size_t>(ns)) {
            add("transition " + cell_name(spec, s, i, d, a) +
                " has wrong support length");
            continue;
          }
          double total = 0.0;
          bool negative = false;
          for (double p : dist) {
            if (p < -1e-12) negative = true;
            total += p;
          }
          if (negative)
            add("transition " + cell_name(spec, s, i, d, a) +
                " has negative probability");
          if (std::fabs(total - 1.0) > 1e-9)
            add("transition " + cell_name(spec, s, i, d, a) + " sums to " +
                std::to_string(total));
        }
      }
    }
  }

  for (int s : spec.start_states) {
    if (s < 0 || s >= ns) {
      add("start state index " + std::to_string(s) + " out of range");
    } else if (spec.is_terminal(s)) {
      add("start state " + spec.states[s] + " is terminal");
    }
  }
  for (int s : spec.terminal_states) {
    if (s < 0 || s >= ns)
      add("terminal state index " + std::to_string(s) + " out of range");
  }
  if (spec.start_states.empty()) add("empty start state set");
  return report;
}

StageGame build_stage_game(const GameSpec& spec, const QTables& q, int s) {
  if (s < 0 || s >= spec.num_states())
    throw std::out_of_range("stage game state index out of range");
  StageGame g;
  g.leader_matrices = q.q_defender[s];
  g.follower_matrices = q.q_attacker[s];
  g.theta = spec.theta[s];
  return g;
}

StageGame immediate_stage_game(const GameSpec& spec, int s) {
  if (s < 0 || s >= spec.num_states())
    throw std::out_of_range("stage game state index out of range");
  StageGame g;
  g.leader_matrices = spec.u_defender[s];
  g.follower_matrices = spec.u_attacker[s];
  g.theta = spec.theta[s];
  return g;
}

}  // namespace bsmg
