#include "bsmg/generator.hpp"

#include <random>
#include <stdexcept>

namespace bsmg {

GameSpec generate_random_bsmg(int n_states, int n_types, int n_def_actions,
                              const std::vector<int>& n_att_actions,
                              double reward_lo, double reward_hi,
                              std::uint64_t seed, int n_terminal) {
  if (n_states <= 0 || n_types <= 0 || n_def_actions <= 0)
    throw std::invalid_argument("generator needs positive dimensions");
  if (n_terminal < 0 || n_terminal >= n_states)
    throw std::invalid_argument("terminal count must leave a start state");
  std::vector<int> na = n_att_actions;
  if (na.size() == 1) na.assign(n_types, na[0]);
  if (na.size() != static_cast<std::size_t>(n_types))
    throw std::invalid_argument("need one attacker action count per type");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::uniform_real_distribution<double> reward(reward_lo, reward_hi);

  GameSpec spec;
  for (int s = 0; s < n_states; ++s) spec.states.push_back("s" + std::to_string(s));
  for (int i = 0; i < n_types; ++i)
    spec.attacker_types.push_back("t" + std::to_string(i));

  std::vector<std::string> dnames;
  for (int d = 0; d < n_def_actions; ++d) dnames.push_back("d" + std::to_string(d));
  std::vector<std::vector<std::string>> anames(n_types);
  for (int i = 0; i < n_types; ++i)
    for (int a = 0; a < na[i]; ++a) anames[i].push_back("a" + std::to_string(a));

  for (int s = 0; s < n_states; ++s) {
    const bool terminal = s >= n_states - n_terminal;
    std::vector<double> th(n_types);
    double total = 0.0;
    for (int i = 0; i < n_types; ++i) total += th[i] = weight(rng);
    for (double& w : th) w /= total;
    spec.theta.push_back(std::move(th));

    spec.defender_actions.push_back(dnames);
    spec.attacker_actions.push_back(anames);
    spec.transitions.emplace_back();
    spec.u_defender.emplace_back();
    spec.u_attacker.emplace_back();
    for (int i = 0; i < n_types; ++i) {
      Matrix ud(n_def_actions, na[i]);
      Matrix ua(n_def_actions, na[i]);
      std::vector<std::vector<std::vector<double>>> tr(
          n_def_actions, std::vector<std::vector<double>>(na[i]));
      for (int d = 0; d < n_def_actions; ++d) {
        for (int a = 0; a < na[i]; ++a) {
          ud(d, a) = reward(rng);
          ua(d, a) = reward(rng);
          std::vector<double> dist(n_states);
          double z = 0.0;
          for (int sp = 0; sp < n_states; ++sp) z += dist[sp] = mass(rng);
          for (double& p : dist) p /= z;
          if (terminal) {
            dist.assign(n_states, 0.0);
            dist[s] = 1.0;
          }
          tr[d][a] = std::move(dist);
        }
      }
      spec.u_defender[s].push_back(std::move(ud));
      spec.u_attacker[s].push_back(std::move(ua));
      spec.transitions[s].push_back(std::move(tr));
    }
    if (terminal) {
      spec.terminal_states.push_back(s);
    } else {
      spec.start_states.push_back(s);
    }
  }
  spec.discount = 0.9;
  return spec;
}

}  // namespace bsmg
