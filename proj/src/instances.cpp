#include "bsmg/instances.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace bsmg {
namespace {

struct Exploit {
  std::string name;
  std::vector<double> impact;  // per configuration
  double effort;
};

// Impact columns follow the configuration order:
// (py, MySQL), (py, PostgreSQL), (Php, MySQL), (Php, PostgreSQL)
std::vector<std::vector<Exploit>> desk_exploits() {
  std::vector<Exploit> kiddie = {
      {"scan-ports", {2, 2, 2, 2}, 0.2},
      {"sqlmap-basic", {5, 3, 5, 3}, 1.0},
      {"xss-probe", {3, 3, 3, 3}, 0.5},
      {"php-file-inclusion", {0, 0, 7, 7}, 1.0},
      {"py-pickle-poc", {6, 6, 0, 0}, 1.0},
      {"wordlist-login", {4, 4, 4, 4}, 1.5},
      {"broken-poc", {0, 0, 0, 0}, 0.5},
      {"old-cve-replay", {0, 0, 8, 0}, 1.0},
  };
  std::vector<Exploit> db = {
      {"mysql-udf-exploit", {9, 0, 9, 0}, 1.5},
      {"pg-copy-exploit", {0, 9, 0, 9}, 1.5},
      {"db-fingerprint", {3, 3, 3, 3}, 0.3},
      {"blind-sqli", {6, 5, 6, 5}, 2.0},
  };
  std::vector<Exploit> web = {
      {"py-rce-chain", {9, 9, 0, 0}, 2.0},
      {"php-object-inject", {0, 0, 9, 9}, 2.0},
      {"ssti-probe", {7, 7, 3, 3}, 1.0},
      {"deserializer", {5, 5, 5, 5}, 1.5},
      {"header-smuggle", {4, 4, 4, 4}, 0.8},
  };
  return {std::move(kiddie), std::move(db), std::move(web)};
}

std::vector<Exploit> procedural_exploits(const std::string& prefix, int count,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> impact(1.0, 10.0);
  std::uniform_real_distribution<double> effort(0.2, 2.5);
  std::uniform_int_distribution<int> kind(0, 3);
  std::vector<Exploit> out;
  for (int k = 0; k < count; ++k) {
    Exploit e;
    e.name = prefix + "-" + std::to_string(k);
    e.effort = effort(rng);
    double hit = impact(rng);
    switch (kind(rng)) {
      case 0:  // language-specific
        e.impact = {hit, hit, 0, 0};
        if (rng() & 1) std::swap(e.impact[0], e.impact[2]),
            std::swap(e.impact[1], e.impact[3]);
        break;
      case 1:  // database-specific
        e.impact = {hit, 0, hit, 0};
        if (rng() & 1) std::swap(e.impact[0], e.impact[1]),
            std::swap(e.impact[2], e.impact[3]);
        break;
      case 2: {  // single configuration
        e.impact = {0, 0, 0, 0};
        e.impact[rng() % 4] = hit;
        break;
      }
      default:  // broad but weaker
        e.impact = {hit / 2, hit / 2, hit / 2, hit / 2};
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

BuiltInstance build_webapp_instance(const std::string& variant,
                                    bool full_scale) {
  if (variant != "plain" && variant != "threshold")
    throw std::invalid_argument("web-app variant must be plain or threshold");

  BuiltInstance out;
  GameSpec& spec = out.spec;
  spec.states = {"(py, MySQL)", "(py, PostgreSQL)", "(Php, MySQL)",
                 "(Php, PostgreSQL)"};
  spec.attacker_types = {"script_kiddie", "db_hacker", "web_hacker"};
  const int ns = 4, nt = 3;
  const std::vector<double> theta = {0.15, 0.35, 0.50};

  std::vector<std::vector<Exploit>> exploits;
  if (full_scale) {
    exploits.push_back(procedural_exploits("cve-k", 269, 0xB51D1));
    exploits.push_back(procedural_exploits("cve-d", 34, 0xB51D2));
    exploits.push_back(procedural_exploits("cve-w", 48, 0xB51D3));
  } else {
    exploits = desk_exploits();
  }

  // Switching cost: 2 for a language change plus 1 for a database change.
  const std::vector<int> lang = {0, 0, 1, 1};
  const std::vector<int> db = {0, 1, 0, 1};
  std::vector<std::vector<double>> costs(ns, std::vector<double>(ns, 0.0));
  for (int s = 0; s < ns; ++s)
    for (int c = 0; c < ns; ++c)
      costs[s][c] = 2.0 * (lang[s] != lang[c]) + 1.0 * (db[s] != db[c]);
  const double cost_max = 4.0;

  for (int s = 0; s < ns; ++s) {
    spec.theta.push_back(theta);
    spec.defender_actions.push_back(spec.states);
    spec.attacker_actions.emplace_back();
    spec.transitions.emplace_back();
    spec.u_defender.emplace_back();
    spec.u_attacker.emplace_back();
    for (int i = 0; i < nt; ++i) {
      const auto& list = exploits[i];
      const int na = static_cast<int>(list.size());
      std::vector<std::string> names;
      for (const auto& e : list) names.push_back(e.name);
      spec.attacker_actions[s].push_back(std::move(names));

      Matrix ud(ns, na), ua(ns, na);
      std::vector<std::vector<std::vector<double>>> tr(
          ns, std::vector<std::vector<double>>(na));
      for (int d = 0; d < ns; ++d) {
        // Moving away interrupts the attack in flight.
        const double mitig = d == s ? 1.0 : 0.5;
        std::vector<double> dist(ns, 0.0);
        if (variant == "plain") {
          dist[d] = 1.0;
        } else {
          const double p = 1.0 - std::min(1.0, costs[s][d] / cost_max);
          dist[d] += p;
          dist[s] += 1.0 - p;
        }
        for (int a = 0; a < na; ++a) {
          const double hit = list[a].impact[s] * mitig;
          ud(d, a) = -hit;
          ua(d, a) = hit - list[a].effort;
          tr[d][a] = dist;
        }
      }
      spec.u_defender[s].push_back(std::move(ud));
      spec.u_attacker[s].push_back(std::move(ua));
      spec.transitions[s].push_back(std::move(tr));
    }
    spec.start_states.push_back(s);
  }
  spec.discount = 0.8;

  out.env.domain = "webapp";
  out.env.variant = variant;
  if (variant == "threshold") {
    out.env.cost_max = cost_max;
    out.env.switch_costs = costs;
    out.env.has_switch_costs = true;
  }
  return out;
}

BuiltInstance build_ids_instance() {
  BuiltInstance out;
  GameSpec& spec = out.spec;
  spec.states = {"web-server", "ldap-server", "file-server", "root-access"};
  spec.attacker_types = {"apt"};
  const int ns = 4;
  const std::vector<std::string> defends = {"no-op", "ids-network", "ids-host",
                                            "ids-audit"};
  const std::vector<std::string> attacks = {"recon", "exploit-vuln",
                                            "escalate-priv", "exfil"};
  // Detection probability of each monitor against each attack.
  const std::vector<std::vector<double>> det = {
      {0.0, 0.0, 0.0, 0.0},  // no-op
      {0.9, 0.6, 0.2, 0.3},  // ids-network
      {0.2, 0.5, 0.7, 0.2},  // ids-host
      {0.1, 0.2, 0.4, 0.8},  // ids-audit
  };
  const std::vector<double> effort = {0.1, 0.5, 0.5, 0.5};
  const std::vector<double> opcost = {0.0, 0.4, 0.4, 0.4};
  // Attack that advances the intrusion at each state, and what it is worth.
  const std::vector<int> advance = {1, 2, 3};  // exploit, escalate, exfil
  const std::vector<double> gain = {2.0, 4.0, 10.0};
  const double burn = 3.0;  // value of catching an attack red-handed

  for (int s = 0; s < ns; ++s) {
    const bool terminal = s == ns - 1;
    spec.theta.push_back({1.0});
    spec.defender_actions.push_back(defends);
    spec.attacker_actions.push_back({attacks});
    spec.transitions.emplace_back();
    spec.u_defender.emplace_back();
    spec.u_attacker.emplace_back();

    Matrix ud(4, 4), ua(4, 4);
    std::vector<std::vector<std::vector<double>>> tr(
        4, std::vector<std::vector<double>>(4));
    for (int d = 0; d < 4; ++d) {
      for (int a = 0; a < 4; ++a) {
        std::vector<double> dist(ns, 0.0);
        if (terminal) {
          dist[s] = 1.0;
          tr[d][a] = std::move(dist);
          continue;
        }
        const double caught = det[d][a];
        const bool advances = a == advance[s];
        const double loot = advances ? gain[s] : (a == 0 ? 0.3 : 0.0);
        const double core = (1.0 - caught) * loot - caught * burn;
        ua(d, a) = core - effort[a];
        ud(d, a) = -core - opcost[d];
        dist[s] += caught + (1.0 - caught) * (advances ? 0.0 : 1.0);
        if (advances) dist[s + 1] += 1.0 - caught;
        tr[d][a] = std::move(dist);
      }
    }
    spec.u_defender[s].push_back(std::move(ud));
    spec.u_attacker[s].push_back(std::move(ua));
    spec.transitions[s] = {std::move(tr)};
    if (terminal) {
      spec.terminal_states.push_back(s);
    } else {
      spec.start_states.push_back(s);
    }
  }
  spec.discount = 0.8;
  out.env.domain = "ids";
  return out;
}

}  // namespace bsmg
