#include "bsmg/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsmg/stage_solver.hpp"

namespace bsmg {

AgentKind agent_from_name(const std::string& name) {
  if (name == "bssq") return AgentKind::bssq;
  if (name == "urs") return AgentKind::urs;
  if (name == "bexpq") return AgentKind::bexpq;
  if (name == "nashq") return AgentKind::nashq;
  if (name == "sopt") return AgentKind::sopt;
  throw std::invalid_argument("unknown agent '" + name + "'");
}

std::string agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::bssq: return "bssq";
    case AgentKind::urs: return "urs";
    case AgentKind::bexpq: return "bexpq";
    case AgentKind::nashq: return "nashq";
    case AgentKind::sopt: return "sopt";
  }
  return "unknown";
}

namespace {

int sample_categorical(const std::vector<double>& dist, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  int last = 0;
  for (int k = 0; k < static_cast<int>(dist.size()); ++k) {
    if (dist[k] <= 0.0) continue;
    last = k;
    acc += dist[k];
    if (u < acc) return k;
  }
  return last;
}

int pick_pure(int best, int n, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < eps) {
    std::uniform_int_distribution<int> any(0, n - 1);
    return any(rng);
  }
  return best;
}

}  // namespace

int epsilon_greedy_sample(const std::vector<double>& x, double eps,
                          std::mt19937_64& rng) {
  if (x.empty()) throw std::invalid_argument("empty strategy");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < eps) {
    std::uniform_int_distribution<int> any(0, static_cast<int>(x.size()) - 1);
    return any(rng);
  }
  return sample_categorical(x, rng);
}

int attacker_best_response(const Matrix& q_attacker,
                           const std::vector<double>& x) {
  return best_response(q_attacker, x);
}

namespace {

// Learner state in union-action index space. For the games shipped here the
// union coincides with every state's own action list.
struct Tables {
  int ns = 0, nt = 0, nd = 0;
  std::vector<int> na;
  std::vector<std::vector<Matrix>> qd, qa, visits;  // [s][i](d, a)
  std::vector<std::vector<double>> x;               // [s][d]
  std::vector<std::vector<int>> resp;               // [s][i]
  std::vector<double> vd;                           // [s]
  std::vector<std::vector<double>> va;              // [s][i]
};

Tables make_tables(const Environment& env) {
  Tables t;
  t.ns = static_cast<int>(env.get_states().size());
  t.nt = env.num_types();
  const ActionSets& acts = env.get_actions();
  t.nd = static_cast<int>(acts.defender.size());
  for (const auto& list : acts.attacker)
    t.na.push_back(static_cast<int>(list.size()));
  for (int s = 0; s < t.ns; ++s) {
    if (env.is_end(s)) continue;
    for (int d = 0; d < t.nd; ++d)
      if (!env.defender_available(s, d))
        throw EnvError("learners need identical defender actions everywhere");
    for (int i = 0; i < t.nt; ++i)
      for (int a = 0; a < t.na[i]; ++a)
        if (!env.attacker_available(s, i, a))
          throw EnvError(
              "learners need identical attacker actions everywhere");
  }
  for (int s = 0; s < t.ns; ++s) {
    t.qd.emplace_back();
    t.qa.emplace_back();
    t.visits.emplace_back();
    for (int i = 0; i < t.nt; ++i) {
      t.qd[s].emplace_back(t.nd, t.na[i], 0.0);
      t.qa[s].emplace_back(t.nd, t.na[i], 0.0);
      t.visits[s].emplace_back(t.nd, t.na[i], 0.0);
    }
    t.x.emplace_back(t.nd, 1.0 / t.nd);
    t.resp.emplace_back(t.nt, 0);
    t.va.emplace_back(t.nt, 0.0);
  }
  t.vd.assign(t.ns, 0.0);
  return t;
}

double epsilon_at(const LearnerConfig& cfg, int ep) {
  const int half = std::max(1, cfg.episodes / 2);
  const double prog = std::min(1.0, (ep - 1) / static_cast<double>(half));
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * prog;
}

struct Ctx {
  int s, i, d, a;
  StepOutcome out;
  double vnd, vna;
};

LearnResult pack(Tables&& t) {
  LearnResult r;
  r.profile.leader = std::move(t.x);
  r.profile.followers = std::move(t.resp);
  r.q.q_defender = std::move(t.qd);
  r.q.q_attacker = std::move(t.qa);
  r.values.v_defender = std::move(t.vd);
  r.values.v_attacker = std::move(t.va);
  return r;
}

template <typename Agent>
LearnResult drive(Environment& env, const LearnerConfig& cfg, Agent&& agent) {
  if (cfg.episodes <= 0 || cfg.max_episode_len <= 0)
    throw std::invalid_argument("learner needs positive episode counts");
  // alpha = 0 is allowed as a diagnostic (it freezes every update).
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0 || cfg.alpha_decay_k <= 0.0)
    throw std::invalid_argument("learning rate must sit in [0, 1]");
  if (cfg.epsilon_start < 0.0 || cfg.epsilon_start > 1.0 ||
      cfg.epsilon_end < 0.0 || cfg.epsilon_end > cfg.epsilon_start)
    throw std::invalid_argument(
        "exploration must satisfy 0 <= epsilon_end <= epsilon_start <= 1");
  if (cfg.gamma < 0.0 || cfg.gamma >= 1.0)
    throw std::invalid_argument("discount must sit in [0, 1)");
  Tables t = make_tables(env);
  agent.init(t, env);
  std::mt19937_64 rng(cfg.seed);
  LearningCurve curve;
  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    const double eps = epsilon_at(cfg, ep);
    int s = env.get_start_state();
    for (int step = 0; step < cfg.max_episode_len && !env.is_end(s); ++step) {
      Ctx c;
      c.s = s;
      c.i = sample_categorical(env.type_distribution(s), rng);
      c.d = agent.pick_defender(t, s, eps, rng);
      c.a = agent.pick_attacker(t, s, c.i, eps, rng);
      c.out = env.act(s, c.d, c.a, c.i);
      const bool ended = env.is_end(c.out.next_state);
      c.vnd = ended ? 0.0 : t.vd[c.out.next_state];
      c.vna = ended ? 0.0 : t.va[c.out.next_state][c.i];
      const double n = t.visits[s][c.i](c.d, c.a);
      t.visits[s][c.i](c.d, c.a) = n + 1.0;
      const double alpha = cfg.alpha_schedule == AlphaSchedule::visit_decay
                               ? 1.0 / (1.0 + cfg.alpha_decay_k * n)
                               : cfg.alpha;
      Matrix& qd = t.qd[s][c.i];
      Matrix& qa = t.qa[s][c.i];
      qd(c.d, c.a) =
          q_update(qd(c.d, c.a), c.out.r_defender, c.vnd, alpha, cfg.gamma);
      qa(c.d, c.a) =
          q_update(qa(c.d, c.a), c.out.r_attacker, c.vna, alpha, cfg.gamma);
      agent.refresh(t, c, env, cfg);
      s = c.out.next_state;
    }
    const bool due = cfg.record_every > 0 && ep % cfg.record_every == 0;
    if ((due || ep == cfg.episodes) &&
        (curve.episodes.empty() || curve.episodes.back() != ep)) {
      curve.episodes.push_back(ep);
      curve.v_defender.push_back(t.vd);
      curve.leader.push_back(t.x);
    }
  }
  LearnResult r = pack(std::move(t));
  r.curve = std::move(curve);
  return r;
}

// Full commitment re-solve after every update, so the played strategy is
// always in equilibrium with the current estimates.
struct BssqAgent {
  void init(Tables&, Environment&) {}
  int pick_defender(Tables& t, int s, double eps, std::mt19937_64& rng) {
    return epsilon_greedy_sample(t.x[s], eps, rng);
  }
  int pick_attacker(Tables& t, int s, int i, double eps,
                    std::mt19937_64& rng) {
    return pick_pure(t.resp[s][i], t.na[i], eps, rng);
  }
  void refresh(Tables& t, const Ctx& c, Environment& env,
               const LearnerConfig&) {
    StageGame g{t.qd[c.s], t.qa[c.s], env.type_distribution(c.s)};
    SseSolution sol = solve_bsse(g);
    t.x[c.s] = std::move(sol.x);
    t.resp[c.s] = std::move(sol.responses);
    t.vd[c.s] = sol.v_leader;
    t.va[c.s] = std::move(sol.v_followers);
  }
};

// Plays a frozen commitment; the attacker keeps best-responding to it while
// both sides' values are tracked for the learning curve.
struct FixedMixAgent {
  std::vector<std::vector<double>> mix;

  void init(Tables& t, Environment&) { t.x = mix; }
  int pick_defender(Tables& t, int s, double, std::mt19937_64& rng) {
    return epsilon_greedy_sample(t.x[s], 0.0, rng);
  }
  int pick_attacker(Tables& t, int s, int i, double eps,
                    std::mt19937_64& rng) {
    return pick_pure(t.resp[s][i], t.na[i], eps, rng);
  }
  void refresh(Tables& t, const Ctx& c, Environment& env,
               const LearnerConfig&) {
    const int s = c.s;
    const auto& theta = env.type_distribution(s);
    double vd = 0.0;
    for (int j = 0; j < t.nt; ++j) {
      const int br = attacker_best_response(t.qa[s][j], t.x[s]);
      t.resp[s][j] = br;
      double va = 0.0, contrib = 0.0;
      for (int d = 0; d < t.nd; ++d) {
        va += t.x[s][d] * t.qa[s][j](d, br);
        contrib += t.x[s][d] * t.qd[s][j](d, br);
      }
      t.va[s][j] = va;
      vd += theta[j] * contrib;
    }
    t.vd[s] = vd;
  }
};

// Per-state adversarial bandit over defender actions with importance
// weighting by the type distribution, bootstrapped with its own value
// estimate.
struct BexpqAgent {
  static constexpr double kMix = 0.1;
  static constexpr double kEta = 0.05;
  static constexpr double kClip = 50.0;

  std::vector<std::vector<double>> g_est;  // [s][d]
  std::vector<std::vector<double>> q_hat;  // [s][d]

  void init(Tables& t, Environment&) {
    g_est.assign(t.ns, std::vector<double>(t.nd, 0.0));
    q_hat.assign(t.ns, std::vector<double>(t.nd, 0.0));
  }
  int pick_defender(Tables& t, int s, double, std::mt19937_64& rng) {
    return epsilon_greedy_sample(t.x[s], 0.0, rng);
  }
  int pick_attacker(Tables& t, int s, int i, double eps,
                    std::mt19937_64& rng) {
    return pick_pure(t.resp[s][i], t.na[i], eps, rng);
  }
  void refresh(Tables& t, const Ctx& c, Environment& env,
               const LearnerConfig& cfg) {
    const int s = c.s;
    const double target = c.out.r_defender + cfg.gamma * c.vnd;
    const double played = std::max(t.x[s][c.d], 1e-12);
    g_est[s][c.d] += env.type_distribution(s)[c.i] * target / played;
    q_hat[s][c.d] =
        q_update(q_hat[s][c.d], c.out.r_defender, c.vnd, cfg.alpha, cfg.gamma);

    double wsum = 0.0;
    std::vector<double> w(t.nd);
    for (int d = 0; d < t.nd; ++d)
      wsum += w[d] = std::exp(std::clamp(kEta * g_est[s][d], -kClip, kClip));
    double vd = 0.0;
    for (int d = 0; d < t.nd; ++d) {
      t.x[s][d] = (1.0 - kMix) * w[d] / wsum + kMix / t.nd;
      vd += t.x[s][d] * q_hat[s][d];
    }
    t.vd[s] = vd;
    for (int j = 0; j < t.nt; ++j) {
      const int br = attacker_best_response(t.qa[s][j], t.x[s]);
      t.resp[s][j] = br;
      double va = 0.0;
      for (int d = 0; d < t.nd; ++d) va += t.x[s][d] * t.qa[s][j](d, br);
      t.va[s][j] = va;
    }
  }
};

// Stage Nash instead of a commitment; single attacker type only.
struct NashqAgent {
  std::vector<std::vector<double>> y;  // attacker mix per state

  void init(Tables& t, Environment&) {
    for (int s = 0; s < t.ns; ++s)
      y.emplace_back(t.na[0], 1.0 / t.na[0]);
  }
  int pick_defender(Tables& t, int s, double eps, std::mt19937_64& rng) {
    return epsilon_greedy_sample(t.x[s], eps, rng);
  }
  int pick_attacker(Tables&, int s, int, double eps, std::mt19937_64& rng) {
    return epsilon_greedy_sample(y[s], eps, rng);
  }
  void refresh(Tables& t, const Ctx& c, Environment&, const LearnerConfig&) {
    const int s = c.s;
    NashSolution sol = solve_nash(t.qd[s][0], t.qa[s][0]);
    t.x[s] = std::move(sol.x);
    y[s] = std::move(sol.y);
    t.vd[s] = sol.v_row;
    t.va[s][0] = sol.v_col;
    t.resp[s][0] = attacker_best_response(t.qa[s][0], t.x[s]);
  }
};

}  // namespace

StrategyProfile urs_policy(const Environment& env) {
  StrategyProfile p;
  const int ns = static_cast<int>(env.get_states().size());
  const int nd = static_cast<int>(env.get_actions().defender.size());
  for (int s = 0; s < ns; ++s) {
    p.leader.emplace_back(nd, 1.0 / nd);
    p.followers.emplace_back(env.num_types(), 0);
  }
  return p;
}

StrategyProfile sopt_policy(const GameSpec& spec) {
  for (int s = 1; s < spec.num_states(); ++s) {
    if (spec.defender_actions[s] != spec.defender_actions[0] ||
        spec.attacker_actions[s] != spec.attacker_actions[0])
      throw std::invalid_argument(
          "static commitment needs identical action sets across states");
  }
  const int nt = spec.num_types();
  const int nd = spec.num_defender_actions(0);
  StageGame g;
  g.theta.assign(nt, 0.0);
  int live = 0;
  for (int i = 0; i < nt; ++i)
    g.leader_matrices.emplace_back(nd, spec.num_attacker_actions(0, i), 0.0);
  g.follower_matrices = g.leader_matrices;
  for (int s = 0; s < spec.num_states(); ++s) {
    if (spec.is_terminal(s)) continue;
    ++live;
    for (int i = 0; i < nt; ++i) {
      g.theta[i] += spec.theta[s][i];
      for (int d = 0; d < nd; ++d) {
        for (int a = 0; a < spec.num_attacker_actions(s, i); ++a) {
          g.leader_matrices[i](d, a) += spec.u_defender[s][i](d, a);
          g.follower_matrices[i](d, a) += spec.u_attacker[s][i](d, a);
        }
      }
    }
  }
  if (live == 0) throw std::invalid_argument("all states are terminal");
  for (int i = 0; i < nt; ++i) {
    g.theta[i] /= live;
    for (double& v : g.leader_matrices[i].data) v /= live;
    for (double& v : g.follower_matrices[i].data) v /= live;
  }
  SseSolution sol = solve_bsse(g);
  StrategyProfile p;
  for (int s = 0; s < spec.num_states(); ++s) {
    p.leader.push_back(sol.x);
    p.followers.push_back(sol.responses);
  }
  return p;
}

LearnResult bssq_learn(Environment& env, const LearnerConfig& cfg) {
  return drive(env, cfg, BssqAgent{});
}

LearnResult bexpq_learn(Environment& env, const LearnerConfig& cfg) {
  return drive(env, cfg, BexpqAgent{});
}

LearnResult nashq_learn(Environment& env, const LearnerConfig& cfg) {
  if (env.num_types() != 1)
    throw std::invalid_argument("stage Nash learner handles one type only");
  return drive(env, cfg, NashqAgent{});
}

LearnResult urs_learn(Environment& env, const LearnerConfig& cfg) {
  FixedMixAgent agent;
  agent.mix = urs_policy(env).leader;
  return drive(env, cfg, agent);
}

LearnResult sopt_learn(Environment& env, const GameSpec& spec,
                       const LearnerConfig& cfg) {
  FixedMixAgent agent;
  agent.mix = sopt_policy(spec).leader;
  return drive(env, cfg, agent);
}

LearnResult run_agent(Environment& env, const LearnerConfig& cfg,
                      const GameSpec* game) {
  switch (cfg.agent) {
    case AgentKind::bssq: return bssq_learn(env, cfg);
    case AgentKind::urs: return urs_learn(env, cfg);
    case AgentKind::bexpq: return bexpq_learn(env, cfg);
    case AgentKind::nashq: return nashq_learn(env, cfg);
    case AgentKind::sopt:
      return sopt_learn(env, game ? *game : env.spec_of(), cfg);
  }
  throw std::invalid_argument("unknown agent kind");
}

std::vector<double> evaluate_policy(Environment& env,
                                    const StrategyProfile& profile,
                                    int episodes, int horizon,
                                    std::uint64_t seed) {
  if (episodes <= 0 || horizon <= 0)
    throw std::invalid_argument("evaluation needs positive counts");
  const int ns = static_cast<int>(env.get_states().size());
  if (profile.leader.size() != static_cast<std::size_t>(ns) ||
      profile.followers.size() != static_cast<std::size_t>(ns))
    throw std::invalid_argument("profile does not match the environment");
  env.reseed(seed ^ 0x9E3779B97F4A7C15ull);
  std::mt19937_64 rng(seed);
  std::vector<double> out(ns, 0.0);
  for (int s0 = 0; s0 < ns; ++s0) {
    if (env.is_end(s0)) continue;
    double acc = 0.0;
    for (int e = 0; e < episodes; ++e) {
      int s = s0;
      double ret = 0.0, disc = 1.0;
      for (int step = 0; step < horizon && !env.is_end(s); ++step) {
        const int i = sample_categorical(env.type_distribution(s), rng);
        const int d = sample_categorical(profile.leader[s], rng);
        const int a = profile.followers[s][i];
        StepOutcome o = env.act(s, d, a, i);
        ret += disc * o.r_defender;
        disc *= env.discount();
        s = o.next_state;
      }
      acc += ret;
    }
    out[s0] = acc / episodes;
  }
  return out;
}

}  // namespace bsmg
