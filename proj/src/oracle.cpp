#include "bsmg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsmg/stage_solver.hpp"

namespace bsmg {
namespace {

void backup_state(const GameSpec& spec, const ValueFunctions& v, int s,
                  BackupResult& r) {
  const int nd = spec.num_defender_actions(s);
  if (spec.is_terminal(s)) {
    r.profile.leader[s].assign(nd, 0.0);
    r.profile.leader[s][0] = 1.0;
    return;
  }
  const double g = spec.discount;
  for (int i = 0; i < spec.num_types(); ++i) {
    Matrix& qd = r.q.q_defender[s][i];
    Matrix& qa = r.q.q_attacker[s][i];
    for (int d = 0; d < nd; ++d) {
      for (int a = 0; a < spec.num_attacker_actions(s, i); ++a) {
        const auto& dist = spec.transitions[s][i][d][a];
        double cd = 0.0, ca = 0.0;
        for (int sp = 0; sp < spec.num_states(); ++sp) {
          if (dist[sp] == 0.0) continue;
          cd += dist[sp] * v.v_defender[sp];
          ca += dist[sp] * v.v_attacker[sp][i];
        }
        qd(d, a) = spec.u_defender[s][i](d, a) + g * cd;
        qa(d, a) = spec.u_attacker[s][i](d, a) + g * ca;
      }
    }
  }
  SseSolution sol = solve_bsse_serial(build_stage_game(spec, r.q, s));
  r.values.v_defender[s] = sol.v_leader;
  r.values.v_attacker[s] = sol.v_followers;
  r.profile.leader[s] = sol.x;
  r.profile.followers[s] = sol.responses;
}

}  // namespace

BackupResult bellman_backup(const GameSpec& spec, const ValueFunctions& v,
                            Exec mode) {
  if (v.v_defender.size() != static_cast<std::size_t>(spec.num_states()) ||
      v.v_attacker.size() != static_cast<std::size_t>(spec.num_states()))
    throw std::invalid_argument("value function does not match the game");
  for (const auto& row : v.v_attacker)
    if (row.size() != static_cast<std::size_t>(spec.num_types()))
      throw std::invalid_argument("value function does not match the game");
  BackupResult r{QTables::zeros(spec), ValueFunctions::zeros(spec),
                 StrategyProfile::uniform(spec)};
  const int ns = spec.num_states();
  if (mode == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < ns; ++s) backup_state(spec, v, s, r);
#else
    for (int s = 0; s < ns; ++s) backup_state(spec, v, s, r);
#endif
  } else {
    for (int s = 0; s < ns; ++s) backup_state(spec, v, s, r);
  }
  return r;
}

PlanResult value_iteration(const GameSpec& spec, double tol, int max_iter,
                           Exec mode) {
  PlanResult out;
  ValueFunctions v = ValueFunctions::zeros(spec);
  for (int k = 0; k < max_iter; ++k) {
    BackupResult b = bellman_backup(spec, v, mode);
    double delta = 0.0;
    for (int s = 0; s < spec.num_states(); ++s) {
      delta = std::max(delta,
                       std::fabs(b.values.v_defender[s] - v.v_defender[s]));
      for (int i = 0; i < spec.num_types(); ++i)
        delta = std::max(
            delta, std::fabs(b.values.v_attacker[s][i] - v.v_attacker[s][i]));
    }
    out.deltas.push_back(delta);
    v = b.values;
    out.q = std::move(b.q);
    out.profile = std::move(b.profile);
    out.iterations = k + 1;
    if (delta <= tol) {
      out.converged = true;
      break;
    }
  }
  out.values = std::move(v);
  return out;
}

}  // namespace bsmg
