#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bsmg/env.hpp"
#include "bsmg/instances.hpp"
#include "bsmg/spec_io.hpp"

using namespace bsmg;

namespace {

const char* kWebappPlain = "instances/webapp_plain.json";
const char* kWebappThreshold = "instances/webapp_threshold.json";
const char* kIds = "instances/ids.json";

// Two states with overlapping but unequal action sets, to pin down the
// union indexing and the local remap inside act().
GameSpec union_spec() {
  GameSpec g;
  g.states = {"s0", "s1"};
  g.attacker_types = {"t0"};
  g.theta = {{1.0}, {1.0}};
  g.defender_actions = {{"x", "y"}, {"y", "z"}};
  g.attacker_actions = {{{"p"}}, {{"q", "p"}}};
  g.transitions = {
      {{{{0.0, 1.0}}, {{0.0, 1.0}}}},
      {{{{1.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {1.0, 0.0}}}},
  };
  Matrix u0(2, 1);
  u0(0, 0) = 1.0;
  u0(1, 0) = 2.0;
  Matrix u1(2, 2);
  u1(0, 0) = 10.0;  // (y, q)
  u1(0, 1) = 20.0;  // (y, p)
  u1(1, 0) = 30.0;  // (z, q)
  u1(1, 1) = 40.0;  // (z, p)
  g.u_defender = {{u0}, {u1}};
  Matrix n0 = u0, n1 = u1;
  for (double& v : n0.data) v = -v;
  for (double& v : n1.data) v = -v;
  g.u_attacker = {{n0}, {n1}};
  g.discount = 0.8;
  g.start_states = {0};
  return g;
}

}  // namespace

TEST_CASE("the five public calls behave on the web-app instance") {
  Environment env = load_env(kWebappPlain, Exposure::public_api, 7);

  const auto& states = env.get_states();
  REQUIRE(states.size() == 4);
  CHECK(states[0] == "(py, MySQL)");
  CHECK(states[3] == "(Php, PostgreSQL)");

  const ActionSets& acts = env.get_actions();
  REQUIRE(acts.defender.size() == 4);
  CHECK(acts.defender == states);  // configurations are the moves
  REQUIRE(acts.attacker.size() == 3);
  CHECK(acts.attacker[0].size() == 8);
  CHECK(acts.attacker[1].size() == 4);
  CHECK(acts.attacker[2].size() == 5);

  for (int s = 0; s < 4; ++s) CHECK_FALSE(env.is_end(s));
  CHECK_THROWS_AS(env.is_end(-1), EnvError);
  CHECK_THROWS_AS(env.is_end(4), EnvError);

  // every configuration is a start state, drawn uniformly
  std::vector<int> counts(4, 0);
  const int n = 10000;
  for (int t = 0; t < n; ++t) ++counts[env.get_start_state()];
  for (int s = 0; s < 4; ++s) {
    CHECK(counts[s] > 2500 - 131);  // 3 sigma for Binomial(1e4, 1/4)
    CHECK(counts[s] < 2500 + 131);
  }

  // plain variant: the play always lands on the chosen configuration
  for (int d = 0; d < 4; ++d) {
    StepOutcome out = env.act(1, d, 0, 0);
    CHECK(out.next_state == d);
  }
}

TEST_CASE("public rewards match the privileged tables") {
  Environment pub = load_env(kWebappPlain, Exposure::public_api, 3);
  Environment priv = load_env(kWebappPlain, Exposure::oracle_privileged, 3);
  const GameSpec& spec = priv.spec_of();
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 4; ++d)
        for (int a = 0; a < spec.num_attacker_actions(s, i); ++a) {
          StepOutcome out = pub.act(s, d, a, i);
          CHECK(out.r_defender == spec.u_defender[s][i](d, a));
          CHECK(out.r_attacker == spec.u_attacker[s][i](d, a));
        }
}

TEST_CASE("the exposure firewall hides the tables from public handles") {
  Environment pub = load_env(kWebappPlain, Exposure::public_api, 1);
  CHECK_THROWS_AS(pub.spec_of(), EnvError);

  // parameters the learning agents legitimately need stay reachable
  CHECK(pub.num_types() == 3);
  CHECK(pub.type_names()[1] == "db_hacker");
  CHECK(pub.discount() == doctest::Approx(0.8));
  const std::vector<double>& theta = pub.type_distribution(0);
  CHECK(theta[0] == doctest::Approx(0.15));
  CHECK(theta[1] == doctest::Approx(0.35));
  CHECK(theta[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(pub.type_distribution(9), EnvError);

  Environment priv = load_env(kWebappPlain, Exposure::oracle_privileged, 1);
  CHECK(priv.spec_of().num_states() == 4);
}

TEST_CASE("identical seeds give identical trajectories") {
  Environment a = load_env(kWebappThreshold, Exposure::public_api, 99);
  Environment b = load_env(kWebappThreshold, Exposure::public_api, 99);
  for (int t = 0; t < 50; ++t) CHECK(a.get_start_state() == b.get_start_state());
  int s_a = 0, s_b = 0;
  for (int t = 0; t < 200; ++t) {
    StepOutcome oa = a.act(s_a, t % 4, t % 4, t % 3);
    StepOutcome ob = b.act(s_b, t % 4, t % 4, t % 3);
    CHECK(oa.next_state == ob.next_state);
    CHECK(oa.r_defender == ob.r_defender);
    s_a = oa.next_state;
    s_b = ob.next_state;
  }

  // reseeding replays the stream
  a.reseed(1234);
  std::vector<int> first;
  for (int t = 0; t < 40; ++t) first.push_back(a.get_start_state());
  a.reseed(1234);
  for (int t = 0; t < 40; ++t) CHECK(a.get_start_state() == first[t]);
}

TEST_CASE("start overrides narrow the draw and reject bad sets") {
  Environment env = load_env(kWebappPlain, Exposure::public_api, 5);
  env.override_start_states({2, 3});
  CHECK(env.start_states() == std::vector<int>{2, 3});
  bool saw2 = false, saw3 = false;
  for (int t = 0; t < 500; ++t) {
    int s = env.get_start_state();
    CHECK(s >= 2);
    CHECK(s <= 3);
    saw2 |= s == 2;
    saw3 |= s == 3;
  }
  CHECK(saw2);
  CHECK(saw3);

  CHECK_THROWS_AS(env.override_start_states({}), EnvError);
  CHECK_THROWS_AS(env.override_start_states({4}), EnvError);
  CHECK_THROWS_AS(env.override_start_states({-1}), EnvError);

  Environment ids = load_env(kIds, Exposure::public_api, 5);
  CHECK_THROWS_AS(ids.override_start_states({3}), EnvError);  // terminal
}

TEST_CASE("act rejects malformed queries") {
  Environment env = load_env(kWebappPlain, Exposure::public_api, 11);
  CHECK_THROWS_AS(env.act(4, 0, 0, 0), EnvError);
  CHECK_THROWS_AS(env.act(-1, 0, 0, 0), EnvError);
  CHECK_THROWS_AS(env.act(0, 9, 0, 0), EnvError);
  CHECK_THROWS_AS(env.act(0, 0, 99, 0), EnvError);
  CHECK_THROWS_AS(env.act(0, 0, 0, 3), EnvError);
  CHECK_THROWS_AS(env.act(0, 0, -1, 0), EnvError);
  // type-1 attackers only have 4 exploits; index 7 exists for type 0 only
  CHECK_THROWS_AS(env.act(0, 0, 7, 1), EnvError);
}

TEST_CASE("the intrusion chain ends at root access") {
  Environment env = load_env(kIds, Exposure::public_api, 21);
  REQUIRE(env.get_states().size() == 4);
  CHECK(env.num_types() == 1);
  CHECK_FALSE(env.is_end(0));
  CHECK_FALSE(env.is_end(1));
  CHECK_FALSE(env.is_end(2));
  CHECK(env.is_end(3));
  CHECK_THROWS_AS(env.act(3, 0, 0, 0), EnvError);
  for (int t = 0; t < 300; ++t) CHECK(env.get_start_state() != 3);

  Environment priv = load_env(kIds, Exposure::oracle_privileged, 21);
  const GameSpec& spec = priv.spec_of();
  for (int d = 0; d < spec.num_defender_actions(3); ++d)
    for (int a = 0; a < spec.num_attacker_actions(3, 0); ++a)
      CHECK(spec.transitions[3][0][d][a][3] == doctest::Approx(1.0));
}

TEST_CASE("threshold switches succeed at the advertised rate") {
  Environment env = load_env(kWebappThreshold, Exposure::public_api, 31);
  // cost(s0 -> s2) is 2 with cost_max 4: succeed half the time, else stay
  const int n = 10000;
  int moved = 0;
  for (int t = 0; t < n; ++t) {
    StepOutcome out = env.act(0, 2, 0, 0);
    REQUIRE((out.next_state == 0 || out.next_state == 2));
    moved += out.next_state == 2;
  }
  CHECK(moved > 5000 - 150);  // 3 sigma for Binomial(1e4, 1/2)
  CHECK(moved < 5000 + 150);
}

TEST_CASE("threshold edge costs of zero and cost_max are deterministic") {
  GameSpec g;
  g.states = {"A", "B"};
  g.attacker_types = {"t0"};
  g.theta = {{1.0}, {1.0}};
  g.defender_actions = {{"A", "B"}, {"A", "B"}};
  g.attacker_actions = {{{"hit"}}, {{"hit"}}};
  g.transitions = {
      {{{{1.0, 0.0}}, {{0.0, 1.0}}}},
      {{{{1.0, 0.0}}, {{0.0, 1.0}}}},
  };
  g.u_defender = {{Matrix(2, 1, -1.0)}, {Matrix(2, 1, -2.0)}};
  g.u_attacker = {{Matrix(2, 1, 1.0)}, {Matrix(2, 1, 2.0)}};
  g.discount = 0.8;
  g.start_states = {0, 1};

  EnvExtensions ext;
  ext.domain = "webapp";
  ext.variant = "threshold";
  ext.cost_max = 4.0;
  ext.has_switch_costs = true;
  ext.switch_costs = {{0.0, 4.0}, {0.0, 0.0}};

  const std::string path = "/tmp/bsmg_threshold_edge.json";
  save_spec(g, ext, path);
  Environment env = make_webapp_env(path, "", Exposure::public_api, 17);
  for (int t = 0; t < 200; ++t) {
    CHECK(env.act(0, 1, 0, 0).next_state == 0);  // full-cost switch: stuck
    CHECK(env.act(1, 0, 0, 0).next_state == 0);  // free switch: always lands
  }
  std::remove(path.c_str());
}

TEST_CASE("wrappers reject instances with the wrong shape") {
  // the threshold file's kernel keeps stay-probability mass, which the
  // plain variant forbids
  CHECK_THROWS_AS(
      make_webapp_env(kWebappThreshold, "plain", Exposure::public_api, 1),
      EnvError);
  CHECK_THROWS_AS(
      make_webapp_env(kWebappPlain, "nonsense", Exposure::public_api, 1),
      EnvError);
  // three attacker types is not an intrusion chain
  CHECK_THROWS_AS(make_ids_env(kWebappPlain, Exposure::public_api, 1),
                  EnvError);
}

TEST_CASE("action unions keep first-appearance order and remap locally") {
  Environment env = make_env(union_spec(), Exposure::public_api, 2);
  const ActionSets& acts = env.get_actions();
  CHECK(acts.defender == std::vector<std::string>{"x", "y", "z"});
  CHECK(acts.attacker[0] == std::vector<std::string>{"p", "q"});

  CHECK(env.defender_available(0, 0));
  CHECK(env.defender_available(0, 1));
  CHECK_FALSE(env.defender_available(0, 2));
  CHECK_FALSE(env.defender_available(1, 0));
  CHECK(env.defender_available(1, 1));
  CHECK(env.defender_available(1, 2));

  CHECK(env.attacker_available(0, 0, 0));
  CHECK_FALSE(env.attacker_available(0, 0, 1));
  CHECK(env.attacker_available(1, 0, 0));
  CHECK(env.attacker_available(1, 0, 1));
  CHECK_THROWS_AS(env.attacker_available(0, 7, 0), EnvError);

  CHECK_THROWS_AS(env.act(0, 2, 0, 0), EnvError);  // z missing at s0
  CHECK_THROWS_AS(env.act(1, 0, 0, 0), EnvError);  // x missing at s1

  StepOutcome a = env.act(0, 0, 0, 0);
  CHECK(a.r_defender == 1.0);
  CHECK(a.next_state == 1);
  // union ("y", "p") lands on local row 0, column 1 at s1
  StepOutcome b = env.act(1, 1, 0, 0);
  CHECK(b.r_defender == 20.0);
  CHECK(b.r_attacker == -20.0);
  CHECK(b.next_state == 0);
  StepOutcome c = env.act(1, 2, 1, 0);
  CHECK(c.r_defender == 30.0);
  CHECK(c.next_state == 0);
}

TEST_CASE("environments reject games that fail validation") {
  GameSpec g = union_spec();
  g.theta[0] = {0.4};  // no longer sums to one
  CHECK_THROWS_AS(make_env(std::move(g), Exposure::public_api, 1), EnvError);
}
