#pragma once

#include <string>

#include "bsmg/game.hpp"
#include "bsmg/spec_io.hpp"

namespace bsmg {

struct BuiltInstance {
  GameSpec spec;
  EnvExtensions env;
};

// Moving-target web application: four (language, database) configurations,
// three attacker types with mismatched exploit portfolios. The defender's
// action is the next configuration; attacks hit the configuration that is
// currently live, dampened when the defender moves away mid-attack.
// variant "plain" moves deterministically; "threshold" makes a switch
// succeed with probability 1 - min(1, cost / cost_max). full_scale swaps the
// desk-size exploit lists (8/4/5) for procedurally generated ones (269/34/48).
BuiltInstance build_webapp_instance(const std::string& variant,
                                    bool full_scale = false);

// Intrusion-response chain: web server, LDAP server, file server, then a
// terminal root-access state. One persistent attacker type; the defender
// places one of three detectors or idles.
BuiltInstance build_ids_instance();

}  // namespace bsmg
