#pragma once

#include <string>
#include <vector>

#include "bsmg/game.hpp"

namespace bsmg {

// Optional "env" block of an instance file: knobs consumed by the
// environment wrappers rather than by the game itself.
struct EnvExtensions {
  std::string domain = "generic";  // "webapp", "ids" or "generic"
  std::string variant = "plain";   // webapp only: "plain" or "threshold"
  double cost_max = 0.0;
  bool has_switch_costs = false;
  std::vector<std::vector<double>> switch_costs;  // [s][target state]
  std::vector<std::string> start_override;
};

// Reads an instance file, applying defaults for omitted records (self-loop
// transitions, zero utilities). Throws SpecError naming the offending field
// on malformed input; the result always passes validate().
GameSpec load_spec(const std::string& path);
GameSpec load_spec(const std::string& path, EnvExtensions* env);

// Same parse, but skips the final consistency gate so callers can report
// every violation themselves.
GameSpec load_spec_unchecked(const std::string& path,
                             EnvExtensions* env = nullptr);

void save_spec(const GameSpec& spec, const std::string& path);
void save_spec(const GameSpec& spec, const EnvExtensions& env,
               const std::string& path);

}  // namespace bsmg
