// Explorer linked against the core built without the attach size check.
// Prints the report; exits 0 iff a counterexample was found.
#include <iostream>

#include "csmsim/explorer.hpp"

int main() {
  csmsim::ExplorationConfig cfg;
  cfg.realm_count = 2;
  cfg.granule_count = 8;
  cfg.depth = 6;
  cfg.stop_on_violation = true;
  const auto report = csmsim::explore(cfg);
  nlohmann::ordered_json out;
  out["config"] = csmsim::to_json(cfg);
  out["report"] = csmsim::to_json(report);
  std::cout << out.dump() << '\n';
  return report.violation_count > 0 ? 0 : 1;
}
