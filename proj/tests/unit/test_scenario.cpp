#include <string>

#include "csmsim/scenario.hpp"
#include "helpers.hpp"

using namespace csmsim;

namespace {

const char* kMinimal = R"({
  "schema": 1,
  "name": "mini",
  "images": {"a": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "alpha"}]}},
  "owners": ["o"],
  "realms": [{"alias": "A", "image": "a", "owner": "o"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "A"}, "expect": {"ok": true}},
    STEP
  ]
})";

std::string with_step(const std::string& step) {
  std::string s = kMinimal;
  s.replace(s.find("STEP"), 4, step);
  return s;
}

std::string parse_error(const std::string& text) {
  auto r = parse_scenario(text);
  return r ? std::string{} : r.error().message;
}

}  // namespace

TEST_CASE("every builtin scenario passes") {
  REQUIRE(builtin_scenarios().size() >= 11);
  for (const auto& [name, _] : builtin_scenarios()) {
    auto s = builtin_scenario(name);
    REQUIRE_MESSAGE(s, name);
    const RunResult r = run_scenario(*s);
    INFO(name);
    CHECK(r.exit_code == 0);
    CHECK(r.violations == 0);
    CHECK(r.failures.empty());
    CHECK(r.trace.size() == s->steps.size());
  }
}

TEST_CASE("traces are byte-identical across runs") {
  auto s = builtin_scenario("happy_path");
  REQUIRE(s);
  CHECK(run_scenario(*s).trace == run_scenario(*s).trace);
  const auto a = run_scenario(*s, RunConfig{11});
  const auto b = run_scenario(*s, RunConfig{11});
  CHECK(a.trace == b.trace);
}

TEST_CASE("realm reads its own image") {
  auto s = parse_scenario(with_step(
      R"({"actor": "realm:A", "op": "read", "args": {"ipa": "0x0", "len": 5}, "expect": {"ok": true, "value": {"text": "alpha"}}})"));
  REQUIRE(s);
  CHECK(run_scenario(*s).exit_code == 0);
}

TEST_CASE("an unmet expectation fails the run") {
  auto s = parse_scenario(with_step(
      R"({"actor": "realm:A", "op": "read", "args": {"ipa": "0x0", "len": 5}, "expect": {"ok": true, "value": {"text": "beta"}}})"));
  REQUIRE(s);
  const auto r = run_scenario(*s);
  CHECK(r.exit_code == 1);
  CHECK(r.failures.size() == 1);
  CHECK(r.trace.back().find("\"expect_met\":false") != std::string::npos);
}

TEST_CASE("parse errors name the offending location") {
  CHECK(parse_error(with_step(R"({"actor": "host", "op": "teleport", "args": {}})")).find("steps[1].op") !=
        std::string::npos);
  CHECK(parse_error(with_step(R"({"actor": "realm:Z", "op": "attestation_token", "args": {}})")) != "");
  CHECK(parse_error(with_step(R"({"actor": "host", "op": "service", "args": {"realm": "Z"}})")) != "");
  CHECK(parse_error(with_step(R"({"actor": "host", "op": "service", "args": {}})")) != "");
  const std::string bad_json = parse_error("{\n  \"schema\": 1,\n  \"name\": }");
  CHECK(bad_json.find("line 3") != std::string::npos);
  CHECK(parse_error(R"({"schema": 2, "name": "x"})") != "");
}

TEST_CASE("adversarial host ops need a matching policy") {
  const std::string probe = R"({"actor": "host", "op": "probe_all", "args": {}})";
  CHECK(parse_error(with_step(probe)).find("policy") != std::string::npos);
  std::string text = with_step(probe);
  text.replace(text.find("\"name\""), 0, "\"host_policy\": \"Prober\", ");
  CHECK(parse_error(text) == "");
}

TEST_CASE("realms cannot name physical ids") {
  CHECK(parse_error(with_step(
            R"({"actor": "realm:A", "op": "csm_share", "args": {"csm": 0, "peer": "id:2", "perm": "ro"}})")) != "");
}

TEST_CASE("op tables are non-empty per actor") {
  CHECK(scenario_ops(ActorKind::Host).size() >= 10);
  CHECK(scenario_ops(ActorKind::Realm).size() >= 10);
  CHECK(scenario_ops(ActorKind::Owner).size() == 3);
}
