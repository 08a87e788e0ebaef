#include "csmsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "csmsim/invariants.hpp"

namespace csmsim {
namespace {

struct OpSpec {
  std::string_view name;
  std::vector<std::string_view> required;
  std::vector<std::string_view> realm_args;  // args naming a realm alias
  std::optional<HostPolicy> policy;          // host policy the op requires
};

const std::vector<OpSpec>& host_specs() {
  static const std::vector<OpSpec> specs{
      {"launch_realm", {"realm"}, {"realm"}, {}},
      {"service", {"realm"}, {"realm"}, {}},
      {"rec_enter", {"realm"}, {"realm"}, {}},
      {"destroy_realm", {"realm"}, {"realm"}, {}},
      {"map_private", {"realm", "base", "size"}, {"realm"}, {}},
      {"count_data_granules", {}, {}, {}},
      {"realm_info", {"realm"}, {"realm"}, {}},
      {"probe_all", {}, {}, HostPolicy::Prober},
      {"double_map", {"victim", "realm", "ipa"}, {"victim", "realm"}, HostPolicy::DoubleMapper},
      {"toctou_swap", {"realm"}, {"realm"}, HostPolicy::ToctouSwapper},
      {"physical_read", {"granule", "len"}, {}, {}},
      {"physical_write", {"granule", "data"}, {}, {}},
      {"granule_delegate", {"granule"}, {}, {}},
      {"granule_undelegate", {"granule"}, {}, {}},
      {"data_create_unknown", {"realm", "granule", "ipa"}, {"realm"}, {}},
      {"data_destroy", {"realm", "ipa"}, {"realm"}, {}},
      {"rtt_create", {"realm", "granule", "ipa"}, {"realm"}, {}},
      {"rtt_read_entry", {"realm", "ipa"}, {"realm"}, {}},
  };
  return specs;
}

const std::vector<OpSpec>& realm_specs() {
  static const std::vector<OpSpec> specs{
      {"csm_create", {"base", "size"}, {}, {}},
      {"csm_share", {"csm", "peer", "perm"}, {}, {}},
      {"csm_reserve", {"sharing_id", "base", "size"}, {}, {}},
      {"csm_attach", {"sharing_id"}, {}, {}},
      {"csm_revoke", {"sharing_id"}, {}, {}},
      {"csm_destroy", {"csm"}, {}, {}},
      {"csm_detach", {"sharing_id"}, {}, {}},
      {"compose_sharing_id", {"p", "c", "n"}, {}, {}},
      {"write", {"ipa", "data"}, {}, {}},
      {"read", {"ipa", "len"}, {}, {}},
      {"attestation_token", {}, {}, {}},
  };
  return specs;
}

const std::vector<OpSpec>& owner_specs() {
  static const std::vector<OpSpec> specs{
      {"release_peer_id", {"token", "label", "image"}, {}, {}},
      {"verify_token", {"token", "image"}, {}, {}},
      {"tamper_token", {"token", "offset"}, {}, {}},
  };
  return specs;
}

const std::vector<OpSpec>& specs_for(ActorKind k) {
  switch (k) {
    case ActorKind::Host: return host_specs();
    case ActorKind::Realm: return realm_specs();
    case ActorKind::Owner: return owner_specs();
  }
  return host_specs();
}

const OpSpec* find_spec(ActorKind k, std::string_view op) {
  for (const auto& s : specs_for(k)) {
    if (s.name == op) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseFailure {
  std::string message;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseFailure{where + ": " + what}; }

std::optional<std::uint64_t> parse_uint(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (!j.is_string()) return std::nullopt;
  const std::string s = j.get<std::string>();
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    const std::uint64_t v = std::stoull(hex ? s.substr(2) : s, &used, hex ? 16 : 10);
    if (used != (hex ? s.size() - 2 : s.size())) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// "text", {"text": ...}, {"hex": ...} or {"fill": byte, "len": n}.
Result<std::vector<std::byte>> parse_bytes(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    std::vector<std::byte> out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [](char c) { return static_cast<std::byte>(c); });
    return out;
  }
  if (!j.is_object()) return Error::InvalidArgument;
  if (j.contains("text")) return parse_bytes(j["text"]);
  if (j.contains("hex") && j["hex"].is_string()) return from_hex(j["hex"].get<std::string>());
  if (j.contains("fill")) {
    auto v = parse_uint(j["fill"]);
    auto n = j.contains("len") ? parse_uint(j["len"]) : std::optional<std::uint64_t>{kGranuleSize};
    if (!v || *v > 0xFF || !n || *n > kGranuleSize) return Error::InvalidArgument;
    return std::vector<std::byte>(*n, static_cast<std::byte>(*v));
  }
  return Error::InvalidArgument;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool mentions_id_ref(const Json& j) {
  if (j.is_string()) return j.get<std::string>().rfind("id:", 0) == 0;
  if (j.is_structured()) {
    for (const auto& v : j) {
      if (mentions_id_ref(v)) return true;
    }
  }
  return false;
}

Actor parse_actor(const Json& j, const std::string& where, const Scenario& s) {
  if (!j.is_string()) fail(where, "actor must be a string");
  const auto a = j.get<std::string>();
  if (a == "host") return Actor{ActorKind::Host, {}};
  if (a.rfind("realm:", 0) == 0) {
    const auto alias = a.substr(6);
    const bool known = std::any_of(s.realms.begin(), s.realms.end(), [&](const auto& r) { return r.alias == alias; });
    if (!known) fail(where, "unknown realm alias '" + alias + "'");
    return Actor{ActorKind::Realm, alias};
  }
  if (a.rfind("owner:", 0) == 0) {
    const auto alias = a.substr(6);
    if (std::find(s.owners.begin(), s.owners.end(), alias) == s.owners.end()) {
      fail(where, "unknown owner alias '" + alias + "'");
    }
    const bool owns = std::any_of(s.realms.begin(), s.realms.end(), [&](const auto& r) { return r.owner == alias; });
    if (!owns) fail(where, "owner '" + alias + "' owns no realm");
    return Actor{ActorKind::Owner, alias};
  }
  fail(where, "actor must be 'host', 'realm:<alias>' or 'owner:<alias>'");
}

Expectation parse_expect(const Json& j, const std::string& where) {
  Expectation e;
  if (j.is_null()) return e;
  if (!j.is_object()) fail(where, "expect must be an object");
  if (j.contains("error")) {
    if (!j["error"].is_string() || !error_from_string(j["error"].get<std::string>())) {
      fail(where + ".error", "unknown error name");
    }
    e.kind = Expectation::Kind::Error;
    e.name = j["error"].get<std::string>();
  } else if (j.contains("exit")) {
    const auto name = j["exit"].is_string() ? j["exit"].get<std::string>() : std::string();
    if (name != "PRealmCsm" && name != "CRealmCsm" && name != "RemoveCsm") fail(where + ".exit", "unknown exit reason");
    e.kind = Expectation::Kind::Exit;
    e.name = name;
  } else if (j.contains("ok")) {
    if (!j["ok"].is_boolean() || !j["ok"].get<bool>()) fail(where + ".ok", "must be true");
    e.kind = Expectation::Kind::Ok;
    if (j.contains("value")) e.value = j["value"];
  } else {
    fail(where, "expect needs one of ok, error, exit");
  }
  return e;
}

RealmImage parse_image(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "image must be an object");
  RealmImage img;
  if (j.contains("ipa_width")) {
    auto w = parse_uint(j["ipa_width"]);
    if (!w || *w < Rmm::kMinIpaWidth || *w > Rmm::kMaxIpaWidth) fail(where + ".ipa_width", "out of range");
    img.ipa_width = static_cast<unsigned>(*w);
  }
  if (j.contains("pages")) {
    if (!j["pages"].is_array()) fail(where + ".pages", "must be an array");
    std::size_t i = 0;
    for (const auto& p : j["pages"]) {
      const std::string pw = where + ".pages[" + std::to_string(i++) + "]";
      if (!p.is_object() || !p.contains("ipa")) fail(pw, "page needs an ipa");
      auto ipa = parse_uint(p["ipa"]);
      if (!ipa) fail(pw + ".ipa", "not an address");
      Json content = p;
      content.erase("ipa");
      auto bytes = parse_bytes(content);
      if (!bytes || bytes->size() > kGranuleSize) fail(pw, "page needs text, hex or fill content of at most 4096 bytes");
      img.pages.push_back(ImagePage{Ipa{*ipa}, std::move(*bytes)});
    }
  }
  return img;
}

Scenario parse_document(const Json& doc) {
  if (!doc.is_object()) fail("$", "scenario must be an object");
  Scenario s;
  if (!doc.contains("schema") || doc["schema"] != kScenarioSchema) fail("schema", "expected 1");
  if (!doc.contains("name") || !doc["name"].is_string()) fail("name", "missing");
  s.name = doc["name"].get<std::string>();
  if (doc.contains("seed")) {
    auto seed = parse_uint(doc["seed"]);
    if (!seed) fail("seed", "must be a non-negative integer");
    s.seed = *seed;
  }
  if (doc.contains("granules")) {
    auto g = parse_uint(doc["granules"]);
    if (!g || *g == 0 || *g > 1 << 20) fail("granules", "out of range");
    s.granules = *g;
  }
  if (doc.contains("host_policy")) {
    auto p = doc["host_policy"].is_string() ? host_policy_from_string(doc["host_policy"].get<std::string>())
                                            : std::nullopt;
    if (!p) fail("host_policy", "unknown policy");
    s.host_policy = *p;
  }
  if (doc.contains("images")) {
    if (!doc["images"].is_object()) fail("images", "must be an object");
    for (const auto& [name, img] : doc["images"].items()) s.images[name] = parse_image(img, "images." + name);
  }
  if (doc.contains("owners")) {
    if (!doc["owners"].is_array()) fail("owners", "must be an array");
    for (const auto& o : doc["owners"]) {
      if (!o.is_string()) fail("owners", "entries must be strings");
      s.owners.push_back(o.get<std::string>());
    }
  }
  if (doc.contains("realms")) {
    if (!doc["realms"].is_array()) fail("realms", "must be an array");
    std::size_t i = 0;
    for (const auto& r : doc["realms"]) {
      const std::string where = "realms[" + std::to_string(i++) + "]";
      if (!r.is_object() || !r.contains("alias") || !r["alias"].is_string()) fail(where, "needs an alias");
      ScenarioRealm realm{r["alias"].get<std::string>(), r.value("image", std::string()), r.value("owner", std::string())};
      if (!s.images.count(realm.image)) fail(where + ".image", "unknown image '" + realm.image + "'");
      if (!realm.owner.empty() && std::find(s.owners.begin(), s.owners.end(), realm.owner) == s.owners.end()) {
        fail(where + ".owner", "unknown owner '" + realm.owner + "'");
      }
      for (const auto& other : s.realms) {
        if (other.alias == realm.alias) fail(where + ".alias", "duplicate alias '" + realm.alias + "'");
      }
      s.realms.push_back(std::move(realm));
    }
  }
  if (!doc.contains("steps") || !doc["steps"].is_array()) fail("steps", "missing");
  std::size_t i = 0;
  for (const auto& j : doc["steps"]) {
    const std::string where = "steps[" + std::to_string(i++) + "]";
    if (!j.is_object()) fail(where, "step must be an object");
    ScenarioStep step;
    step.actor = parse_actor(j.value("actor", Json()), where + ".actor", s);
    if (!j.contains("op") || !j["op"].is_string()) fail(where + ".op", "missing");
    step.op = j["op"].get<std::string>();
    const OpSpec* spec = find_spec(step.actor.kind, step.op);
    if (!spec) fail(where + ".op", "unknown op '" + step.op + "' for actor " + step.actor.label());
    if (j.contains("args")) {
      if (!j["args"].is_object()) fail(where + ".args", "must be an object");
      step.args = j["args"];
    }
    for (auto req : spec->required) {
      if (!step.args.contains(std::string(req))) fail(where + ".args", "missing '" + std::string(req) + "'");
    }
    for (auto ra : spec->realm_args) {
      const auto& v = step.args[std::string(ra)];
      const bool known = v.is_string() && std::any_of(s.realms.begin(), s.realms.end(), [&](const auto& r) {
                           return r.alias == v.get<std::string>();
                         });
      if (!known) fail(where + ".args." + std::string(ra), "unknown realm alias");
    }
    if (spec->policy && *spec->policy != s.host_policy) {
      fail(where + ".op", step.op + " requires host_policy " + std::string(to_string(*spec->policy)));
    }
    if (step.actor.kind == ActorKind::Realm && mentions_id_ref(step.args)) {
      fail(where + ".args", "realms learn peer ids only through attestation; use peer:<label>");
    }
    if (step.actor.kind == ActorKind::Owner && step.args.contains("image")) {
      const auto& img = step.args["image"];
      if (!img.is_string() || !s.images.count(img.get<std::string>())) fail(where + ".args.image", "unknown image");
    }
    step.expect = parse_expect(j.value("expect", Json()), where + ".expect");
    if (j.contains("save")) {
      if (!j["save"].is_string()) fail(where + ".save", "must be a string");
      step.save = j["save"].get<std::string>();
    }
    s.steps.push_back(std::move(step));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Execution

struct Binding {
  RealmId id;
  GranuleIndex rd = 0;
};

struct StepOutcome {
  bool ok = false;
  Json value = Json::object();
  std::string error;
};

StepOutcome failed(Error e) { return StepOutcome{false, Json::object(), std::string(to_string(e))}; }

template <class T>
StepOutcome finish(const Result<T>& r, Json value = Json::object()) {
  if (!r) return failed(r.error());
  return StepOutcome{true, std::move(value), {}};
}

struct ResolveError {
  std::string message;
};

bool subset(const Json& expected, const Json& actual) {
  if (expected.is_object()) {
    if (!actual.is_object()) return false;
    for (const auto& [k, v] : expected.items()) {
      if (!actual.contains(k) || !subset(v, actual[k])) return false;
    }
    return true;
  }
  if (expected.is_number() && actual.is_number()) return expected.get<double>() == actual.get<double>();
  return expected == actual;
}

class Runner {
 public:
  Runner(const Scenario& s, const RunConfig& cfg)
      : s_(s), seed_(cfg.seed.value_or(s.seed)) {
    result_.world = World(Rmm::Config{s.granules, seed_}, s.host_policy);
  }

  RunResult run() {
    for (std::size_t i = 0; i < s_.steps.size(); ++i) step(i, s_.steps[i]);
    result_.exit_code = result_.failures.empty() && result_.violations == 0 ? 0 : 1;
    result_.vars = vars_;
    return std::move(result_);
  }

 private:
  World& w() { return result_.world; }
  Rmm& rmm() { return result_.world.rmm; }

  std::optional<Binding> acting_realm(const Actor& a) const {
    std::string alias = a.alias;
    if (a.kind == ActorKind::Owner) {
      for (const auto& r : s_.realms) {
        if (r.owner == a.alias) {
          alias = r.alias;
          break;
        }
      }
    }
    auto it = bindings_.find(alias);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  Json resolve(const Json& j, const Actor& actor) const {
    if (j.is_object()) {
      Json out = Json::object();
      for (const auto& [k, v] : j.items()) out[k] = resolve(v, actor);
      return out;
    }
    if (j.is_array()) {
      Json out = Json::array();
      for (const auto& v : j) out.push_back(resolve(v, actor));
      return out;
    }
    if (!j.is_string()) return j;
    const std::string s = j.get<std::string>();
    if (s.size() > 1 && s[0] == '$') {
      std::stringstream parts(s.substr(1));
      std::string part;
      std::getline(parts, part, '.');
      auto it = vars_.find(part);
      if (it == vars_.end()) throw ResolveError{"undefined variable $" + part};
      Json cur = it->second;
      while (std::getline(parts, part, '.')) {
        if (cur.is_object() && cur.contains(part)) {
          cur = cur[part];
        } else if (cur.is_array() && !part.empty() && std::all_of(part.begin(), part.end(), ::isdigit) &&
                   std::stoul(part) < cur.size()) {
          cur = cur[std::stoul(part)];
        } else {
          throw ResolveError{"no field '" + part + "' in " + s};
        }
      }
      return cur;
    }
    if (s.rfind("peer:", 0) == 0) {
      auto me = acting_realm(actor);
      if (!me) throw ResolveError{"peer reference needs an acting realm"};
      return result_.world.peers.lookup(me->id, s.substr(5)).value_or(RealmId{}).value;
    }
    if (s == "self") {
      auto me = acting_realm(actor);
      if (!me) throw ResolveError{"self needs an acting realm"};
      return me->id.value;
    }
    if (s.rfind("id:", 0) == 0) {
      auto it = bindings_.find(s.substr(3));
      return it == bindings_.end() ? 0 : it->second.id.value;
    }
    return j;
  }

  static std::uint64_t num(const Json& args, const char* key) {
    auto v = parse_uint(args.at(key));
    if (!v) throw ResolveError{std::string("argument '") + key + "' is not a number"};
    return *v;
  }

  static SharingId sid_arg(const Json& args, const char* key) {
    Json j = args.at(key);
    if (j.is_object() && j.contains("sharing_id")) j = j["sharing_id"];
    if (!j.is_object() || !j.contains("p") || !j.contains("c") || !j.contains("n")) {
      throw ResolveError{std::string("argument '") + key + "' is not a sharing id"};
    }
    return SharingId{RealmId{num(j, "p")}, RealmId{num(j, "c")}, static_cast<std::uint32_t>(num(j, "n"))};
  }

  static std::vector<std::byte> bytes_arg(const Json& args, const char* key) {
    auto b = parse_bytes(args.at(key));
    if (!b) throw ResolveError{std::string("argument '") + key + "' is not byte content"};
    return std::move(*b);
  }

  AttestationToken token_arg(const Json& args) const {
    const Json& t = args.at("token");
    const Json& hex = t.is_object() && t.contains("bytes") ? t["bytes"] : t;
    if (!hex.is_string()) throw ResolveError{"token must carry serialized bytes"};
    auto bytes = from_hex(hex.get<std::string>());
    if (!bytes) throw ResolveError{"token bytes are not hex"};
    auto token = parse_token(*bytes);
    if (!token) throw ResolveError{"malformed token"};
    return *token;
  }

  std::optional<Binding> bound(const Json& args, const char* key) const {
    auto it = bindings_.find(args.at(key).get<std::string>());
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  static Json read_value(const std::vector<std::byte>& bytes) {
    std::string text;
    for (std::byte b : bytes) {
      if (b == std::byte{0}) break;
      text.push_back(static_cast<char>(b));
    }
    return Json{{"text", text}, {"hex", to_hex(bytes)}};
  }

  static Json service_value(const RsiCompletion& c, const RmiLog& log) {
    Json v = to_json(c);
    v["delegations"] = count_calls(log, "granule_delegate");
    v["maps"] = count_calls(log, "rmi_data_create_unknown");
    v["reclaims"] = count_calls(log, "rmi_data_destroy");
    v["undelegations"] = count_calls(log, "granule_undelegate");
    return v;
  }

  StepOutcome exec_host(const ScenarioStep& step, const Json& a) {
    const std::string& op = step.op;
    if (op == "launch_realm") {
      const std::string alias = a.at("realm").get<std::string>();
      const auto& spec = *std::find_if(s_.realms.begin(), s_.realms.end(), [&](const auto& r) { return r.alias == alias; });
      RmiLog log;
      auto l = w().host.launch_realm(rmm(), s_.images.at(spec.image), log);
      if (!l) return failed(l.error());
      bindings_[alias] = Binding{l->id, l->rd};
      Json data = Json::array();
      for (const auto& c : log) {
        if (c.name == "rmi_data_create") data.push_back(c.args[1]);
      }
      return StepOutcome{true, Json{{"realm_id", l->id.value}, {"rd", l->rd}, {"data", data}}, {}};
    }
    if (op == "count_data_granules") {
      const auto& gs = rmm().granules();
      return StepOutcome{true,
                         Json{{"data", gs.count(GranuleState::Data)},
                              {"delegated", gs.count(GranuleState::Delegated)},
                              {"undelegated", gs.count(GranuleState::Undelegated)}},
                         {}};
    }
    if (op == "probe_all") {
      auto out = w().host.adversarial_step(rmm());
      return StepOutcome{true, Json{{"attempts", out.attempts}, {"realm_pas_successes", out.successes}}, {}};
    }
    if (op == "physical_read") {
      auto r = rmm().physical_read(SecurityState::Normal, static_cast<GranuleIndex>(num(a, "granule")), 0, num(a, "len"));
      if (!r) return failed(r.error());
      return StepOutcome{true, read_value(*r), {}};
    }
    if (op == "physical_write") {
      const auto bytes = bytes_arg(a, "data");
      return finish(rmm().physical_write(SecurityState::Normal, static_cast<GranuleIndex>(num(a, "granule")), 0, bytes));
    }
    if (op == "granule_delegate") return finish(rmm().granule_delegate(static_cast<GranuleIndex>(num(a, "granule"))));
    if (op == "granule_undelegate") {
      return finish(rmm().granule_undelegate(static_cast<GranuleIndex>(num(a, "granule"))));
    }

    const auto target = bound(a, "realm");
    if (!target) return failed(Error::NoSuchRealm);
    const GranuleIndex rd = target->rd;
    if (op == "service") {
      RmiLog log;
      auto r = w().host.service(rmm(), rd, log);
      if (!r) return failed(r.error());
      return StepOutcome{true, service_value(*r, log), {}};
    }
    if (op == "rec_enter") {
      auto r = rmm().rmi_rec_enter(rd);
      if (!r) return failed(r.error());
      return StepOutcome{true, to_json(*r), {}};
    }
    if (op == "destroy_realm") return finish(rmm().rmi_realm_destroy(rd));
    if (op == "map_private") {
      RmiLog log;
      auto r = w().host.map_private(rmm(), rd, Ipa{num(a, "base")}, num(a, "size"), log);
      return finish(r, Json{{"delegations", count_calls(log, "granule_delegate")}});
    }
    if (op == "realm_info") {
      const Realm* realm = rmm().realm_by_rd(rd);
      if (!realm || realm->id != target->id) return failed(Error::NoSuchRealm);
      return StepOutcome{true,
                         Json{{"realm_id", realm->id.value},
                              {"rd", realm->rd},
                              {"lifecycle", std::string(to_string(realm->lifecycle))},
                              {"rim", realm->rim.hex()},
                              {"apt_entries", realm->apt.size()},
                              {"mappings", realm->rtt.entries().size()}},
                         {}};
    }
    if (op == "double_map") {
      const auto victim = bound(a, "victim");
      if (!victim) return failed(Error::NoSuchRealm);
      auto out = w().host.adversarial_step(rmm(), victim->rd, rd, Ipa{num(a, "ipa")});
      if (out.error) return failed(*out.error);
      return StepOutcome{true, Json{{"successes", out.successes}}, {}};
    }
    if (op == "toctou_swap") {
      const std::string alias = a.at("realm").get<std::string>();
      const auto& spec = *std::find_if(s_.realms.begin(), s_.realms.end(), [&](const auto& r) { return r.alias == alias; });
      auto out = w().host.adversarial_step(rmm(), rd, std::nullopt, {}, &s_.images.at(spec.image));
      if (out.error) return failed(*out.error);
      bindings_[alias] = Binding{*out.new_realm, rd};
      return StepOutcome{true, Json{{"old_id", out.old_realm->value}, {"new_id", out.new_realm->value}, {"rd", rd}}, {}};
    }
    if (op == "data_create_unknown") {
      return finish(rmm().rmi_data_create_unknown(rd, static_cast<GranuleIndex>(num(a, "granule")), Ipa{num(a, "ipa")}));
    }
    if (op == "data_destroy") {
      auto r = rmm().rmi_data_destroy(rd, Ipa{num(a, "ipa")});
      if (!r) return failed(r.error());
      return StepOutcome{true, Json{{"granule", *r}}, {}};
    }
    if (op == "rtt_create") {
      return finish(rmm().rmi_rtt_create(rd, static_cast<GranuleIndex>(num(a, "granule")), Ipa{num(a, "ipa")}));
    }
    if (op == "rtt_read_entry") {
      auto r = rmm().rmi_rtt_read_entry(rd, Ipa{num(a, "ipa")});
      if (!r) return failed(r.error());
      Json v{{"state", r->state == RttEntryState::Assigned ? "Assigned" : "Unassigned"}};
      if (r->pa) v["pa"] = *r->pa;
      if (r->perm) v["perm"] = to_string(*r->perm);
      return StepOutcome{true, v, {}};
    }
    return failed(Error::InvalidArgument);
  }

  StepOutcome exec_realm(const ScenarioStep& step, const Json& a) {
    const auto me = acting_realm(step.actor);
    if (!me) return failed(Error::NoSuchRealm);
    const RealmId id = me->id;
    const std::string& op = step.op;
    if (op == "csm_create") {
      auto r = rmm().rsi_csm_create(id, Ipa{num(a, "base")}, num(a, "size"));
      return finish(r, r ? Json{{"exit", to_json(*r)}} : Json::object());
    }
    if (op == "csm_share") {
      const std::string perm = a.at("perm").is_string() ? a.at("perm").get<std::string>() : "";
      if (perm != "ro" && perm != "rw") throw ResolveError{"perm must be ro or rw"};
      auto r = rmm().rsi_csm_share(id, CsmId{num(a, "csm")}, RealmId{num(a, "peer")},
                                   perm == "rw" ? Permission::ReadWrite : Permission::ReadOnly);
      return finish(r, r ? Json{{"sharing_id", to_json(*r)}} : Json::object());
    }
    if (op == "csm_reserve") {
      auto r = rmm().rsi_csm_reserve(id, sid_arg(a, "sharing_id"), Ipa{num(a, "base")}, num(a, "size"));
      return finish(r, r ? Json{{"exit", to_json(*r)}} : Json::object());
    }
    if (op == "csm_attach") return finish(rmm().rsi_csm_attach(id, sid_arg(a, "sharing_id")));
    if (op == "csm_revoke") return finish(rmm().rsi_csm_revoke(id, sid_arg(a, "sharing_id")));
    if (op == "csm_detach") return finish(rmm().rsi_csm_detach_and_free(id, sid_arg(a, "sharing_id")));
    if (op == "csm_destroy") return finish(rmm().rsi_csm_destroy(id, CsmId{num(a, "csm")}));
    if (op == "compose_sharing_id") {
      const SharingId sid = compose_sharing_id(RealmId{num(a, "p")}, RealmId{num(a, "c")},
                                               static_cast<std::uint32_t>(num(a, "n")));
      return StepOutcome{true, Json{{"sharing_id", to_json(sid)}}, {}};
    }
    if (op == "write") {
      const auto bytes = bytes_arg(a, "data");
      return finish(rmm().realm_write(id, Ipa{num(a, "ipa")}, bytes));
    }
    if (op == "read") {
      auto r = rmm().realm_read(id, Ipa{num(a, "ipa")}, num(a, "len"));
      if (!r) return failed(r.error());
      return StepOutcome{true, read_value(*r), {}};
    }
    if (op == "attestation_token") {
      auto r = rmm().rsi_attestation_token(id);
      if (!r) return failed(r.error());
      return StepOutcome{true, to_json(*r), {}};
    }
    return failed(Error::InvalidArgument);
  }

  StepOutcome exec_owner(const ScenarioStep& step, const Json& a) {
    const std::string& op = step.op;
    if (op == "tamper_token") {
      const Json& t = a.at("token");
      const Json& hex = t.is_object() && t.contains("bytes") ? t["bytes"] : t;
      auto bytes = hex.is_string() ? from_hex(hex.get<std::string>()) : Result<std::vector<std::byte>>(Error::InvalidArgument);
      if (!bytes) throw ResolveError{"token bytes are not hex"};
      const std::uint64_t off = num(a, "offset");
      if (off >= bytes->size()) return failed(Error::OutOfRange);
      (*bytes)[off] ^= std::byte{0x01};
      return StepOutcome{true, Json{{"bytes", to_hex(*bytes)}}, {}};
    }
    const OwnerExpectation expect{measure_image(s_.images.at(a.at("image").get<std::string>())),
                                  rmm().platform().key.public_key(), rmm().platform().digest};
    if (op == "verify_token") {
      const Verification v = verify_token(token_arg(a), expect);
      Json value{{"valid", v.valid}};
      value["realm_id"] = v.realm_id ? Json(v.realm_id->value) : Json();
      return StepOutcome{true, value, {}};
    }
    if (op == "release_peer_id") {
      const auto me = acting_realm(step.actor);
      if (!me) return failed(Error::NoSuchRealm);
      if (!a.at("label").is_string()) throw ResolveError{"label must be a string"};
      auto r = owner_release_peer_id(w().peers, rmm().events(), me->id, a.at("label").get<std::string>(),
                                     token_arg(a), expect);
      if (!r) return failed(r.error());
      return StepOutcome{true, Json{{"peer", r->value}}, {}};
    }
    return failed(Error::InvalidArgument);
  }

  bool met(const Expectation& e, const StepOutcome& o, const Actor& actor) const {
    switch (e.kind) {
      case Expectation::Kind::Any: return true;
      case Expectation::Kind::Ok:
        if (!o.ok) return false;
        if (!e.value) return true;
        try {
          return subset(resolve(*e.value, actor), o.value);
        } catch (const ResolveError&) {
          return false;
        }
      case Expectation::Kind::Error: return !o.ok && o.error == e.name;
      case Expectation::Kind::Exit:
        return o.ok && o.value.contains("exit") && o.value["exit"].value("reason", "") == e.name;
    }
    return false;
  }

  void step(std::size_t index, const ScenarioStep& step) {
    const std::size_t mark = rmm().events().size();
    const StateSnapshot before = snapshot(rmm());
    Json args = step.args;
    StepOutcome outcome;
    std::string note;
    try {
      args = resolve(step.args, step.actor);
      switch (step.actor.kind) {
        case ActorKind::Host: outcome = exec_host(step, args); break;
        case ActorKind::Realm: outcome = exec_realm(step, args); break;
        case ActorKind::Owner: outcome = exec_owner(step, args); break;
      }
    } catch (const ResolveError& e) {
      outcome = failed(Error::InvalidArgument);
      note = e.message;
    }
    w().host.drain_remove_exits(rmm());

    const auto delta = rmm().events().since(mark);
    std::vector<Violation> violations = check_transition(before, snapshot(rmm()), delta);
    for (auto& v : check_invariants(w())) violations.push_back(std::move(v));

    Json exits = Json::array();
    Json events = Json::array();
    for (const auto& ev : delta) {
      if (const auto* x = std::get_if<ExitEvent>(&ev)) {
        exits.push_back(to_json(x->exit));
      } else {
        events.push_back(to_json(ev));
      }
    }
    Json vjson = Json::array();
    for (const auto& v : violations) vjson.push_back(to_json(v));

    const bool ok = met(step.expect, outcome, step.actor);
    if (outcome.ok && !step.save.empty()) vars_[step.save] = outcome.value;

    Json result = outcome.ok ? Json{{"ok", true}, {"value", outcome.value}} : Json{{"ok", false}, {"error", outcome.error}};
    if (!note.empty()) result["note"] = note;

    Json line;
    line["step"] = index;
    line["actor"] = step.actor.label();
    line["op"] = step.op;
    line["args"] = args;
    line["result"] = result;
    line["exits"] = exits;
    line["events"] = events;
    line["violations"] = vjson;
    line["expect_met"] = ok;
    result_.trace.push_back(line.dump());

    if (!ok) {
      result_.failures.push_back("step " + std::to_string(index) + " (" + step.actor.label() + " " + step.op +
                                 "): expected " + describe(step.expect) + ", got " + result.dump());
    }
    result_.violations += violations.size();
    for (const auto& v : violations) {
      result_.failures.push_back("step " + std::to_string(index) + ": " + v.invariant + " " + v.detail);
    }
  }

  static std::string describe(const Expectation& e) {
    switch (e.kind) {
      case Expectation::Kind::Any: return "anything";
      case Expectation::Kind::Ok: return e.value ? "ok with " + e.value->dump() : "ok";
      case Expectation::Kind::Error: return "error " + e.name;
      case Expectation::Kind::Exit: return "exit " + e.name;
    }
    return "?";
  }

  const Scenario& s_;
  std::uint64_t seed_;
  RunResult result_;
  std::map<std::string, Binding> bindings_;
  std::map<std::string, Json> vars_;
};

}  // namespace

std::string Actor::label() const {
  switch (kind) {
    case ActorKind::Host: return "host";
    case ActorKind::Realm: return "realm:" + alias;
    case ActorKind::Owner: return "owner:" + alias;
  }
  return "?";
}

const std::vector<std::string_view>& scenario_ops(ActorKind actor) {
  static const auto collect = [](ActorKind k) {
    std::vector<std::string_view> names;
    for (const auto& s : specs_for(k)) names.push_back(s.name);
    return names;
  };
  static const std::vector<std::string_view> host = collect(ActorKind::Host);
  static const std::vector<std::string_view> realm = collect(ActorKind::Realm);
  static const std::vector<std::string_view> owner = collect(ActorKind::Owner);
  switch (actor) {
    case ActorKind::Host: return host;
    case ActorKind::Realm: return realm;
    case ActorKind::Owner: return owner;
  }
  return host;
}

Expected<Scenario, ParseError> parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return ParseError{line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what()};
  }
  try {
    return parse_document(doc);
  } catch (const ParseFailure& f) {
    return ParseError{f.message};
  } catch (const nlohmann::json::exception& e) {
    return ParseError{e.what()};
  }
}

Expected<Scenario, ParseError> load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return ParseError{path.string() + ": cannot open"};
  std::stringstream buf;
  buf << in.rdbuf();
  auto r = parse_scenario(buf.str());
  if (!r) return ParseError{path.string() + ": " + r.error().message};
  return r;
}

RunResult run_scenario(const Scenario& scenario, const RunConfig& config) {
  return Runner(scenario, config).run();
}

Expected<Scenario, ParseError> builtin_scenario(const std::string& name) {
  const auto& all = builtin_scenarios();
  auto it = all.find(name);
  if (it == all.end()) return ParseError{"unknown builtin scenario '" + name + "'"};
  return parse_scenario(it->second);
}

}  // namespace csmsim
