#include "csmsim/explorer.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "csmsim/access_oracle.hpp"
#include "csmsim/image.hpp"

namespace csmsim {
namespace {

constexpr std::array<std::pair<CommandKind, std::string_view>, 23> kKindNames{{
    {CommandKind::CsmCreate, "csm_create"},
    {CommandKind::CsmShare, "csm_share"},
    {CommandKind::CsmReserve, "csm_reserve"},
    {CommandKind::CsmAttach, "csm_attach"},
    {CommandKind::CsmRevoke, "csm_revoke"},
    {CommandKind::CsmDestroy, "csm_destroy"},
    {CommandKind::CsmDetach, "csm_detach"},
    {CommandKind::RealmWrite, "write"},
    {CommandKind::AttestationToken, "attestation_token"},
    {CommandKind::HostDelegate, "granule_delegate"},
    {CommandKind::HostUndelegate, "granule_undelegate"},
    {CommandKind::DataCreateUnknown, "data_create_unknown"},
    {CommandKind::DataDestroy, "data_destroy"},
    {CommandKind::Service, "service"},
    {CommandKind::RecEnter, "rec_enter"},
    {CommandKind::HostProbe, "probe_all"},
    {CommandKind::RealmDestroy, "realm_destroy"},
    {CommandKind::RealmCreate, "realm_create"},
    {CommandKind::AptCreate, "apt_create"},
    {CommandKind::RecCreate, "rec_create"},
    {CommandKind::RttCreate, "rtt_create"},
    {CommandKind::DataCreate, "data_create"},
    {CommandKind::Activate, "realm_activate"},
}};

constexpr unsigned kIpaWidth = 22;
constexpr std::size_t kMaxRecordedViolations = 16;

bool is_init(CommandKind k) { return k >= CommandKind::RealmCreate; }

std::vector<std::byte> page_content(unsigned realm) { return {std::byte(0x10 + realm)}; }

RealmImage explorer_image(unsigned realm) {
  RealmImage image;
  image.ipa_width = kIpaWidth;
  image.pages.push_back({Ipa::from_granule(0), page_content(realm)});
  if (realm == 1) image.pages.push_back({Ipa::from_granule(1), page_content(realm)});
  return image;
}

std::size_t total_granules(const ExplorationConfig& c) {
  // RD, APT, REC and one RTT granule per pre-launched realm.
  return c.granule_count + (c.from_empty ? 0 : 4 * c.realm_count);
}

template <class R>
StepOutcome outcome_of(const R& r) {
  return r ? StepOutcome{true, {}} : StepOutcome{false, std::string(to_string(r.error()))};
}

std::optional<GranuleIndex> rd_of(const Rmm& rmm, std::uint8_t id) {
  auto it = rmm.realms().find(RealmId{id});
  if (it == rmm.realms().end()) return std::nullopt;
  return it->second.rd;
}

struct Hash128 {
  std::uint64_t lo = 0, hi = 0;
  friend bool operator==(const Hash128&, const Hash128&) = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const noexcept { return static_cast<std::size_t>(h.lo ^ (h.hi * 31)); }
};

Hash128 hash_state(const std::string& encoding) {
  std::array<unsigned char, 16> out{};
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(encoding.data()),
                     encoding.size(), nullptr, 0);
  Hash128 h;
  std::memcpy(&h.lo, out.data(), 8);
  std::memcpy(&h.hi, out.data() + 8, 8);
  return h;
}

class Encoder {
 public:
  void u(std::uint64_t v) { out_.append(reinterpret_cast<const char*>(&v), sizeof v); }
  void d(const Digest& dg) { out_.append(reinterpret_cast<const char*>(dg.bytes.data()), dg.bytes.size()); }
  void s(const std::string& text) {
    u(text.size());
    out_ += text;
  }
  void sid(const SharingId& x) {
    u(x.p_id.value);
    u(x.c_id.value);
    u(x.counter);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

}  // namespace

std::string_view to_string(CommandKind k) noexcept {
  for (const auto& [v, n] : kKindNames) {
    if (v == k) return n;
  }
  return "?";
}

std::optional<CommandKind> command_kind_from_string(std::string_view name) noexcept {
  for (const auto& [v, n] : kKindNames) {
    if (n == name) return v;
  }
  return std::nullopt;
}

std::string to_string(const Command& c) {
  const std::string ipa = hex_ipa(Ipa::from_granule(c.ipa));
  const std::string sid = to_string(c.sharing_id());
  const std::string realm = "realm" + std::to_string(c.realm);
  const std::string name(to_string(c.kind));
  switch (c.kind) {
    case CommandKind::CsmCreate:
      return realm + "." + name + "(base=" + ipa + ",size=" + std::to_string(c.size) + ")";
    case CommandKind::CsmShare:
      return realm + "." + name + "(csm=" + std::to_string(c.csm) + ",peer=" + std::to_string(c.sid_c) +
             ",perm=" + to_string(static_cast<Permission>(c.perm)) + ")";
    case CommandKind::CsmReserve:
      return realm + "." + name + "(sid=" + sid + ",base=" + ipa + ",size=" + std::to_string(c.size) + ")";
    case CommandKind::CsmAttach:
    case CommandKind::CsmRevoke:
    case CommandKind::CsmDetach:
      return realm + "." + name + "(sid=" + sid + ")";
    case CommandKind::CsmDestroy:
      return realm + "." + name + "(csm=" + std::to_string(c.csm) + ")";
    case CommandKind::RealmWrite:
      return realm + "." + name + "(ipa=" + ipa + ")";
    case CommandKind::AttestationToken:
      return realm + "." + name + "()";
    case CommandKind::HostDelegate:
    case CommandKind::HostUndelegate:
    case CommandKind::RealmCreate:
      return "host." + name + "(granule=" + std::to_string(c.granule) + ")";
    case CommandKind::HostProbe:
      return "host." + name + "()";
    case CommandKind::DataCreateUnknown:
    case CommandKind::DataCreate:
      return "host." + name + "(" + realm + ",granule=" + std::to_string(c.granule) + ",ipa=" + ipa + ")";
    case CommandKind::DataDestroy:
      return "host." + name + "(" + realm + ",ipa=" + ipa + ")";
    case CommandKind::AptCreate:
    case CommandKind::RecCreate:
    case CommandKind::RttCreate:
      return "host." + name + "(" + realm + ",granule=" + std::to_string(c.granule) + ")";
    case CommandKind::Service:
    case CommandKind::RecEnter:
    case CommandKind::RealmDestroy:
    case CommandKind::Activate:
      return "host." + name + "(" + realm + ")";
  }
  return name;
}

World initial_world(const ExplorationConfig& config) {
  if (config.realm_count < 1 || config.realm_count > 3) throw std::invalid_argument("realm_count must be 1..3");
  World w(Rmm::Config{total_granules(config), config.seed}, HostPolicy::Cooperative);
  if (!config.from_empty) {
    std::vector<RealmImage> images;
    for (unsigned r = 1; r <= config.realm_count; ++r) {
      images.push_back(explorer_image(r));
      RmiLog log;
      if (auto l = w.host.launch_realm(w.rmm, images.back(), log); !l) {
        throw std::invalid_argument("granule pool too small to launch the explorer realms");
      }
    }
    for (unsigned a = 1; a <= config.realm_count; ++a) {
      for (unsigned b = 1; b <= config.realm_count; ++b) {
        if (a == b) continue;
        auto token = w.rmm.rsi_attestation_token(RealmId{b});
        const OwnerExpectation expect{measure_image(images[b - 1]), w.rmm.platform().key.public_key(),
                                      w.rmm.platform().digest};
        (void)owner_release_peer_id(w.peers, w.rmm.events(), RealmId{a}, "realm" + std::to_string(b), *token,
                                    expect);
      }
    }
  }
  w.rmm.events().clear();
  return w;
}

std::vector<Command> enumerate_commands(const World& w, const ExplorationConfig& cfg) {
  const Rmm& rmm = w.rmm;
  const GranuleSpace& gs = rmm.granules();
  auto on = [&](CommandKind k) {
    if (!cfg.enabled.empty()) return cfg.enabled.count(k) != 0;
    return !is_init(k) || cfg.from_empty;
  };

  // Pristine granules of one state are interchangeable; one stands for all.
  std::optional<GranuleIndex> undelegated;
  std::vector<GranuleIndex> delegated;
  bool pristine_delegated = false;
  for (GranuleIndex g = 0; g < gs.size(); ++g) {
    const Granule& gr = gs.at(g);
    if (gr.state == GranuleState::Undelegated && !undelegated && gr.content.is_zero()) undelegated = g;
    if (gr.state == GranuleState::Delegated) {
      if (!gr.content.is_zero()) {
        delegated.push_back(g);
      } else if (!pristine_delegated) {
        pristine_delegated = true;
        delegated.push_back(g);
      }
    }
  }

  std::vector<std::uint8_t> live;
  for (const auto& [id, r] : rmm.realms()) live.push_back(static_cast<std::uint8_t>(id.value));
  std::vector<std::uint8_t> ever;
  for (std::uint64_t id = 1; id < rmm.next_realm_id(); ++id) ever.push_back(static_cast<std::uint8_t>(id));

  std::set<std::uint8_t> csms;
  std::set<SharingId> shares;
  for (const auto& [id, r] : rmm.realms()) {
    for (const auto& e : r.apt.entries()) {
      if (const auto* p = std::get_if<ProviderEntry>(&e)) {
        if (p->csm_id) csms.insert(static_cast<std::uint8_t>(p->csm_id->value));
        for (const auto& s : p->shares) shares.insert(s.sharing_id);
      }
    }
  }

  std::vector<Command> out;
  auto push = [&](Command c) { out.push_back(c); };
  auto with_sid = [](Command c, const SharingId& s) {
    c.sid_p = static_cast<std::uint8_t>(s.p_id.value);
    c.sid_c = static_cast<std::uint8_t>(s.c_id.value);
    c.sid_n = static_cast<std::uint8_t>(s.counter);
    return c;
  };

  if (on(CommandKind::HostDelegate) && undelegated) {
    push({CommandKind::HostDelegate, 0, static_cast<std::uint8_t>(*undelegated)});
  }
  if (on(CommandKind::HostUndelegate)) {
    for (GranuleIndex g : delegated) push({CommandKind::HostUndelegate, 0, static_cast<std::uint8_t>(g)});
  }
  if (on(CommandKind::HostProbe)) push({CommandKind::HostProbe});
  if (on(CommandKind::RealmCreate)) {
    for (GranuleIndex g : delegated) push({CommandKind::RealmCreate, 0, static_cast<std::uint8_t>(g)});
  }

  for (std::uint8_t r : live) {
    const Realm& realm = rmm.realms().at(RealmId{r});
    std::set<SharingId> sids = shares;
    for (const auto& e : realm.apt.entries()) {
      if (const auto* c = std::get_if<ConsumerEntry>(&e)) sids.insert(c->sharing_id);
    }
    for (std::uint8_t p : ever) {
      if (p != r) sids.insert(compose_sharing_id(RealmId{p}, RealmId{r}, 0));
    }

    if (on(CommandKind::CsmCreate)) {
      for (unsigned ipa = 0; ipa < cfg.ipa_window; ++ipa) {
        for (unsigned size = 1; size <= cfg.csm_max_size; ++size) {
          push({CommandKind::CsmCreate, r, 0, static_cast<std::uint8_t>(ipa), static_cast<std::uint8_t>(size)});
        }
      }
    }
    if (on(CommandKind::CsmShare)) {
      for (std::uint8_t csm : csms) {
        for (std::uint8_t peer : ever) {
          for (std::uint8_t perm : {0, 1}) {
            Command c{CommandKind::CsmShare, r};
            c.csm = csm;
            c.sid_c = peer;
            c.perm = perm;
            push(c);
          }
        }
      }
    }
    for (const auto& sid : sids) {
      if (on(CommandKind::CsmReserve)) {
        for (unsigned ipa = 0; ipa < cfg.ipa_window; ++ipa) {
          for (unsigned size = 1; size <= cfg.csm_max_size; ++size) {
            push(with_sid({CommandKind::CsmReserve, r, 0, static_cast<std::uint8_t>(ipa),
                           static_cast<std::uint8_t>(size)},
                          sid));
          }
        }
      }
      for (CommandKind k : {CommandKind::CsmAttach, CommandKind::CsmRevoke, CommandKind::CsmDetach}) {
        if (on(k)) push(with_sid({k, r}, sid));
      }
    }
    if (on(CommandKind::CsmDestroy)) {
      for (std::uint8_t csm : csms) {
        Command c{CommandKind::CsmDestroy, r};
        c.csm = csm;
        push(c);
      }
    }
    for (unsigned ipa = 0; ipa < cfg.ipa_window; ++ipa) {
      const auto i = static_cast<std::uint8_t>(ipa);
      if (on(CommandKind::RealmWrite)) push({CommandKind::RealmWrite, r, 0, i});
      if (on(CommandKind::DataDestroy)) push({CommandKind::DataDestroy, r, 0, i});
      if (on(CommandKind::DataCreateUnknown)) {
        std::vector<GranuleIndex> cands = delegated;
        if (undelegated) cands.push_back(*undelegated);
        for (const auto& [oid, other] : rmm.realms()) {
          if (oid.value != r && !other.rtt.entries().empty()) cands.push_back(other.rtt.entries().begin()->second.pa);
        }
        for (GranuleIndex g : cands) push({CommandKind::DataCreateUnknown, r, static_cast<std::uint8_t>(g), i});
      }
      if (on(CommandKind::DataCreate)) {
        for (GranuleIndex g : delegated) push({CommandKind::DataCreate, r, static_cast<std::uint8_t>(g), i});
      }
    }
    for (CommandKind k : {CommandKind::AttestationToken, CommandKind::Service, CommandKind::RecEnter,
                          CommandKind::RealmDestroy, CommandKind::Activate}) {
      if (on(k)) push({k, r});
    }
    for (CommandKind k : {CommandKind::AptCreate, CommandKind::RecCreate, CommandKind::RttCreate}) {
      if (!on(k)) continue;
      for (GranuleIndex g : delegated) push({k, r, static_cast<std::uint8_t>(g)});
    }
  }
  return out;
}

StepOutcome apply_command(World& w, const Command& c) {
  Rmm& rmm = w.rmm;
  const RealmId realm{c.realm};
  const Ipa ipa = Ipa::from_granule(c.ipa);
  auto host_rd = [&]() { return rd_of(rmm, c.realm); };
  const StepOutcome no_realm{false, std::string(to_string(Error::NoSuchRealm))};

  switch (c.kind) {
    case CommandKind::CsmCreate: return outcome_of(rmm.rsi_csm_create(realm, ipa, c.size));
    case CommandKind::CsmShare:
      return outcome_of(rmm.rsi_csm_share(realm, CsmId{c.csm}, RealmId{c.sid_c}, static_cast<Permission>(c.perm)));
    case CommandKind::CsmReserve: return outcome_of(rmm.rsi_csm_reserve(realm, c.sharing_id(), ipa, c.size));
    case CommandKind::CsmAttach: return outcome_of(rmm.rsi_csm_attach(realm, c.sharing_id()));
    case CommandKind::CsmRevoke: return outcome_of(rmm.rsi_csm_revoke(realm, c.sharing_id()));
    case CommandKind::CsmDestroy: return outcome_of(rmm.rsi_csm_destroy(realm, CsmId{c.csm}));
    case CommandKind::CsmDetach: return outcome_of(rmm.rsi_csm_detach_and_free(realm, c.sharing_id()));
    case CommandKind::RealmWrite: {
      const std::array<std::byte, 1> marker{std::byte(c.realm)};
      return outcome_of(rmm.realm_write(realm, ipa, marker));
    }
    case CommandKind::AttestationToken: return outcome_of(rmm.rsi_attestation_token(realm));
    case CommandKind::HostDelegate: return outcome_of(rmm.granule_delegate(c.granule));
    case CommandKind::HostUndelegate: return outcome_of(rmm.granule_undelegate(c.granule));
    case CommandKind::HostProbe: {
      const std::array<std::byte, 1> poke{std::byte{0xEE}};
      for (GranuleIndex g = 0; g < rmm.granules().size(); ++g) {
        (void)rmm.physical_read(SecurityState::Normal, g, 0, 1);
        if (rmm.granules().gpt()[g] != PasTag::Normal) (void)rmm.physical_write(SecurityState::Normal, g, 0, poke);
      }
      return {true, {}};
    }
    case CommandKind::RealmCreate: return outcome_of(rmm.rmi_realm_create(c.granule, kIpaWidth));
    default: break;
  }

  const auto rd = host_rd();
  if (!rd) return no_realm;
  switch (c.kind) {
    case CommandKind::DataCreateUnknown: return outcome_of(rmm.rmi_data_create_unknown(*rd, c.granule, ipa));
    case CommandKind::DataDestroy: return outcome_of(rmm.rmi_data_destroy(*rd, ipa));
    case CommandKind::Service: {
      RmiLog log;
      return outcome_of(w.host.service(rmm, *rd, log));
    }
    case CommandKind::RecEnter: return outcome_of(rmm.rmi_rec_enter(*rd));
    case CommandKind::RealmDestroy: return outcome_of(rmm.rmi_realm_destroy(*rd));
    case CommandKind::AptCreate: return outcome_of(rmm.rmi_apt_create(*rd, c.granule));
    case CommandKind::RecCreate: return outcome_of(rmm.rmi_rec_create(*rd, c.granule));
    case CommandKind::RttCreate: return outcome_of(rmm.rmi_rtt_create(*rd, c.granule, Ipa{0}));
    case CommandKind::DataCreate: {
      const auto content = page_content(c.realm);
      return outcome_of(rmm.rmi_data_create(*rd, c.granule, ipa, content));
    }
    case CommandKind::Activate: return outcome_of(rmm.rmi_realm_activate(*rd));
    default: break;
  }
  return {false, std::string(to_string(Error::InvalidArgument))};
}

std::string canonical_encoding(const World& w) {
  const Rmm& rmm = w.rmm;
  const GranuleSpace& gs = rmm.granules();
  Encoder e;
  std::vector<GranuleIndex> by_label;
  std::vector<std::int64_t> label(gs.size(), -1);
  auto lab = [&](GranuleIndex g) -> std::uint64_t {
    if (g >= gs.size()) return ~std::uint64_t{0};
    if (label[g] < 0) {
      label[g] = static_cast<std::int64_t>(by_label.size());
      by_label.push_back(g);
    }
    return static_cast<std::uint64_t>(label[g]);
  };

  e.u(rmm.next_realm_id());
  e.u(rmm.next_csm_id());
  e.u(rmm.host_realm_pas_hits());
  e.u(rmm.tombstones().size());
  for (RealmId id : rmm.tombstones()) e.u(id.value);

  e.u(rmm.realms().size());
  for (const auto& [id, r] : rmm.realms()) {
    e.u(id.value);
    e.u(lab(r.rd));
    e.u(static_cast<std::uint64_t>(r.lifecycle));
    e.u(r.ipa_width);
    e.d(r.rim);
    e.u(r.apt_granule ? lab(*r.apt_granule) + 1 : 0);
    if (r.rec) {
      e.u(lab(r.rec->granule) + 1);
      e.u(r.rec->pending_exit ? 1 : 0);
      if (const auto& x = r.rec->pending_exit) {
        e.u(static_cast<std::uint64_t>(x->reason));
        e.u(x->ipa_base.value);
        e.u(x->size);
      }
      e.u(r.rec->pending_rsi ? 1 : 0);
      if (const auto& p = r.rec->pending_rsi) {
        e.u(static_cast<std::uint64_t>(p->kind));
        e.u(p->base.value);
        e.u(p->size);
        e.sid(p->sharing_id);
      }
    } else {
      e.u(0);
    }
    e.u(r.rtt.backed_blocks().size());
    for (auto b : r.rtt.backed_blocks()) e.u(b);
    for (GranuleIndex t : r.rtt.table_granules()) e.u(lab(t));
    e.u(r.rtt.entries().size());
    for (const auto& [g, entry] : r.rtt.entries()) {
      e.u(g);
      e.u(lab(entry.pa));
      e.u(static_cast<std::uint64_t>(entry.perm));
    }
    e.u(r.rtt.unprotected().size());
    for (const auto& [g, pa] : r.rtt.unprotected()) {
      e.u(g);
      e.u(lab(pa));
    }
    e.u(r.apt.size());
    for (const auto& entry : r.apt.entries()) {
      if (const auto* p = std::get_if<ProviderEntry>(&entry)) {
        e.u(1);
        e.u(p->csm_id ? p->csm_id->value : 0);
        e.u(p->base.value);
        e.u(p->size);
        e.u(p->shares.size());
        for (const auto& s : p->shares) {
          e.sid(s.sharing_id);
          e.u(s.c_id.value);
          e.u(static_cast<std::uint64_t>(s.perm));
          e.u(s.attached ? 1 : 0);
        }
      } else {
        const auto& c = std::get<ConsumerEntry>(entry);
        e.u(2);
        e.sid(c.sharing_id);
        e.u(c.base.value);
        e.u(c.size);
        e.u(static_cast<std::uint64_t>(c.state));
      }
    }
    e.u(r.apt.share_counters().size());
    for (const auto& [peer, n] : r.apt.share_counters()) {
      e.u(peer.value);
      e.u(n);
    }
  }

  for (const auto& [holder, labels] : w.peers.all()) {
    e.u(holder.value);
    for (const auto& [name, peer] : labels) {
      e.s(name);
      e.u(peer.value);
    }
  }

  std::uint64_t pristine_undelegated = 0, pristine_delegated = 0;
  std::vector<std::tuple<std::uint64_t, std::uint64_t, Digest>> loose;
  for (GranuleIndex g = 0; g < gs.size(); ++g) {
    if (label[g] >= 0) continue;
    const Granule& gr = gs.at(g);
    const bool zero = gr.content.is_zero();
    if (zero && gr.state == GranuleState::Undelegated && gr.pas == PasTag::Normal) {
      ++pristine_undelegated;
    } else if (zero && gr.state == GranuleState::Delegated && gr.pas == PasTag::Realm) {
      ++pristine_delegated;
    } else {
      loose.emplace_back(static_cast<std::uint64_t>(gr.state), static_cast<std::uint64_t>(gr.pas), gr.content.digest());
    }
  }
  std::sort(loose.begin(), loose.end());
  e.u(pristine_undelegated);
  e.u(pristine_delegated);
  e.u(loose.size());
  for (const auto& [st, pas, dg] : loose) {
    e.u(st);
    e.u(pas);
    e.d(dg);
  }
  for (GranuleIndex g : by_label) {
    const Granule& gr = gs.at(g);
    e.u(static_cast<std::uint64_t>(gr.state));
    e.u(static_cast<std::uint64_t>(gr.pas));
    if (gr.content.is_zero()) {
      e.u(0);
    } else {
      e.u(1);
      e.d(gr.content.digest());
    }
  }
  return e.take();
}

nlohmann::ordered_json to_json(const ExplorationConfig& c) {
  nlohmann::ordered_json j;
  j["realms"] = c.realm_count;
  j["granules"] = c.granule_count;
  j["csm_max_size"] = c.csm_max_size;
  j["depth"] = c.depth;
  j["ipa_window"] = c.ipa_window;
  j["from_empty"] = c.from_empty;
  auto kinds = nlohmann::ordered_json::array();
  for (CommandKind k : c.enabled) kinds.push_back(std::string(to_string(k)));
  j["enabled"] = kinds;
  j["state_cap"] = c.state_cap;
  j["workers"] = c.workers;
  j["stop_on_violation"] = c.stop_on_violation;
  return j;
}

nlohmann::ordered_json to_json(const ExplorationReport& r) {
  auto examples = [](const std::vector<Counterexample>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& x : v) {
      nlohmann::ordered_json j;
      j["invariant"] = x.invariant;
      j["detail"] = x.detail;
      j["depth"] = x.path.size();
      j["path"] = x.path;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  nlohmann::ordered_json j;
  j["states"] = r.states;
  j["transitions"] = r.transitions;
  j["depth_reached"] = r.depth_reached;
  j["budget_exceeded"] = r.budget_exceeded;
  j["violation_count"] = r.violation_count;
  j["violations"] = examples(r.violations);
  j["oracle_checks"] = r.oracle_checks;
  j["oracle_mismatches"] = r.oracle_mismatches;
  j["oracle_examples"] = examples(r.oracle_examples);
  j["wall_ms"] = r.wall.count();
  return j;
}

namespace {

struct Node {
  std::uint32_t parent;
  Command cmd;
};

struct Candidate {
  Hash128 hash;
  std::uint32_t parent = 0;
  Command cmd;
  bool checked = false;
  std::vector<Violation> edge_violations;
  std::vector<Violation> state_violations;
  std::vector<OracleMismatch> mismatches;
};

class Explorer {
 public:
  Explorer(const ExplorationConfig& cfg, const TransitionObserver& observer)
      : cfg_(cfg), observer_(observer), root_(initial_world(cfg)) {
    for (unsigned k = 0; k < cfg.ipa_window + cfg.csm_max_size; ++k) probe_ipas_.push_back(Ipa::from_granule(k));
  }

  ExplorationReport run() {
    const auto start = std::chrono::steady_clock::now();
    if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    nodes_.push_back(Node{UINT32_MAX, {}});
    visited_.insert(hash_state(canonical_encoding(root_)));
    report_.states = 1;
    Candidate root_check;
    check_state(root_, root_check);
    record(root_check, 0);

    std::vector<std::uint32_t> frontier;
    if (root_check.state_violations.empty() && root_check.mismatches.empty()) frontier.push_back(0);
    for (unsigned d = 0; d < cfg_.depth && !frontier.empty() && !report_.budget_exceeded; ++d) {
      std::vector<std::uint32_t> next;
      const std::uint64_t states_before = report_.states;
      const std::size_t batch = std::max<std::size_t>(1, cfg_.workers) * 64;
      for (std::size_t i = 0; i < frontier.size() && !report_.budget_exceeded; i += batch) {
        const std::size_t end = std::min(frontier.size(), i + batch);
        std::vector<std::vector<Candidate>> results(end - i);
        run_batch(frontier, i, end, results);
        for (auto& cands : results) merge(cands, next);
        if (cfg_.stop_on_violation && report_.violation_count > 0) break;
      }
      if (report_.states > states_before) report_.depth_reached = d + 1;
      if (cfg_.stop_on_violation && report_.violation_count > 0) break;
      frontier = std::move(next);
    }
    report_.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return std::move(report_);
  }

 private:
  std::vector<Command> path_of(std::uint32_t idx) const {
    std::vector<Command> path;
    for (; idx != 0; idx = nodes_[idx].parent) path.push_back(nodes_[idx].cmd);
    std::reverse(path.begin(), path.end());
    return path;
  }

  World rebuild(std::uint32_t idx) const {
    World w = root_;
    for (const Command& c : path_of(idx)) (void)apply_command(w, c);
    w.rmm.events().clear();
    return w;
  }

  void check_state(const World& w, Candidate& c) const {
    c.checked = true;
    c.state_violations = check_invariants(w);
    if (cfg_.check_oracle) c.mismatches = oracle_equivalence(w.rmm, probe_ipas_);
  }

  void run_batch(const std::vector<std::uint32_t>& frontier, std::size_t begin, std::size_t end,
                 std::vector<std::vector<Candidate>>& results) {
    const unsigned workers = std::max(1u, cfg_.workers);
    if (workers == 1) {
      for (std::size_t i = begin; i < end; ++i) results[i - begin] = expand(frontier[i]);
      return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{begin};
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = cursor++; i < end; i = cursor++) results[i - begin] = expand(frontier[i]);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<Candidate> expand(std::uint32_t idx) {
    const World base = rebuild(idx);
    const StateSnapshot before = snapshot(base.rmm);
    std::vector<Candidate> out;
    for (const Command& cmd : enumerate_commands(base, cfg_)) {
      World next = base;
      const StepOutcome outcome = apply_command(next, cmd);
      Candidate c;
      c.parent = idx;
      c.cmd = cmd;
      c.edge_violations = check_transition(before, snapshot(next.rmm), next.rmm.events().all());
      if (observer_) {
        std::lock_guard lock(observer_mutex_);
        observer_(base, cmd, outcome, next);
      }
      next.rmm.events().clear();
      c.hash = hash_state(canonical_encoding(next));
      // visited_ is only written between batches.
      if (!visited_.count(c.hash)) check_state(next, c);
      out.push_back(std::move(c));
    }
    return out;
  }

  void record(const Candidate& c, std::uint32_t node) {
    auto add = [&](std::vector<Counterexample>& dst, std::string inv, std::string detail, bool edge) {
      if (dst.size() >= kMaxRecordedViolations) return;
      Counterexample x{std::move(inv), std::move(detail), {}};
      for (const Command& cmd : path_of(node)) x.path.push_back(to_string(cmd));
      if (edge) x.path.push_back(to_string(c.cmd));
      dst.push_back(std::move(x));
    };
    for (const auto& v : c.edge_violations) {
      ++report_.violation_count;
      add(report_.violations, v.invariant, v.detail, true);
    }
    for (const auto& v : c.state_violations) {
      ++report_.violation_count;
      add(report_.violations, v.invariant, v.detail, false);
    }
    report_.oracle_checks += c.checked && cfg_.check_oracle ? 1 : 0;
    report_.oracle_mismatches += c.mismatches.size();
    for (const auto& m : c.mismatches) {
      add(report_.oracle_examples, "oracle",
          m.actor + " granule " + std::to_string(m.granule) + " oracle=" + (m.oracle ? "allow" : "deny") +
              " operational=" + (m.operational ? "allow" : "deny"),
          false);
    }
  }

  void merge(std::vector<Candidate>& cands, std::vector<std::uint32_t>& next) {
    for (auto& c : cands) {
      ++report_.transitions;
      if (!c.edge_violations.empty()) {
        Candidate edge_only;
        edge_only.cmd = c.cmd;
        edge_only.edge_violations = std::move(c.edge_violations);
        record(edge_only, c.parent);
      }
      if (!visited_.insert(c.hash).second) continue;
      if (report_.states >= cfg_.state_cap) {
        report_.budget_exceeded = true;
        return;
      }
      const auto idx = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(Node{c.parent, c.cmd});
      ++report_.states;
      c.edge_violations.clear();
      record(c, idx);
      if (c.state_violations.empty() && c.mismatches.empty()) next.push_back(idx);
    }
  }

  const ExplorationConfig& cfg_;
  const TransitionObserver& observer_;
  std::mutex observer_mutex_;
  World root_;
  std::vector<Ipa> probe_ipas_;
  std::vector<Node> nodes_;
  std::unordered_set<Hash128, Hash128Hasher> visited_;
  ExplorationReport report_;
};

}  // namespace

ExplorationReport explore(const ExplorationConfig& config, const TransitionObserver& observer) {
  Explorer ex(config, observer);
  return ex.run();
}

}  // namespace csmsim
