#include "csmsim/host.hpp"

#include <algorithm>
#include <array>

namespace csmsim {
namespace {

constexpr std::array<std::pair<HostPolicy, std::string_view>, 6> kPolicyNames{{
    {HostPolicy::Cooperative, "Cooperative"},
    {HostPolicy::Starve, "Starve"},
    {HostPolicy::WrongGranule, "WrongGranule"},
    {HostPolicy::Prober, "Prober"},
    {HostPolicy::ToctouSwapper, "ToctouSwapper"},
    {HostPolicy::DoubleMapper, "DoubleMapper"},
}};

template <class R>
std::string outcome_of(const R& r) {
  return r ? std::string("ok") : std::string(to_string(r.error()));
}

template <class R>
R record(RmiLog& log, std::string name, std::vector<std::uint64_t> args, R r) {
  log.push_back(RmiCall{std::move(name), std::move(args), outcome_of(r)});
  return r;
}

Ipa nth(Ipa base, std::uint64_t k) { return Ipa::from_granule(base.granule() + k); }

Result<GranuleIndex> rd_of(const Rmm& rmm, RealmId id) {
  auto r = rmm.registry_lookup(id);
  if (!r) return r.error();
  return r->get().rd;
}

Result<LaunchedRealm> launch_at(Host& host, Rmm& rmm, GranuleIndex rd, const RealmImage& image, RmiLog& log) {
  auto id = record(log, "rmi_realm_create", {rd, image.ipa_width}, rmm.rmi_realm_create(rd, image.ipa_width));
  if (!id) return id.error();
  auto apt = host.allocate(rmm, log);
  if (!apt) return apt.error();
  if (auto r = record(log, "rmi_apt_create", {rd, *apt}, rmm.rmi_apt_create(rd, *apt)); !r) return r.error();
  auto rec = host.allocate(rmm, log);
  if (!rec) return rec.error();
  if (auto r = record(log, "rmi_rec_create", {rd, *rec}, rmm.rmi_rec_create(rd, *rec)); !r) return r.error();
  for (const auto& page : image.pages) {
    if (auto t = host.ensure_table(rmm, rd, page.ipa, log); !t) return t.error();
    auto data = host.allocate(rmm, log);
    if (!data) return data.error();
    auto r = record(log, "rmi_data_create", {rd, *data, page.ipa.value},
                    rmm.rmi_data_create(rd, *data, page.ipa, page.content));
    if (!r) return r.error();
  }
  if (auto r = record(log, "rmi_realm_activate", {rd}, rmm.rmi_realm_activate(rd)); !r) return r.error();
  return LaunchedRealm{*id, rd};
}

}  // namespace

std::string_view to_string(HostPolicy p) noexcept {
  for (const auto& [v, name] : kPolicyNames) {
    if (v == p) return name;
  }
  return "?";
}

std::optional<HostPolicy> host_policy_from_string(std::string_view name) noexcept {
  for (const auto& [v, n] : kPolicyNames) {
    if (n == name) return v;
  }
  return std::nullopt;
}

std::size_t count_calls(const RmiLog& log, std::string_view name) {
  return static_cast<std::size_t>(
      std::count_if(log.begin(), log.end(), [&](const RmiCall& c) { return c.name == name; }));
}

Result<GranuleIndex> Host::allocate(Rmm& rmm, RmiLog& log) {
  const GranuleSpace& gs = rmm.granules();
  for (GranuleIndex g = 0; g < gs.size(); ++g) {
    if (gs.at(g).state != GranuleState::Undelegated || pinned_.count(g)) continue;
    if (auto r = record(log, "granule_delegate", {g}, rmm.granule_delegate(g)); !r) return r.error();
    return g;
  }
  return Error::OutOfGranules;
}

Result<LaunchedRealm> Host::launch_realm(Rmm& rmm, const RealmImage& image, RmiLog& log) {
  auto rd = allocate(rmm, log);
  if (!rd) return rd.error();
  return launch_at(*this, rmm, *rd, image, log);
}

Result<void> Host::ensure_table(Rmm& rmm, GranuleIndex rd, Ipa ipa, RmiLog& log) {
  const Realm* realm = rmm.realm_by_rd(rd);
  if (!realm) return Error::BadState;
  if (realm->rtt.backed(ipa)) return {};
  auto g = allocate(rmm, log);
  if (!g) return g.error();
  const Ipa block = Ipa::from_granule(Rtt::block_of(ipa) * kRttEntriesPerTable);
  return record(log, "rmi_rtt_create", {rd, *g, block.value}, rmm.rmi_rtt_create(rd, *g, block));
}

Result<void> Host::map_private(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size, RmiLog& log) {
  for (std::uint64_t k = 0; k < size; ++k) {
    const Ipa ipa = nth(base, k);
    if (auto t = ensure_table(rmm, rd, ipa, log); !t) return t;
    auto g = allocate(rmm, log);
    if (!g) return g.error();
    auto r = record(log, "rmi_data_create_unknown", {rd, *g, ipa.value}, rmm.rmi_data_create_unknown(rd, *g, ipa));
    if (!r) return r;
  }
  return {};
}

Result<RmiLog> Host::populate(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size) {
  RmiLog log;
  for (std::uint64_t k = 0; k < size; ++k) {
    const Ipa ipa = nth(base, k);
    auto entry = record(log, "rmi_rtt_read_entry", {rd, ipa.value}, rmm.rmi_rtt_read_entry(rd, ipa));
    if (!entry) return entry.error();
    if (entry->state == RttEntryState::Assigned) continue;
    if (auto t = ensure_table(rmm, rd, ipa, log); !t) return t.error();
    auto g = allocate(rmm, log);
    if (!g) return g.error();
    auto r = record(log, "rmi_data_create_unknown", {rd, *g, ipa.value}, rmm.rmi_data_create_unknown(rd, *g, ipa));
    if (!r) return r.error();
  }
  return log;
}

Result<RmiLog> Host::reclaim(Rmm& rmm, GranuleIndex rd, Ipa base, std::uint64_t size) {
  RmiLog log;
  for (std::uint64_t k = 0; k < size; ++k) {
    const Ipa ipa = nth(base, k);
    if (auto t = ensure_table(rmm, rd, ipa, log); !t) return t.error();
    auto entry = record(log, "rmi_rtt_read_entry", {rd, ipa.value}, rmm.rmi_rtt_read_entry(rd, ipa));
    if (!entry) return entry.error();
    if (entry->state == RttEntryState::Unassigned) continue;
    auto pa = record(log, "rmi_data_destroy", {rd, ipa.value}, rmm.rmi_data_destroy(rd, ipa));
    if (!pa) return pa.error();
    if (auto u = record(log, "granule_undelegate", {*pa}, rmm.granule_undelegate(*pa)); !u) return u.error();
  }
  return log;
}

Result<RmiLog> Host::handle_exit_p_csm(Rmm& rmm, const RecExit& exit) {
  if (policy_ == HostPolicy::Starve) return RmiLog{};
  auto rd = rd_of(rmm, exit.realm);
  if (!rd) return rd.error();
  csm_ranges_.insert({exit.realm.value, exit.ipa_base.value, exit.size});
  const Ipa base = policy_ == HostPolicy::WrongGranule ? nth(exit.ipa_base, 1) : exit.ipa_base;
  return populate(rmm, *rd, base, exit.size);
}

Result<RmiLog> Host::handle_exit_c_csm(Rmm& rmm, const RecExit& exit) {
  if (policy_ == HostPolicy::Starve) return RmiLog{};
  auto rd = rd_of(rmm, exit.realm);
  if (!rd) return rd.error();
  csm_ranges_.insert({exit.realm.value, exit.ipa_base.value, exit.size});
  const Ipa base = policy_ == HostPolicy::WrongGranule ? nth(exit.ipa_base, 1) : exit.ipa_base;
  return reclaim(rmm, *rd, base, exit.size);
}

void Host::handle_remove_csm(const RecExit& exit) {
  csm_ranges_.erase({exit.realm.value, exit.ipa_base.value, exit.size});
}

Result<RsiCompletion> Host::service(Rmm& rmm, GranuleIndex rd, RmiLog& log) {
  const Realm* realm = rmm.realm_by_rd(rd);
  if (!realm) return Error::BadState;
  if (realm->rec && realm->rec->pending_exit) {
    const RecExit exit = *realm->rec->pending_exit;
    auto handled = exit.reason == ExitReason::PRealmCsm ? handle_exit_p_csm(rmm, exit) : handle_exit_c_csm(rmm, exit);
    if (!handled) return handled.error();
    log.insert(log.end(), handled->begin(), handled->end());
  }
  return record(log, "rmi_rec_enter", {rd}, rmm.rmi_rec_enter(rd));
}

void Host::drain_remove_exits(const Rmm& rmm) {
  const auto& events = rmm.events().all();
  if (event_cursor_ > events.size()) event_cursor_ = 0;
  for (; event_cursor_ < events.size(); ++event_cursor_) {
    const auto* e = std::get_if<ExitEvent>(&events[event_cursor_]);
    if (e && e->exit.reason == ExitReason::RemoveCsm) handle_remove_csm(e->exit);
  }
}

AdversarialOutcome Host::adversarial_step(Rmm& rmm, std::optional<GranuleIndex> target,
                                          std::optional<GranuleIndex> other, Ipa ipa, const RealmImage* image) {
  AdversarialOutcome out;
  out.policy = policy_;
  switch (policy_) {
    case HostPolicy::Prober: {
      const std::array<std::byte, 1> poke{std::byte{0xEE}};
      for (GranuleIndex g = 0; g < rmm.granules().size(); ++g) {
        const bool realm_pas = rmm.granules().gpt()[g] == PasTag::Realm;
        ++out.attempts;
        if (rmm.physical_read(SecurityState::Normal, g, 0, 1) && realm_pas) ++out.successes;
        // Normal-PAS granules are the host's own memory; writing them proves nothing.
        if (rmm.granules().gpt()[g] != PasTag::Normal) {
          ++out.attempts;
          if (rmm.physical_write(SecurityState::Normal, g, 0, poke) && realm_pas) ++out.successes;
        }
      }
      break;
    }
    case HostPolicy::DoubleMapper: {
      if (!target || !other) {
        out.error = Error::InvalidArgument;
        break;
      }
      const Realm* victim = rmm.realm_by_rd(*target);
      if (!victim || victim->rtt.entries().empty()) {
        out.error = Error::NotMapped;
        break;
      }
      const GranuleIndex pa = victim->rtt.entries().begin()->second.pa;
      ++out.attempts;
      auto r = record(out.calls, "rmi_data_create_unknown", {*other, pa, ipa.value},
                      rmm.rmi_data_create_unknown(*other, pa, ipa));
      if (r) {
        ++out.successes;
      } else {
        out.error = r.error();
      }
      break;
    }
    case HostPolicy::ToctouSwapper: {
      const Realm* realm = target ? rmm.realm_by_rd(*target) : nullptr;
      if (!realm || !image) {
        out.error = Error::InvalidArgument;
        break;
      }
      out.old_realm = realm->id;
      ++out.attempts;
      if (auto d = record(out.calls, "rmi_realm_destroy", {*target}, rmm.rmi_realm_destroy(*target)); !d) {
        out.error = d.error();
        break;
      }
      auto relaunched = launch_at(*this, rmm, *target, *image, out.calls);
      if (!relaunched) {
        out.error = relaunched.error();
        break;
      }
      out.new_realm = relaunched->id;
      break;
    }
    case HostPolicy::Cooperative:
    case HostPolicy::Starve:
    case HostPolicy::WrongGranule:
      break;
  }
  return out;
}

}  // namespace csmsim
