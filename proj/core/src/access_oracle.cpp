#include "csmsim/access_oracle.hpp"

#include <algorithm>
#include <set>

namespace csmsim {
namespace {

// Rows: Normal, Secure, Realm, Root. Columns: PAS Normal, Secure, Realm, Root.
constexpr bool kTable1[4][4] = {
    {true, false, false, false},
    {true, true, false, false},
    {true, false, true, false},
    {true, true, true, true},
};

bool table1(SecurityState s, PasTag t) { return kTable1[static_cast<int>(s)][static_cast<int>(t)]; }

constexpr SecurityState kWorlds[] = {SecurityState::Normal, SecurityState::Secure, SecurityState::Realm,
                                     SecurityState::Root};

bool admits(Reach r, AccessKind k) { return k == AccessKind::Read ? r != Reach::None : r == Reach::ReadWrite; }

const char* kind_name(AccessKind k) { return k == AccessKind::Read ? "read" : "write"; }

}  // namespace

std::string_view to_string(Reach r) noexcept {
  switch (r) {
    case Reach::None: return "none";
    case Reach::Read: return "read";
    case Reach::ReadWrite: return "write";
  }
  return "?";
}

Reach AccessMatrix::realm(RealmId id, GranuleIndex g) const {
  auto it = std::find(realms.begin(), realms.end(), id);
  if (it == realms.end()) return Reach::None;
  return realm_rows.at(static_cast<std::size_t>(it - realms.begin())).at(g);
}

AccessMatrix access_oracle(const Rmm& rmm) {
  const auto gpt = rmm.granules().gpt();
  AccessMatrix m;
  for (SecurityState s : kWorlds) {
    std::vector<Reach> row(gpt.size(), Reach::None);
    for (std::size_t g = 0; g < gpt.size(); ++g) row[g] = table1(s, gpt[g]) ? Reach::ReadWrite : Reach::None;
    m.world_rows.push_back(std::move(row));
  }
  for (const auto& [id, r] : rmm.realms()) {
    if (r.lifecycle != RealmLifecycle::Active) continue;
    std::vector<Reach> row(gpt.size(), Reach::None);
    auto grant = [&](GranuleIndex pa, Reach reach) {
      if (pa >= gpt.size() || !table1(SecurityState::Realm, gpt[pa])) return;
      row[pa] = std::max(row[pa], reach);
    };
    for (const auto& [g, e] : r.rtt.entries()) {
      grant(e.pa, e.perm == Permission::ReadWrite ? Reach::ReadWrite : Reach::Read);
    }
    for (const auto& [g, pa] : r.rtt.unprotected()) grant(pa, Reach::ReadWrite);
    m.realms.push_back(id);
    m.realm_rows.push_back(std::move(row));
  }
  return m;
}

std::vector<OracleMismatch> oracle_equivalence(const Rmm& rmm, std::span<const Ipa> extra_ipas) {
  const AccessMatrix m = access_oracle(rmm);
  const GranuleSpace& gs = rmm.granules();
  std::vector<OracleMismatch> out;
  for (SecurityState s : kWorlds) {
    for (GranuleIndex g = 0; g < gs.size(); ++g) {
      const bool op = gs.check_access(s, g).ok();
      for (AccessKind k : {AccessKind::Read, AccessKind::Write}) {
        const bool want = admits(m.world(s, g), k);
        if (want != op) out.push_back({std::string(to_string(s)) + ":" + kind_name(k), g, k, want, op});
      }
    }
  }
  for (std::size_t i = 0; i < m.realms.size(); ++i) {
    const RealmId id = m.realms[i];
    const Realm& r = rmm.realms().at(id);
    std::set<std::uint64_t> ipas;
    for (const auto& [g, e] : r.rtt.entries()) ipas.insert(g);
    for (const auto& [g, pa] : r.rtt.unprotected()) ipas.insert(g);
    for (Ipa ipa : extra_ipas) ipas.insert(ipa.granule());
    for (AccessKind k : {AccessKind::Read, AccessKind::Write}) {
      std::vector<bool> reached(gs.size(), false);
      for (auto g : ipas) {
        if (auto pa = rmm.check_realm_access(id, Ipa::from_granule(g), k); pa && *pa < gs.size()) reached[*pa] = true;
      }
      for (GranuleIndex g = 0; g < gs.size(); ++g) {
        const bool want = admits(m.realm_rows[i][g], k);
        if (want != reached[g]) out.push_back({"realm" + std::to_string(id.value), g, k, want, reached[g]});
      }
    }
  }
  return out;
}

}  // namespace csmsim
