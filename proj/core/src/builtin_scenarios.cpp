#include "csmsim/scenario.hpp"

namespace csmsim {

const std::map<std::string, std::string>& builtin_scenarios() {
  static const std::map<std::string, std::string> registry{
      {"happy_path", R"json({
  "schema": 1,
  "name": "happy_path",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "write", "args": {"ipa": "0x100000", "data": "hello from the provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "ro"}, "expect": {"ok": true}, "save": "share"},
    {"actor": "realm:C", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid"},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x200000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"ok": true}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x200000", "len": 23}, "expect": {"ok": true, "value": {"text": "hello from the provider"}}},
    {"actor": "realm:P", "op": "write", "args": {"ipa": "0x101000", "data": "second page"}, "expect": {"ok": true}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x201000", "len": 11}, "expect": {"ok": true, "value": {"text": "second page"}}}
  ]
})json"},
      {"two_consumers", R"json({
  "schema": 1,
  "name": "two_consumers",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob", "carol"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C1", "image": "consumer", "owner": "bob"}, {"alias": "C2", "image": "consumer", "owner": "carol"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C1"}, "expect": {"ok": true}, "save": "lC1"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C2"}, "expect": {"ok": true}, "save": "lC2"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C1", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC1"},
    {"actor": "realm:C2", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC2"},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC1", "label": "writer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC2", "label": "reader", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "owner:carol", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:writer", "perm": "rw"}, "expect": {"ok": true}, "save": "share1"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:reader", "perm": "ro"}, "expect": {"ok": true}, "save": "share2"},
    {"actor": "realm:C1", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid1"},
    {"actor": "realm:C1", "op": "csm_reserve", "args": {"sharing_id": "$sid1", "base": "0x200000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C1"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C1", "op": "csm_attach", "args": {"sharing_id": "$sid1"}, "expect": {"ok": true}},
    {"actor": "realm:C2", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid2"},
    {"actor": "realm:C2", "op": "csm_reserve", "args": {"sharing_id": "$sid2", "base": "0x300000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C2"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C2", "op": "csm_attach", "args": {"sharing_id": "$sid2"}, "expect": {"ok": true}},
    {"actor": "realm:C1", "op": "write", "args": {"ipa": "0x201000", "data": "written by C1"}, "expect": {"ok": true}},
    {"actor": "realm:C2", "op": "read", "args": {"ipa": "0x301000", "len": 13}, "expect": {"ok": true, "value": {"text": "written by C1"}}},
    {"actor": "realm:P", "op": "read", "args": {"ipa": "0x101000", "len": 13}, "expect": {"ok": true, "value": {"text": "written by C1"}}},
    {"actor": "realm:C2", "op": "write", "args": {"ipa": "0x300000", "data": "nope"}, "expect": {"error": "Fault"}},
    {"actor": "realm:P", "op": "csm_revoke", "args": {"sharing_id": "$share2.sharing_id"}, "expect": {"ok": true}},
    {"actor": "realm:C2", "op": "read", "args": {"ipa": "0x301000", "len": 13}, "expect": {"error": "Fault"}},
    {"actor": "realm:C1", "op": "read", "args": {"ipa": "0x201000", "len": 13}, "expect": {"ok": true, "value": {"text": "written by C1"}}}
  ]
})json"},
      {"dedup_accounting", R"json({
  "schema": 1,
  "name": "dedup_accounting",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob", "carol"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C1", "image": "consumer", "owner": "bob"}, {"alias": "C2", "image": "consumer", "owner": "carol"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C1"}, "expect": {"ok": true}, "save": "lC1"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C2"}, "expect": {"ok": true}, "save": "lC2"},
    {"actor": "host", "op": "count_data_granules", "args": {}, "expect": {"ok": true, "value": {"data": 3}}, "save": "initial"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C1", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC1"},
    {"actor": "realm:C2", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC2"},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC1", "label": "c1", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC2", "label": "c2", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "owner:carol", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 4}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:c1", "perm": "ro"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:c2", "perm": "ro"}, "expect": {"ok": true}},
    {"actor": "realm:C1", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid1"},
    {"actor": "realm:C1", "op": "csm_reserve", "args": {"sharing_id": "$sid1", "base": "0x200000", "size": 4}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C1"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C1", "op": "csm_attach", "args": {"sharing_id": "$sid1"}, "expect": {"ok": true}},
    {"actor": "realm:C2", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid2"},
    {"actor": "realm:C2", "op": "csm_reserve", "args": {"sharing_id": "$sid2", "base": "0x200000", "size": 4}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C2"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C2", "op": "csm_attach", "args": {"sharing_id": "$sid2"}, "expect": {"ok": true}},
    {"actor": "host", "op": "count_data_granules", "args": {}, "expect": {"ok": true, "value": {"data": 7}}, "save": "shared"},
    {"actor": "realm:C1", "op": "csm_detach", "args": {"sharing_id": "$sid1"}, "expect": {"ok": true}},
    {"actor": "realm:C2", "op": "csm_detach", "args": {"sharing_id": "$sid2"}, "expect": {"ok": true}},
    {"actor": "host", "op": "map_private", "args": {"realm": "C1", "base": "0x200000", "size": 4}, "expect": {"ok": true}},
    {"actor": "host", "op": "map_private", "args": {"realm": "C2", "base": "0x200000", "size": 4}, "expect": {"ok": true}},
    {"actor": "host", "op": "count_data_granules", "args": {}, "expect": {"ok": true, "value": {"data": 15}}, "save": "baseline"}
  ]
})json"},
      {"attack_impersonation", R"json({
  "schema": 1,
  "name": "attack_impersonation",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}, "impostor": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "impostor image"}]}},
  "owners": ["alice", "bob", "mallory"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}, {"alias": "X", "image": "impostor", "owner": "mallory"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "X"}, "expect": {"ok": true}, "save": "lX"},
    {"actor": "realm:X", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokX"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokX", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": false}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokX", "label": "consumer", "image": "consumer"}, "expect": {"error": "VerificationFailed"}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 1}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "rw"}, "expect": {"error": "NoSuchRealm"}},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "rw"}, "expect": {"ok": true}, "save": "share"},
    {"actor": "realm:X", "op": "csm_reserve", "args": {"sharing_id": "$share.sharing_id", "base": "0x200000", "size": 1}, "expect": {"error": "WrongConsumer"}},
    {"actor": "realm:X", "op": "compose_sharing_id", "args": {"p": "$share.sharing_id.p", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "forged"},
    {"actor": "realm:X", "op": "csm_reserve", "args": {"sharing_id": "$forged", "base": "0x200000", "size": 1}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "X"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:X", "op": "csm_attach", "args": {"sharing_id": "$forged"}, "expect": {"error": "NotShared"}},
    {"actor": "realm:X", "op": "read", "args": {"ipa": "0x200000", "len": 1}, "expect": {"error": "Fault"}}
  ]
})json"},
      {"attack_fake_csm", R"json({
  "schema": 1,
  "name": "attack_fake_csm",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": 9, "peer": "peer:consumer", "perm": "rw"}, "expect": {"error": "NoSuchCsm"}},
    {"actor": "realm:C", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid"},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"error": "NotShared"}},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x200000", "size": 1}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"error": "NotShared"}},
    {"actor": "realm:C", "op": "csm_create", "args": {"base": "0x300000", "size": 1}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "own"},
    {"actor": "realm:C", "op": "csm_share", "args": {"csm": "$own.csm_id", "peer": "self", "perm": "rw"}, "expect": {"error": "SelfShare"}}
  ]
})json"},
      {"attack_oob_access", R"json({
  "schema": 1,
  "name": "attack_oob_access",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "write", "args": {"ipa": "0x100000", "data": "shared"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "write", "args": {"ipa": "0x0", "data": "provider secret"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "ro"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100800", "size": 1}, "expect": {"error": "Unaligned"}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x80000000", "size": 1}, "expect": {"error": "BadState"}},
    {"actor": "realm:C", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid"},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x200000", "size": 3}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"error": "SizeMismatch"}},
    {"actor": "realm:C", "op": "csm_detach", "args": {"sharing_id": "$sid"}, "expect": {"ok": true}},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x200000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"ok": true}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x200000", "len": 6}, "expect": {"ok": true, "value": {"text": "shared"}}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x202000", "len": 1}, "expect": {"error": "Fault"}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x1ff000", "len": 1}, "expect": {"error": "Fault"}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x0", "len": 14}, "expect": {"ok": true, "value": {"text": "consumer image"}}}
  ]
})json"},
      {"attack_overlap_reserve", R"json({
  "schema": 1,
  "name": "attack_overlap_reserve",
  "seed": 7,
  "granules": 64,
  "host_policy": "Cooperative",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "rw"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x101000", "size": 2}, "expect": {"error": "Overlap"}},
    {"actor": "realm:C", "op": "csm_create", "args": {"base": "0x200000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}},
    {"actor": "realm:C", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid"},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x201000", "size": 2}, "expect": {"error": "Overlap"}},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x1ff000", "size": 2}, "expect": {"error": "Overlap"}},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x300000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x400000", "size": 2}, "expect": {"error": "AlreadyExists"}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"ok": true}}
  ]
})json"},
      {"attack_toctou_rd_swap", R"json({
  "schema": 1,
  "name": "attack_toctou_rd_swap",
  "seed": 7,
  "granules": 64,
  "host_policy": "ToctouSwapper",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 1}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "host", "op": "toctou_swap", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "swap"},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "rw"}, "expect": {"error": "NoSuchRealm"}},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC2"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC2", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true, "realm_id": "$swap.new_id"}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC2", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "rw"}, "expect": {"ok": true}}
  ]
})json"},
      {"attack_host_probe", R"json({
  "schema": 1,
  "name": "attack_host_probe",
  "seed": 7,
  "granules": 64,
  "host_policy": "Prober",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "realm:P", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokP"},
    {"actor": "realm:C", "op": "attestation_token", "args": {}, "expect": {"ok": true}, "save": "tokC"},
    {"actor": "owner:alice", "op": "verify_token", "args": {"token": "$tokC", "image": "consumer"}, "expect": {"ok": true, "value": {"valid": true}}},
    {"actor": "owner:alice", "op": "release_peer_id", "args": {"token": "$tokC", "label": "consumer", "image": "consumer"}, "expect": {"ok": true}},
    {"actor": "owner:bob", "op": "release_peer_id", "args": {"token": "$tokP", "label": "provider", "image": "provider"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"completed": "CsmCreated"}}, "save": "csm"},
    {"actor": "realm:P", "op": "write", "args": {"ipa": "0x100000", "data": "confidential"}, "expect": {"ok": true}},
    {"actor": "realm:P", "op": "csm_share", "args": {"csm": "$csm.csm_id", "peer": "peer:consumer", "perm": "ro"}, "expect": {"ok": true}},
    {"actor": "realm:C", "op": "compose_sharing_id", "args": {"p": "peer:provider", "c": "self", "n": 0}, "expect": {"ok": true}, "save": "sid"},
    {"actor": "realm:C", "op": "csm_reserve", "args": {"sharing_id": "$sid", "base": "0x200000", "size": 2}, "expect": {"exit": "CRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "C"}, "expect": {"ok": true, "value": {"completed": "CsmReserved"}}},
    {"actor": "realm:C", "op": "csm_attach", "args": {"sharing_id": "$sid"}, "expect": {"ok": true}},
    {"actor": "host", "op": "probe_all", "args": {}, "expect": {"ok": true, "value": {"realm_pas_successes": 0}}},
    {"actor": "host", "op": "physical_read", "args": {"granule": "$lP.data.0", "len": 8}, "expect": {"error": "Fault"}},
    {"actor": "host", "op": "physical_write", "args": {"granule": "$lC.data.0", "data": "overwrite"}, "expect": {"error": "Fault"}},
    {"actor": "host", "op": "physical_read", "args": {"granule": "$lP.rd", "len": 8}, "expect": {"error": "Fault"}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x200000", "len": 12}, "expect": {"ok": true, "value": {"text": "confidential"}}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x0", "len": 14}, "expect": {"ok": true, "value": {"text": "consumer image"}}}
  ]
})json"},
      {"attack_double_map", R"json({
  "schema": 1,
  "name": "attack_double_map",
  "seed": 7,
  "granules": 64,
  "host_policy": "DoubleMapper",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice", "bob"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}, {"alias": "C", "image": "consumer", "owner": "bob"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "host", "op": "launch_realm", "args": {"realm": "C"}, "expect": {"ok": true}, "save": "lC"},
    {"actor": "host", "op": "double_map", "args": {"victim": "P", "realm": "C", "ipa": "0x1000"}, "expect": {"error": "AlreadyMapped"}},
    {"actor": "host", "op": "granule_undelegate", "args": {"granule": "$lP.data.0"}, "expect": {"error": "BadState"}},
    {"actor": "host", "op": "data_create_unknown", "args": {"realm": "C", "granule": "$lP.data.0", "ipa": "0x2000"}, "expect": {"error": "AlreadyMapped"}},
    {"actor": "host", "op": "data_create_unknown", "args": {"realm": "C", "granule": "$lP.rd", "ipa": "0x2000"}, "expect": {"error": "BadState"}},
    {"actor": "realm:C", "op": "read", "args": {"ipa": "0x1000", "len": 1}, "expect": {"error": "Fault"}},
    {"actor": "realm:P", "op": "read", "args": {"ipa": "0x0", "len": 14}, "expect": {"ok": true, "value": {"text": "provider image"}}}
  ]
})json"},
      {"starving_host", R"json({
  "schema": 1,
  "name": "starving_host",
  "seed": 7,
  "granules": 64,
  "host_policy": "Starve",
  "images": {"provider": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "provider image"}]}, "consumer": {"ipa_width": 32, "pages": [{"ipa": "0x0", "text": "consumer image"}]}},
  "owners": ["alice"],
  "realms": [{"alias": "P", "image": "provider", "owner": "alice"}],
  "steps": [
    {"actor": "host", "op": "launch_realm", "args": {"realm": "P"}, "expect": {"ok": true}, "save": "lP"},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x100000", "size": 2}, "expect": {"exit": "PRealmCsm"}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"exit": {"reason": "PRealmCsm"}, "maps": 0}}},
    {"actor": "host", "op": "service", "args": {"realm": "P"}, "expect": {"ok": true, "value": {"exit": {"reason": "PRealmCsm"}, "maps": 0}}},
    {"actor": "realm:P", "op": "csm_create", "args": {"base": "0x300000", "size": 1}, "expect": {"error": "BadState"}},
    {"actor": "host", "op": "count_data_granules", "args": {}, "expect": {"ok": true, "value": {"data": 1}}},
    {"actor": "realm:P", "op": "read", "args": {"ipa": "0x0", "len": 14}, "expect": {"ok": true, "value": {"text": "provider image"}}}
  ]
})json"},
  };
  return registry;
}

}  // namespace csmsim
