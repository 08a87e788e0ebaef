#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "csmsim/attestation.hpp"
#include "csmsim/events.hpp"
#include "csmsim/host.hpp"
#include "csmsim/invariants.hpp"
#include "csmsim/rmm.hpp"

namespace csmsim {

using Json = nlohmann::ordered_json;

std::string to_hex(std::span<const std::byte> bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);
Result<std::vector<std::byte>> from_hex(std::string_view hex);

Json to_json(const SharingId& sid);
Json to_json(const RecExit& exit);
Json to_json(const Event& event);
Json to_json(const AttestationToken& token);
Json to_json(const RsiCompletion& completion);
Json to_json(const RmiCall& call);
Json to_json(const Violation& v);

}  // namespace csmsim
