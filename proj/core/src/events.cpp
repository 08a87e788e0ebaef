#include "csmsim/events.hpp"

namespace csmsim {

std::string_view to_string(ExitReason r) noexcept {
  switch (r) {
    case ExitReason::PRealmCsm: return "PRealmCsm";
    case ExitReason::CRealmCsm: return "CRealmCsm";
    case ExitReason::RemoveCsm: return "RemoveCsm";
  }
  return "?";
}

}  // namespace csmsim
