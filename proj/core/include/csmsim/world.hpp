#pragma once

#include "csmsim/attestation.hpp"
#include "csmsim/host.hpp"
#include "csmsim/rmm.hpp"

namespace csmsim {

// Everything one simulation owns. Copyable: the explorer clones worlds.
struct World {
  Rmm rmm;
  Host host;
  PeerDirectory peers;

  World() = default;
  World(Rmm::Config config, HostPolicy policy);
};

}  // namespace csmsim
