#include "csmsim/world.hpp"

namespace csmsim {

World::World(Rmm::Config config, HostPolicy policy) : rmm(config), host(policy) {}

}  // namespace csmsim
