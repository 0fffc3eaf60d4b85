#pragma once

#include <string>

#include "covertime/network.hpp"

namespace covertime {

/// JSON network document:
///   {"states": ["a", "b", ...],
///    "edges": [{"from": "a", "to": "b", "rate": 1.0}, ...],
///    "start": "a",
///    "targets": ["b", ...]}
/// The diagonal of Q is derived from the edges. Unknown fields, duplicate
/// labels or edges, self-loops and unknown labels are rejected.
NetworkSpec parse_network_json(const std::string& text);
NetworkSpec read_network_file(const std::string& path);
std::string network_to_json(const NetworkSpec& spec);

/// g-dimensional periodic square lattice with `side` sites per dimension and
/// hop rate k between neighbours. Start at the origin, target the antipode
/// (side must be even).
NetworkSpec periodic_lattice(int g, int side, double k);

/// All states within `radius` hops of `base` (hops taken toward base).
StateSet states_within(const NetworkSpec& spec, const StateSet& base, int radius);

}  // namespace covertime
