#pragma once

#include <string>

#include "crnlab/parser.hpp"

namespace crnlab::test {

inline ReactionNetwork net(const std::string& text) { return parse_network({text, "test"}); }

inline ReactionNetwork mm_inf(double lambda = 1.0, double mu = 1.0) {
  return net("0 <-> S1 @ " + std::to_string(lambda) + ", " + std::to_string(mu) + "\n");
}

inline ReactionNetwork t1(double k1 = 1.0, double k2 = 1.0, double k12 = 1.0) {
  return net("%species S1 S2\nS2 -> S1 + S2 @ " + std::to_string(k2) + "\nS1 + S2 -> S1 @ " + std::to_string(k12) +
             "\nS1 -> S2 @ " + std::to_string(k1) + "\n");
}

inline ReactionNetwork ex1() {
  return net("%species S1 S2\n0 <-> S2 @ 1, 1\nS2 -> S1 + S2 @ 1\nS1 + S2 -> 2 S1 @ 1\n2 S1 -> S2 @ 1\n");
}

inline ReactionNetwork cap(int p, double k0 = 1, double k1 = 1, double k2 = 1, double k3 = 1) {
  const std::string ps = std::to_string(p);
  return net("0 <-> S1 + S2 @ " + std::to_string(k0) + ", " + std::to_string(k1) + "\n" + ps + " S1 + S2 <-> " + ps +
             " S1 + 2 S2 @ " + std::to_string(k2) + ", " + std::to_string(k3) + "\n");
}

inline ReactionNetwork agazzi() {
  return net("0 -> S1 + S2 @ 1\nS2 -> 0 @ 1\n3 S1 + 2 S2 -> 3 S2 @ 1\n3 S2 -> 2 S2 @ 1\n");
}

}  // namespace crnlab::test
