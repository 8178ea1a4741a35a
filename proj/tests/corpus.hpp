#pragma once

#include <vector>

#include "critscat/model/packet.hpp"

namespace critscat::testing {

struct CorpusEntry {
  double eps, R;
  PacketShape shape;
};

// momentum widths stay resolvable by x/tau sampling at tau = 1 on the 4096/L=200 grid
inline std::vector<CorpusEntry> corpus() {
  using L = PacketShape::Lobes;
  using P = PacketShape::Profile;
  return {
      {0.5, 4.0, {P::gaussian, L::both, 5.2}},   {0.5, 4.0, {P::gaussian, L::positive, 5.2}},
      {0.5, 4.0, {P::gaussian, L::negative, 5.2}}, {0.25, 2.5, {P::gaussian, L::both, 5.2}},
      {1.0, 6.0, {P::gaussian, L::both, 6.0}},   {0.5, 3.0, {P::gaussian, L::positive, 6.0}},
      {0.3, 5.0, {P::gaussian, L::both, 7.0}},   {0.75, 4.0, {P::gaussian, L::negative, 5.2}},
      {0.2, 3.0, {P::gaussian, L::positive, 5.5}}, {1.0, 8.0, {P::gaussian, L::both, 8.0}},
  };
}

}  // namespace critscat::testing
