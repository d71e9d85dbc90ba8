#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "move/rng.hpp"
#include "move/types.hpp"

namespace move {

// Binary frame-keep mask. kept counts the ones; min(sigma, T) <= kept <= T.
struct FrameMask {
  std::vector<std::uint8_t> bits;
  int kept = 0;

  int frames() const { return static_cast<int>(bits.size()); }
  // 1 x T row of 0/1 for mask broadcasting.
  Mat row() const;
};

FrameMask full_mask(int frames);

// Class-frequency-conditioned random mask: the kept count is uniform on
// [max(floor(tau * T), min(sigma, T)), T] and the kept positions are a
// uniform random subset. A fresh mask every call; nothing is cached.
FrameMask sample_mask(double tau, int frames, int sigma, Rng& rng);

// Two independent masks over the same instance, the two views feeding
// extrapolation. tau = 1 makes both all-ones.
std::pair<FrameMask, FrameMask> sample_pair(double tau, int frames, int sigma, Rng& rng);

}  // namespace move
