#include "move/dfs.hpp"

#include <algorithm>
#include <cmath>

#include "move/errors.hpp"

namespace move {

Mat FrameMask::row() const {
  Mat m(1, frames());
  for (int t = 0; t < frames(); ++t) m(0, t) = bits[static_cast<std::size_t>(t)] ? 1.0 : 0.0;
  return m;
}

FrameMask full_mask(int frames) {
  if (frames < 1) throw ArgumentError("full_mask: frames must be positive");
  FrameMask mask;
  mask.bits.assign(static_cast<std::size_t>(frames), 1);
  mask.kept = frames;
  return mask;
}

FrameMask sample_mask(double tau, int frames, int sigma, Rng& rng) {
  if (frames < 1) throw ArgumentError("sample_mask: frames must be positive");
  if (sigma < 1) throw ArgumentError("sample_mask: sigma must be positive");
  if (tau < 0.0 || tau > 1.0) throw ArgumentError("sample_mask: tau must be in [0, 1]");

  const int floor_term = static_cast<int>(std::floor(tau * static_cast<double>(frames)));
  // Lower bound clamped to T so the uniform support is never empty.
  const int lo = std::min(frames, std::max(floor_term, std::min(sigma, frames)));
  const int kept = static_cast<int>(uniform_int(rng, lo, frames));

  FrameMask mask;
  mask.bits.assign(static_cast<std::size_t>(frames), 0);
  mask.kept = kept;
  for (int t : random_subset(frames, kept, rng)) {
    mask.bits[static_cast<std::size_t>(t)] = 1;
  }
  return mask;
}

std::pair<FrameMask, FrameMask> sample_pair(double tau, int frames, int sigma, Rng& rng) {
  FrameMask first = sample_mask(tau, frames, sigma, rng);
  FrameMask second = sample_mask(tau, frames, sigma, rng);
  return {std::move(first), std::move(second)};
}

}  // namespace move
