#pragma once

#include <span>
#include <vector>

#include "move/rng.hpp"
#include "move/types.hpp"

namespace move {

// Augmented (feature, soft-label) pair drawn from the extrapolation-then-
// interpolation vicinity.
struct VicinitySample {
  Vec feature;  // 2 * D_p
  Vec label;    // S, entries in [0, 1]
};

// Per-batch mixing coefficients, drawn once so the tape path in the trainer
// and the plain path here use identical randomness: per-instance omega,
// then the pairing permutation, then per-pair lambda.
struct MixPlan {
  std::vector<double> omega;   // in [1, 2]; 1 when extrapolation is off
  std::vector<int> pairing;    // identity when interpolation is off
  std::vector<double> lambda;  // in [0, 1]; 1 when interpolation is off
};

MixPlan draw_mix_plan(int batch, double alpha, bool extrapolation, bool interpolation, Rng& rng);

// Dynamic extrapolation between two views of the same instance:
// z = omega * u + (1 - omega) * v with omega ~ Beta(alpha, alpha) + 1.
// The label passes through unchanged.
Vec extrapolate_mix(const Vec& u, const Vec& v, double omega);
std::pair<Vec, Vec> extrapolate(const Vec& u, const Vec& v, const Vec& label, double alpha,
                                Rng& rng);

// Mixed label with the tail-weighted rescaling: per class s,
// min((lambda*yi + (1-lambda)*yj) * ((1 - tau_s) + gamma), 1).
Vec calibrate_labels(const Vec& yi, const Vec& yj, double lambda, const Vec& tau, double gamma);

VicinitySample calibrated_interpolate(const Vec& zi, const Vec& yi, const Vec& zj, const Vec& yj,
                                      const Vec& tau, double gamma, double alpha, Rng& rng);

// Whole-batch pipeline: extrapolate each instance's two views, then
// interpolate against a shuffled partner. Output order matches input order.
std::vector<VicinitySample> apply_move_batch(std::span<const Vec> u, std::span<const Vec> v,
                                             std::span<const Vec> labels, const Vec& tau,
                                             double alpha, double gamma, Rng& rng);

}  // namespace move
