#include "move/vicinity.hpp"

#include <algorithm>
#include <numeric>

#include "move/errors.hpp"

namespace move {

MixPlan draw_mix_plan(int batch, double alpha, bool extrapolation, bool interpolation, Rng& rng) {
  if (batch < 1) throw ArgumentError("mix plan: batch must be non-empty");
  if (!(alpha > 0.0)) throw ArgumentError("mix plan: alpha must be positive");
  MixPlan plan;
  plan.omega.resize(static_cast<std::size_t>(batch), 1.0);
  plan.lambda.resize(static_cast<std::size_t>(batch), 1.0);
  plan.pairing.resize(static_cast<std::size_t>(batch));
  std::iota(plan.pairing.begin(), plan.pairing.end(), 0);
  if (extrapolation) {
    for (double& w : plan.omega) w = beta_draw(rng, alpha, alpha) + 1.0;
  }
  if (interpolation) {
    plan.pairing = random_permutation(batch, rng);
    for (double& l : plan.lambda) l = beta_draw(rng, alpha, alpha);
  }
  return plan;
}

Vec extrapolate_mix(const Vec& u, const Vec& v, double omega) {
  if (u.size() != v.size()) throw ArgumentError("extrapolate: view dimensions disagree");
  return omega * u + (1.0 - omega) * v;
}

std::pair<Vec, Vec> extrapolate(const Vec& u, const Vec& v, const Vec& label, double alpha,
                                Rng& rng) {
  const double omega = beta_draw(rng, alpha, alpha) + 1.0;
  return {extrapolate_mix(u, v, omega), label};
}

Vec calibrate_labels(const Vec& yi, const Vec& yj, double lambda, const Vec& tau, double gamma) {
  if (yi.size() != yj.size() || yi.size() != tau.size()) {
    throw ArgumentError("calibrate_labels: label/tau dimensions disagree");
  }
  Vec mixed = lambda * yi + (1.0 - lambda) * yj;
  for (Eigen::Index s = 0; s < mixed.size(); ++s) {
    mixed[s] = std::min(mixed[s] * ((1.0 - tau[s]) + gamma), 1.0);
  }
  return mixed;
}

VicinitySample calibrated_interpolate(const Vec& zi, const Vec& yi, const Vec& zj, const Vec& yj,
                                      const Vec& tau, double gamma, double alpha, Rng& rng) {
  if (zi.size() != zj.size()) throw ArgumentError("interpolate: feature dimensions disagree");
  const double lambda = beta_draw(rng, alpha, alpha);
  VicinitySample out;
  out.feature = lambda * zi + (1.0 - lambda) * zj;
  out.label = calibrate_labels(yi, yj, lambda, tau, gamma);
  return out;
}

std::vector<VicinitySample> apply_move_batch(std::span<const Vec> u, std::span<const Vec> v,
                                             std::span<const Vec> labels, const Vec& tau,
                                             double alpha, double gamma, Rng& rng) {
  if (u.size() != v.size() || u.size() != labels.size()) {
    throw ArgumentError("apply_move_batch: batch spans disagree");
  }
  const int batch = static_cast<int>(u.size());
  const MixPlan plan = draw_mix_plan(batch, alpha, /*extrapolation=*/true,
                                     /*interpolation=*/true, rng);

  std::vector<Vec> expanded(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    expanded[i] = extrapolate_mix(u[i], v[i], plan.omega[i]);
  }
  std::vector<VicinitySample> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto j = static_cast<std::size_t>(plan.pairing[i]);
    out[i].feature = plan.lambda[i] * expanded[i] + (1.0 - plan.lambda[i]) * expanded[j];
    out[i].label = calibrate_labels(labels[i], labels[j], plan.lambda[i], tau, gamma);
  }
  return out;
}

}  // namespace move
