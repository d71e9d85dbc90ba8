#include "move/aggregators.hpp"

#include <cmath>

#include "move/errors.hpp"

namespace move {

std::string to_string(VladNormalization n) {
  switch (n) {
    case VladNormalization::kNone: return "none";
    case VladNormalization::kL2: return "l2";
    case VladNormalization::kIntraL2: return "intra+l2";
  }
  throw ArgumentError("unknown vlad normalization");
}

VladNormalization vlad_normalization_from_string(const std::string& name) {
  if (name == "none") return VladNormalization::kNone;
  if (name == "l2") return VladNormalization::kL2;
  if (name == "intra+l2") return VladNormalization::kIntraL2;
  throw ArgumentError("unknown vlad normalization: " + name);
}

namespace {

// Uniform fan-in init: entries in +-sqrt(1/fan_in).
Mat uniform_fan_in(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(rows));
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = (2.0 * uniform_real(rng) - 1.0) * bound;
  }
  return m;
}

}  // namespace

PsaParams init_psa(int feat_dim, int heads, Rng& rng) {
  if (heads < 1 || feat_dim % heads != 0) {
    throw ArgumentError("psa: head count must divide the feature dimension");
  }
  const int head_dim = feat_dim / heads;
  PsaParams p;
  p.heads = heads;
  for (int h = 0; h < heads; ++h) {
    p.wq.push_back(ad::make_param("psa.wq." + std::to_string(h),
                                  uniform_fan_in(feat_dim, head_dim, rng)));
    p.wk.push_back(ad::make_param("psa.wk." + std::to_string(h),
                                  uniform_fan_in(feat_dim, head_dim, rng)));
    p.wv.push_back(ad::make_param("psa.wv." + std::to_string(h),
                                  uniform_fan_in(feat_dim, head_dim, rng)));
  }
  p.wo = ad::make_param("psa.wo", uniform_fan_in(feat_dim, feat_dim, rng));
  return p;
}

CodebookParams init_codebook(const std::vector<FeatureSequence>& train, int clusters, Rng& rng) {
  if (clusters < 1) throw ArgumentError("codebook: need at least one cluster");
  if (train.empty()) throw ArgumentError("codebook: empty training set");
  const auto feat_dim = train[0].frames.cols();
  Mat centers(clusters, feat_dim);
  for (int k = 0; k < clusters; ++k) {
    const auto vi = static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(train.size()) - 1));
    const auto ti = uniform_int(rng, 0, train[vi].frames.rows() - 1);
    centers.row(k) = train[vi].frames.row(ti).cast<double>();
  }
  constexpr double kAlphaInit = 1.0;
  CodebookParams p;
  p.weights = ad::make_param("codebook.w", Mat(2.0 * kAlphaInit * centers));
  Mat biases(1, clusters);
  for (int k = 0; k < clusters; ++k) biases(0, k) = -kAlphaInit * centers.row(k).squaredNorm();
  p.biases = ad::make_param("codebook.b", std::move(biases));
  p.centers = ad::make_param("codebook.mu", std::move(centers));
  return p;
}

ProjectionParams init_projection(int feat_dim, int clusters, int proj_dim, Rng& rng) {
  if (proj_dim < 1) throw ArgumentError("projection: proj_dim must be positive");
  ProjectionParams p;
  p.theta_w = ad::make_param("proj.theta.w", uniform_fan_in(feat_dim, proj_dim, rng));
  p.theta_b = ad::make_param("proj.theta.b", Mat::Zero(1, proj_dim));
  p.phi_w = ad::make_param("proj.phi.w",
                           uniform_fan_in(static_cast<Eigen::Index>(feat_dim) * clusters,
                                          proj_dim, rng));
  p.phi_b = ad::make_param("proj.phi.b", Mat::Zero(1, proj_dim));
  return p;
}

PsaResult psa_forward(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask,
                      PsaParams& params) {
  if (mask.frames() != x.rows()) throw DimensionError("psa: mask length must equal frame count");
  if (x.cols() != params.feat_dim()) throw DimensionError("psa: feature dim mismatch");
  if (mask.kept < 1) throw ArgumentError("psa: mask keeps no frames");

  const ad::Tensor mask_row = tape.constant(mask.row());
  const ad::Tensor masked = scale_rows(x, mask_row);
  // Mean over kept rows, as a fixed row of pooling weights.
  const ad::Tensor pool_weights =
      tape.constant(mask.row() / static_cast<double>(mask.kept));
  const ad::Tensor pooled = matmul(pool_weights, masked);  // 1 x C

  PsaResult result;
  std::vector<ad::Tensor> heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params.head_dim()));
  for (int h = 0; h < params.heads; ++h) {
    const ad::Tensor query = matmul(pooled, tape.leaf(params.wq[static_cast<std::size_t>(h)]));
    const ad::Tensor keys = matmul(masked, tape.leaf(params.wk[static_cast<std::size_t>(h)]));
    const ad::Tensor values = matmul(masked, tape.leaf(params.wv[static_cast<std::size_t>(h)]));
    const ad::Tensor scores = scale(matmul(query, transpose(keys)), inv_sqrt_d);  // 1 x T
    const ad::Tensor attention = softmax_rows(scores);
    result.attention.push_back(attention);
    heads.push_back(matmul(attention, values));  // 1 x d_h
  }
  ad::Tensor cat = heads[0];
  for (std::size_t h = 1; h < heads.size(); ++h) cat = concat_cols(cat, heads[h]);
  result.prototype = matmul(cat, tape.leaf(params.wo));
  return result;
}

VladResult netvlad_forward(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask,
                           CodebookParams& params, VladNormalization normalization) {
  if (mask.frames() != x.rows()) throw DimensionError("vlad: mask length must equal frame count");
  if (x.cols() != params.feat_dim()) throw DimensionError("vlad: feature dim mismatch");
  if (mask.kept < 1) throw ArgumentError("vlad: mask keeps no frames");

  const ad::Tensor weights = tape.leaf(params.weights);
  const ad::Tensor biases = tape.leaf(params.biases);
  const ad::Tensor centers = tape.leaf(params.centers);

  const ad::Tensor logits = add_bias(matmul(x, transpose(weights)), biases);  // T x K
  const ad::Tensor adjacency = softmax_rows(logits);

  const ad::Tensor mask_row = tape.constant(mask.row());
  const ad::Tensor kept_adjacency = scale_rows(adjacency, mask_row);
  // Residual sum: sum_t m_t rho_tk (x_t - mu_k), split into the frame term
  // and the occupancy-scaled centers.
  const ad::Tensor sums = matmul(transpose(kept_adjacency), x);   // K x C
  const ad::Tensor occupancy = sum_rows(kept_adjacency);          // 1 x K
  ad::Tensor vlad = sub(sums, scale_rows(centers, occupancy));

  if (normalization == VladNormalization::kIntraL2) {
    vlad = l2_normalize_rows(vlad);
  }
  ad::Tensor descriptor = flatten_row(vlad);
  if (normalization != VladNormalization::kNone) {
    descriptor = l2_normalize_rows(descriptor);
  }
  return {descriptor, adjacency};
}

ad::Tensor aggregate(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask, PsaParams& psa,
                     CodebookParams& codebook, ProjectionParams& projection,
                     VladNormalization normalization) {
  const PsaResult sa = psa_forward(tape, x, mask, psa);
  const VladResult cb = netvlad_forward(tape, x, mask, codebook, normalization);
  const ad::Tensor reduced_sa =
      add_bias(matmul(sa.prototype, tape.leaf(projection.theta_w)), tape.leaf(projection.theta_b));
  const ad::Tensor reduced_cb =
      add_bias(matmul(cb.descriptor, tape.leaf(projection.phi_w)), tape.leaf(projection.phi_b));
  return concat_cols(reduced_sa, reduced_cb);
}

Mat attention_scores(const Mat& x, const FrameMask& mask, PsaParams& params) {
  ad::Tape tape;
  const PsaResult result = psa_forward(tape, tape.constant(x), mask, params);
  Mat scores(params.heads, x.rows());
  for (int h = 0; h < params.heads; ++h) {
    scores.row(h) = result.attention[static_cast<std::size_t>(h)].value().row(0);
  }
  return scores;
}

Mat cluster_adjacency(const Mat& x, CodebookParams& params) {
  ad::Tape tape;
  const VladResult result = netvlad_forward(tape, tape.constant(x), full_mask(static_cast<int>(x.rows())),
                                            params, VladNormalization::kNone);
  return result.adjacency.value();
}

}  // namespace move
