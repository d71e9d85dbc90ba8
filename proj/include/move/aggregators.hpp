#pragma once

#include <string>
#include <vector>

#include "move/dataset.hpp"
#include "move/dfs.hpp"
#include "move/rng.hpp"
#include "move/tensor.hpp"
#include "move/types.hpp"

namespace move {

// Multi-head attention where the query is the pooled (prototype) feature,
// so one pass re-expresses the video mean with its informative frames.
struct PsaParams {
  int heads = 4;
  std::vector<ad::Param> wq;  // per head, C x d_h
  std::vector<ad::Param> wk;
  std::vector<ad::Param> wv;
  ad::Param wo;               // C x C output projection

  int feat_dim() const { return static_cast<int>(wo.value.rows()); }
  int head_dim() const { return feat_dim() / heads; }
};

// Learnable codebook: soft-assignment weights, biases and centers.
struct CodebookParams {
  ad::Param centers;  // K x C
  ad::Param weights;  // K x C
  ad::Param biases;   // 1 x K

  int clusters() const { return static_cast<int>(centers.value.rows()); }
  int feat_dim() const { return static_cast<int>(centers.value.cols()); }
};

enum class VladNormalization { kNone, kL2, kIntraL2 };

std::string to_string(VladNormalization n);
VladNormalization vlad_normalization_from_string(const std::string& name);

// The two reduction heads of the concatenated projection.
struct ProjectionParams {
  ad::Param theta_w;  // C x D_p
  ad::Param theta_b;  // 1 x D_p
  ad::Param phi_w;    // (C*K) x D_p
  ad::Param phi_b;    // 1 x D_p

  int proj_dim() const { return static_cast<int>(theta_w.value.cols()); }
};

PsaParams init_psa(int feat_dim, int heads, Rng& rng);
// Centers start at K randomly chosen training frames; assignment weights get
// the soft-assignment warm start w = 2*mu, b = -|mu|^2.
CodebookParams init_codebook(const std::vector<FeatureSequence>& train, int clusters, Rng& rng);
ProjectionParams init_projection(int feat_dim, int clusters, int proj_dim, Rng& rng);

struct PsaResult {
  ad::Tensor prototype;                // 1 x C
  std::vector<ad::Tensor> attention;   // per head, 1 x T (post-softmax)
};

// Masked rows are zeroed on the input; they still occupy softmax mass, which
// is the declared behavior (zeroing is not deletion for attention).
PsaResult psa_forward(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask,
                      PsaParams& params);

struct VladResult {
  ad::Tensor descriptor;  // 1 x (K*C), flattened cluster-major
  ad::Tensor adjacency;   // T x K soft assignments (pre-mask)
};

VladResult netvlad_forward(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask,
                           CodebookParams& params, VladNormalization normalization);

// z = f_theta(psa) ++ f_phi(vlad), length 2 * D_p.
ad::Tensor aggregate(ad::Tape& tape, const ad::Tensor& x, const FrameMask& mask, PsaParams& psa,
                     CodebookParams& codebook, ProjectionParams& projection,
                     VladNormalization normalization);

// Tapeless diagnostics for the attention/adjacency CSV dumps.
Mat attention_scores(const Mat& x, const FrameMask& mask, PsaParams& params);  // h x T
Mat cluster_adjacency(const Mat& x, CodebookParams& params);                   // T x K

}  // namespace move
