/* Copyright 2026 The MaskText Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MASKTEXT_CORE_ALIGNMENT_NUMERICS_HPP_
#define MASKTEXT_CORE_ALIGNMENT_NUMERICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "core/core_types.hpp"
#include "core/tensor.hpp"

// Forward passes and closed-form reverse-mode gradients for the text-guided
// fusion and the training losses. Everything is double precision with a fixed
// summation order, so results are bitwise reproducible.
namespace masktext::numerics {

// ---------------------------------------------------------------------------
// Cross-attention fusion

struct AttentionForward {
  DenseTensor output;   // n_q x d_v
  DenseTensor weights;  // n_q x n_k, rows sum to 1
};

// softmax(Q K^T / sqrt(d)) V with max-subtracted row softmax.
// Throws ShapeMismatch.
AttentionForward AttentionWithWeights(const DenseTensor& q, const DenseTensor& k,
                                      const DenseTensor& v);
DenseTensor Attention(const DenseTensor& q, const DenseTensor& k, const DenseTensor& v);

struct AttentionGrads {
  DenseTensor d_query;
  DenseTensor d_key;
  DenseTensor d_value;
};

AttentionGrads AttentionBackward(const DenseTensor& q, const DenseTensor& k,
                                 const DenseTensor& v, const AttentionForward& fwd,
                                 const DenseTensor& d_output);

// Projections from visual / text features to queries, keys and values, plus
// the feature bridge applied to each visual row.
struct FusionWeights {
  DenseTensor query;   // d_visual x d_k
  DenseTensor key;     // d_text x d_k
  DenseTensor value;   // d_text x d_v
  DenseTensor bridge;  // d_v x d_visual

  // Identity projections and the given bridge; requires d_visual == d_text.
  static FusionWeights WithIdentityProjections(std::size_t dim, DenseTensor bridge);
};

// R_m = Attention(R_I Wq, R_T Wk, R_T Wv) + R_I W_b^T. Throws ShapeMismatch.
DenseTensor Fuse(const DenseTensor& visual, const DenseTensor& text,
                 const FusionWeights& w);
// Identity projections.
DenseTensor Fuse(const DenseTensor& visual, const DenseTensor& text,
                 const DenseTensor& bridge);

struct FusionGrads {
  DenseTensor d_visual;
  DenseTensor d_text;
  DenseTensor d_query;
  DenseTensor d_key;
  DenseTensor d_value;
  DenseTensor d_bridge;
};

FusionGrads FuseBackward(const DenseTensor& visual, const DenseTensor& text,
                         const FusionWeights& w, const DenseTensor& d_output);

// ---------------------------------------------------------------------------
// Segmentation losses. Probabilities are classes x pixels; targets hold one
// class index per pixel. Gradients are with respect to the probabilities.

// Validated probability map: non-negative, each pixel sums to 1 within 1e-9.
class ProbMap {
 public:
  ProbMap(std::size_t classes, std::size_t pixels, std::vector<double> values);
  explicit ProbMap(DenseTensor values);

  std::size_t classes() const { return values_.rows(); }
  std::size_t pixels() const { return values_.cols(); }
  const DenseTensor& values() const { return values_; }

 private:
  DenseTensor values_;
};

inline constexpr double kProbClamp = 1e-7;

struct FocalParams {
  double gamma = 2.0;
  std::vector<double> alpha;  // per class; empty means all 1
};

struct LossAndGrad {
  double value = 0.0;
  DenseTensor grad;
};

// mean_i -alpha[t_i] (1 - p)^gamma log p, p = clamp(p_{t_i, i}, 1e-7, 1 - 1e-7).
double FocalLoss(const DenseTensor& p, std::span<const int> target,
                 const FocalParams& params = {});
LossAndGrad FocalLossGrad(const DenseTensor& p, std::span<const int> target,
                          const FocalParams& params = {});

// Clamped mean negative log-likelihood (focal with gamma 0, unit alpha).
double CrossEntropy(const DenseTensor& p, std::span<const int> target);

inline constexpr double kDiceEpsilon = 1e-6;

// 1 - mean_c (2 sum p_c t_c + eps) / (sum p_c + sum t_c + eps).
double DiceLoss(const DenseTensor& p, std::span<const int> target,
                double epsilon = kDiceEpsilon);
LossAndGrad DiceLossGrad(const DenseTensor& p, std::span<const int> target,
                         double epsilon = kDiceEpsilon);

// Lovasz-softmax averaged over the classes present in the target. The
// gradient is the subgradient picked by a stable descending error sort.
double LovaszLoss(const DenseTensor& p, std::span<const int> target);
LossAndGrad LovaszLossGrad(const DenseTensor& p, std::span<const int> target);

// Smallest distance between two errors of a present class, or between an
// error and zero; the loss is differentiable wherever this is positive.
double LovaszMinErrorGap(const DenseTensor& p, std::span<const int> target);

struct SegLossParams {
  FocalParams focal;
  double dice_epsilon = kDiceEpsilon;
};

struct SegLossBreakdown {
  double focal = 0.0;
  double dice = 0.0;
  double lovasz = 0.0;
  double total = 0.0;  // alpha * focal + beta * dice + gamma * lovasz
};

SegLossBreakdown SegLoss(const DenseTensor& p, std::span<const int> target,
                         const LossWeights& weights = {},
                         const SegLossParams& params = {});
LossAndGrad SegLossGrad(const DenseTensor& p, std::span<const int> target,
                        const LossWeights& weights = {},
                        const SegLossParams& params = {});

// ---------------------------------------------------------------------------
// Bidirectional contrastive alignment

// S_ij = <r_I^i, r_T^j> / tau, rows optionally L2-normalized first.
// Throws ShapeMismatch, NonPositiveTau, InvalidArgument (zero row with
// normalization on).
DenseTensor SimilarityMatrix(const EmbeddingBatch& visual, const EmbeddingBatch& text,
                             double tau, bool normalize = true);

struct ContrastiveLosses {
  double vision_to_text = 0.0;
  double text_to_vision = 0.0;
  double combined = 0.0;  // mean of the two directions
};

// Throws ShapeMismatch unless S is square.
ContrastiveLosses ContrastiveLoss(const DenseTensor& s);
// d(combined)/dS.
DenseTensor ContrastiveLossGrad(const DenseTensor& s);

struct EmbeddingGrads {
  DenseTensor d_visual;
  DenseTensor d_text;
};

EmbeddingGrads SimilarityBackward(const EmbeddingBatch& visual, const EmbeddingBatch& text,
                                  double tau, bool normalize, const DenseTensor& d_similarity);

// seg + lambda * cot.
double TotalLoss(double seg, double cot, const LossWeights& weights = {});

}  // namespace masktext::numerics

#endif  // MASKTEXT_CORE_ALIGNMENT_NUMERICS_HPP_
